"""Command-line entry point.

    sim run <config.yaml>        run an experiment from a config file
    sim preset <name>            run a shipped preset (fig3..fig8)
    sim validate <config.yaml>   check a config file and exit

Exit status: 0 on success, 2 on configuration errors, 1 on numerical
degeneracy.
"""

from __future__ import annotations

import argparse
import sys

import yaml

from .config import ConfigError, config_from_dict, config_to_dict, load_config, save_config
from .experiments import PRESETS, preset_config, run_experiment
from .info import DegenerateCovarianceError
from .rates import FeasibilityError


def _parse_overrides(pairs):
    out = {}
    for pair in pairs or ():
        key, sep, raw = pair.partition("=")
        if not sep or not key:
            raise ConfigError(f"override {pair!r} is not of the form key=value")
        try:
            out[key] = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigError(f"override value {raw!r} is not valid YAML: {exc}") from exc
    return out


def _apply_common(cfg, args):
    updates = _parse_overrides(args.override)
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.samples is not None:
        updates["n_samples"] = args.samples
    if args.out is not None:
        updates["out"] = args.out
    if args.json_out is not None:
        updates["json_out"] = args.json_out
    if not updates:
        return cfg
    try:
        merged = config_to_dict(cfg)
        merged.update(updates)
        return config_from_dict(merged)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _run_and_write(cfg) -> int:
    result = run_experiment(cfg)
    result.write(cfg.out, cfg.json_out or None)
    print(f"wrote {cfg.out}" + (f" and {cfg.json_out}" if cfg.json_out else ""))
    return 0


def _add_common(sub):
    sub.add_argument("--seed", type=int, help="master seed")
    sub.add_argument("--samples", type=int, help="Monte Carlo draws per sweep point")
    sub.add_argument("--out", help="output CSV path")
    sub.add_argument("--json-out", dest="json_out", help="optional JSON mirror path")
    sub.add_argument(
        "--override",
        action="append",
        metavar="KEY=VALUE",
        help="override any config field (value parsed as YAML); repeatable",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="relay-network rate, outage and throughput sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("config", help="YAML config path")
    _add_common(p_run)

    p_preset = sub.add_parser("preset", help="run a shipped preset")
    p_preset.add_argument("name", choices=sorted(PRESETS), help="preset name")
    _add_common(p_preset)
    p_preset.add_argument(
        "--emit-config", dest="emit_config", help="also write the materialized config"
    )

    p_val = sub.add_parser("validate", help="check a config file")
    p_val.add_argument("config", help="YAML config path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            cfg = load_config(args.config)
            print(f"ok: {args.config} ({cfg.kind})")
            return 0
        if args.command == "run":
            cfg = _apply_common(load_config(args.config), args)
            return _run_and_write(cfg)
        cfg = _apply_common(preset_config(args.name), args)
        if args.emit_config:
            save_config(cfg, args.emit_config)
        return _run_and_write(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateCovarianceError, FeasibilityError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
