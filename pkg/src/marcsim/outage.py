"""Monte Carlo outage and throughput estimation under block-Rayleigh fading.

A draw is one channel state; outage is the event that the fixed target
rate pair falls outside the scheme's instantaneous rate region (strict
violation of any bound; boundary equality is not outage).  The individual
outage of one user is resolved by classifying each draw into one of four
regions of the rate plane:

    1: user 1 undecodable, user 2 decodable
    2: user 1 decodable,   user 2 undecodable
    3: both undecodable
    4: no outage

Draws come in fixed-size blocks from counter-based substreams
(seed, block index), and accumulation is integer counting, so estimates
are bit-identical across runs and worker counts and schemes can be
compared on shared draws without cross-scheme Monte Carlo noise.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rates
from .channel import (
    BLOCK_SIZE,
    ChannelState,
    FadingProfile,
    PowerConfig,
    _check_beta,
    sample_fading_block,
)
from .info import prefactor

__all__ = [
    "SCHEMES",
    "RateTarget",
    "OutageEstimate",
    "RegionOutcome",
    "IndividualOutageEstimate",
    "outage_flags",
    "gqf_outage_indicator",
    "classify_region",
    "classify_region_batch",
    "common_outage_mc",
    "csit_outage_mc",
    "individual_outage_mc",
    "optimize_ru_grid",
    "expected_sum_rate_common",
    "expected_sum_rate_indiv",
]

_LN2 = math.log(2.0)

#: schemes the Monte Carlo layer knows how to evaluate per draw
SCHEMES = ("gqf", "csit", "nonwz_cf", "df", "af", "direct", "direct15")

#: schemes whose region depends on the relay index rate
RU_SCHEMES = ("gqf", "nonwz_cf")


@dataclass(frozen=True)
class RateTarget:
    """Fixed transmission rates: per-user targets and, for fixed-index-rate
    schemes, the relay index rate (bits/channel use)."""

    r1: float
    r2: float
    ru: float = 0.0

    def __post_init__(self):
        for name in ("r1", "r2", "ru"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"rate {name} must be finite and >= 0, got {v!r}")


@dataclass(frozen=True)
class OutageEstimate:
    """Empirical outage probability with its normal-approximation 95% CI."""

    p_hat: float
    n_samples: int
    seed: int
    ci95_halfwidth: float

    def __post_init__(self):
        if not 0.0 <= self.p_hat <= 1.0:
            raise ValueError(f"p_hat must lie in [0, 1], got {self.p_hat!r}")
        if self.n_samples < 1:
            raise ValueError("need at least one sample")

    @classmethod
    def from_count(cls, count: int, n: int, seed: int) -> "OutageEstimate":
        p = count / n
        return cls(p, n, seed, 1.96 * math.sqrt(p * (1.0 - p) / n))


@dataclass(frozen=True)
class RegionOutcome:
    """Rate-plane region of one draw (1, 2, 3 or 4)."""

    region_index: int

    def __post_init__(self):
        if self.region_index not in (1, 2, 3, 4):
            raise ValueError(f"region index must be 1..4, got {self.region_index!r}")


@dataclass(frozen=True)
class IndividualOutageEstimate:
    """Individual and common outage from one classification pass.

    By construction p_indiv1 = f1 + f3, p_indiv2 = f2 + f3 and
    p_common = f1 + f2 + f3 hold exactly, where region_freqs = (f1..f4).
    """

    p_indiv1: float
    p_indiv2: float
    p_common: float
    region_freqs: tuple[float, float, float, float]
    n_samples: int
    seed: int


def _columns(h: np.ndarray):
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[1] != 5:
        raise ValueError("draw matrix must have shape (n, 5)")
    return h[:, 0], h[:, 1], h[:, 2], h[:, 3], h[:, 4]


def _sigma_for_ru(h1r, h2r, power: PowerConfig, beta: float, ru: float, k: float):
    received = np.abs(h1r) ** 2 * power.p11 + np.abs(h2r) ** 2 * power.p21
    return (1.0 + received) / math.expm1(ru / (beta * k) * _LN2)


def _violated(i1, i2, isum, target: RateTarget):
    return (
        (target.r1 > np.maximum(i1, 0.0))
        | (target.r2 > np.maximum(i2, 0.0))
        | (target.r1 + target.r2 > np.maximum(isum, 0.0))
    )


def _require_ru(scheme: str, target: RateTarget):
    if target.ru <= 0.0:
        raise ValueError(f"scheme {scheme!r} needs a positive relay index rate")


def outage_flags(
    scheme: str,
    h: np.ndarray,
    power: PowerConfig,
    beta: float,
    target: RateTarget,
) -> np.ndarray:
    """Per-draw outage indicators of ``scheme`` on the draw matrix ``h``.

    Complex fading semantics (prefactor 1).  Evaluating several schemes on
    one ``h`` compares them on shared draws.
    """
    _check_beta(beta)
    h1d, h2d, h1r, h2r, hrd = _columns(h)
    k = 1.0
    if scheme == "gqf":
        _require_ru(scheme, target)
        sq2 = _sigma_for_ru(h1r, h2r, power, beta, target.ru, k)
        t = rates._gqf_terms(h1d, h2d, h1r, h2r, hrd, power, beta, sq2, k)
        return _violated(
            np.minimum(t[0], t[1]), np.minimum(t[2], t[3]), np.minimum(t[4], t[5]), target
        )
    if scheme == "csit":
        i1, i2, isum = rates._csit_terms(h1d, h2d, h1r, h2r, hrd, power, beta, k)
        return _violated(i1, i2, isum, target)
    if scheme == "nonwz_cf":
        _require_ru(scheme, target)
        t = rates._nonwz_terms(h1d, h2d, h1r, h2r, hrd, power, beta, target.ru, k)
        return _violated(t[0], t[1], t[2], target)
    if scheme == "df":
        i1, i2, isum = rates._df_terms(
            h1d, h2d, h1r, h2r, hrd, power, beta, target.r1, target.r2, k
        )
        return _violated(i1, i2, isum, target)
    if scheme == "af":
        if abs(beta - 0.5) > 1e-12:
            raise ValueError("amplify-forward needs beta = 0.5")
        i1, i2, isum = rates._af_terms(h1d, h2d, h1r, h2r, hrd, power, k)
        return _violated(i1, i2, isum, target)
    if scheme == "direct":
        i1, i2, isum = rates._direct_terms(h1d, h2d, power, beta, k)
        return _violated(i1, i2, isum, target)
    if scheme == "direct15":
        i1, i2, isum = rates._direct_terms(h1d, h2d, power, beta, k, boost=1.5)
        return _violated(i1, i2, isum, target)
    raise ValueError(f"unknown scheme {scheme!r}; known: {SCHEMES}")


def gqf_outage_indicator(
    state: ChannelState, power: PowerConfig, beta: float, target: RateTarget
) -> tuple[bool, rates.GqfBounds]:
    """Outage indicator of the fixed-index-rate joint-decoding scheme for
    one state, with the six bounds returned for audit.

    The quantizer variance is chosen from the source-relay gains alone
    (receiver-side CSI); the six violation tests then see the full state.
    """
    _check_beta(beta)
    _require_ru("gqf", target)
    k = prefactor(state.field_kind)
    h1d, h2d, h1r, h2r, hrd = state.gains()
    sq2 = float(_sigma_for_ru(h1r, h2r, power, beta, target.ru, k))
    t = rates._gqf_terms(h1d, h2d, h1r, h2r, hrd, power, beta, sq2, k)
    t = [float(v) for v in t]
    # spending the index rate exactly makes t*b equal the index-charged
    # bounds minus ru, so the raw bounds are recovered by adding ru back
    bounds = rates.GqfBounds(
        b_r1=t[0], b_r1u=t[1] + target.ru,
        b_r2=t[2], b_r2u=t[3] + target.ru,
        b_r12=t[4], b_r12u=t[5] + target.ru,
    )
    flag = bool(
        _violated(min(t[0], t[1]), min(t[2], t[3]), min(t[4], t[5]), target)
    )
    return flag, bounds


def classify_region_batch(
    h: np.ndarray,
    power: PowerConfig,
    beta: float,
    target: RateTarget,
    scheme: str = "gqf",
) -> np.ndarray:
    """Rate-plane region (1..4) of every draw in ``h`` for ``gqf`` or
    ``nonwz_cf``.

    Region 2 requires user 1 decodable with user 2's signal treated as
    noise and user 2 undecodable even after user 1 is cancelled; region 1
    mirrors it.  Raises RuntimeError if the four regions fail to partition
    (internal invariant).
    """
    _check_beta(beta)
    _require_ru(scheme, target)
    h1d, h2d, h1r, h2r, hrd = _columns(h)
    k = 1.0
    r1, r2 = target.r1, target.r2
    clamp = lambda x: np.maximum(x, 0.0)
    if scheme == "gqf":
        sq2 = _sigma_for_ru(h1r, h2r, power, beta, target.ru, k)
        t = rates._gqf_terms(h1d, h2d, h1r, h2r, hrd, power, beta, sq2, k)
        common = _violated(
            np.minimum(t[0], t[1]), np.minimum(t[2], t[3]), np.minimum(t[4], t[5]), target
        )
        w1a, w1b, w2a, w2b = rates._interference_terms(
            h1d, h2d, h1r, h2r, hrd, power, beta, sq2, target.ru, k
        )
        user1_alone = (r1 <= clamp(w1a)) & (r1 <= clamp(w1b))
        user2_alone = (r2 <= clamp(w2a)) & (r2 <= clamp(w2b))
        reg2 = user1_alone & (r2 > clamp(t[2])) & (r2 > clamp(t[3]))
        reg1 = user2_alone & (r1 > clamp(t[0])) & (r1 > clamp(t[1]))
    elif scheme == "nonwz_cf":
        i1, i2, isum, _, i1_int, i2_int = rates._nonwz_terms(
            h1d, h2d, h1r, h2r, hrd, power, beta, target.ru, k
        )
        common = _violated(i1, i2, isum, target)
        reg2 = (r1 <= clamp(i1_int)) & (r2 > clamp(i2))
        reg1 = (r2 <= clamp(i2_int)) & (r1 > clamp(i1))
    else:
        raise ValueError(f"region classification supports {RU_SCHEMES}, got {scheme!r}")
    if np.any(reg1 & reg2) or np.any((reg1 | reg2) & ~common):
        raise RuntimeError("region classification invariant violated")
    codes = np.full(common.shape, 4, dtype=np.int8)
    codes[common] = 3
    codes[reg1] = 1
    codes[reg2] = 2
    return codes


def classify_region(
    state: ChannelState, power: PowerConfig, beta: float, target: RateTarget,
    scheme: str = "gqf",
) -> RegionOutcome:
    """Region of one draw; see :func:`classify_region_batch`."""
    h = np.array([state.gains()], dtype=complex)
    return RegionOutcome(int(classify_region_batch(h, power, beta, target, scheme)[0]))


# ---------------------------------------------------------------------------
# Monte Carlo accumulation
# ---------------------------------------------------------------------------


def _accumulate(profile, n, seed, width, fn, workers, block_size):
    """Sum fn(block) over the first n draws; fn returns int64 counts.

    Blocks are keyed substreams, so the sum does not depend on evaluation
    order or worker count.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    nblocks = (n + block_size - 1) // block_size

    def one(b):
        h = sample_fading_block(profile, seed, b, block_size)
        if b == nblocks - 1 and n % block_size:
            h = h[: n % block_size]
        return np.asarray(fn(h), dtype=np.int64)

    total = np.zeros(width, dtype=np.int64)
    if workers <= 1:
        for b in range(nblocks):
            total += one(b)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for counts in pool.map(one, range(nblocks)):
                total += counts
    return total


def common_outage_mc(
    scheme: str,
    profile: FadingProfile,
    power: PowerConfig,
    beta: float,
    target: RateTarget,
    n: int,
    seed: int,
    *,
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
) -> OutageEstimate:
    """Common outage probability of ``scheme`` over ``n`` fading draws.

    Identical (scheme, inputs, n, seed) give bit-identical estimates,
    regardless of ``workers``.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; known: {SCHEMES}")
    fn = lambda h: [int(outage_flags(scheme, h, power, beta, target).sum())]
    count = _accumulate(profile, n, seed, 1, fn, workers, block_size)[0]
    return OutageEstimate.from_count(int(count), n, seed)


def csit_outage_mc(
    profile: FadingProfile,
    power: PowerConfig,
    beta: float,
    target: RateTarget,
    n: int,
    seed: int,
    *,
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
) -> OutageEstimate:
    """Common outage of the complete-CSI relay reference."""
    return common_outage_mc(
        "csit", profile, power, beta, target, n, seed, workers=workers, block_size=block_size
    )


def individual_outage_mc(
    profile: FadingProfile,
    power: PowerConfig,
    beta: float,
    target: RateTarget,
    n: int,
    seed: int,
    *,
    scheme: str = "gqf",
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
) -> IndividualOutageEstimate:
    """Individual and common outage from one region-classification pass."""

    def fn(h):
        codes = classify_region_batch(h, power, beta, target, scheme)
        return np.bincount(codes, minlength=5)[1:5]

    counts = _accumulate(profile, n, seed, 4, fn, workers, block_size)
    f1, f2, f3, f4 = (int(c) / n for c in counts)
    return IndividualOutageEstimate(
        p_indiv1=f1 + f3,
        p_indiv2=f2 + f3,
        p_common=f1 + f2 + f3,
        region_freqs=(f1, f2, f3, f4),
        n_samples=n,
        seed=seed,
    )


def optimize_ru_grid(
    profile: FadingProfile,
    power: PowerConfig,
    beta: float,
    target: RateTarget,
    grid,
    n: int,
    seed: int,
    *,
    scheme: str = "gqf",
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
) -> tuple[float, OutageEstimate]:
    """Relay index rate from ``grid`` minimizing common outage on shared
    draws; ties resolve to the smallest rate.  ``target.ru`` is ignored."""
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("index-rate grid must be non-empty")
    if any(g <= 0.0 for g in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("index-rate grid must be positive and strictly increasing")
    if scheme not in RU_SCHEMES:
        raise ValueError(f"index-rate optimization supports {RU_SCHEMES}, got {scheme!r}")
    targets = [RateTarget(target.r1, target.r2, g) for g in grid]

    def fn(h):
        return [int(outage_flags(scheme, h, power, beta, t).sum()) for t in targets]

    counts = _accumulate(profile, n, seed, len(grid), fn, workers, block_size)
    best = int(np.argmin(counts))  # first minimum = smallest rate on ties
    return grid[best], OutageEstimate.from_count(int(counts[best]), n, seed)


def expected_sum_rate_common(target: RateTarget, outage: OutageEstimate) -> float:
    """Throughput (r1 + r2)(1 - p) under the common-outage definition."""
    return (target.r1 + target.r2) * (1.0 - outage.p_hat)


def expected_sum_rate_indiv(target: RateTarget, p_indiv1: float, p_indiv2: float) -> float:
    """Throughput r1(1 - p1) + r2(1 - p2) under individual outage."""
    return target.r1 * (1.0 - p_indiv1) + target.r2 * (1.0 - p_indiv2)
