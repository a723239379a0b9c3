"""
Random-coding performance prediction for the constrained ordered-statistics
search, without running a decoder.

The driver quantity is D(r): among all patterns over the k + delta most
reliable positions, how many weigh strictly less than the hard-decision
pattern.  Conditioned on D, the rank of the transmitted word in a random
local code is Binomial(D, 2^-delta), which turns sampled reliability vectors
directly into list-miss probabilities, rank statistics, and parameter-tuning
curves.  D itself is either counted exactly by best-first enumeration or
approximated through the cumulant generating function of the weight
difference (a saddlepoint tail estimate), which agrees with counting to a
few percent over the regimes of interest.

Cardinalities are carried in log2 until a tail probability is needed;
the binomial tail switches to a Poisson tail above 10^6 (p is tiny there,
so the Poisson error is far below Monte Carlo noise; the switchover is
covered by a boundary test).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfcx
from scipy.stats import binom, poisson

from .channel import as_generator
from .errors import InvalidCurve, UnreachableTarget

_LN2 = math.log(2.0)
_BINOMIAL_LIMIT = 10**6


# ---------------------------------------------------------------------------
# Cardinality of lighter patterns.
# ---------------------------------------------------------------------------


def count_lighter(r_mrb, cap: int | None = None) -> int | None:
    """Exact count of patterns strictly lighter than the hard-decision one.

    Runs the flipping-pattern-tree enumeration over the sorted reliabilities
    and stops at the first pattern at least as heavy.  Returns None when the
    count would exceed `cap` (meaning: strictly more than `cap`).
    """
    r = np.asarray(r_mrb, dtype=np.float64)
    threshold = float(np.sum(np.abs(r[r < 0])))
    if threshold <= 0.0:
        return 0
    # the hard-decision pattern itself sits exactly at the threshold;
    # incremental sums may land an ulp under it, so back the cut off a hair
    cut = threshold - 1e-9 * (1.0 + threshold)
    w = np.sort(np.abs(r)).tolist()
    n = len(w)
    limit = math.inf if cap is None else cap
    heap: list[tuple[float, int]] = [(0.0, 0)]
    count = 0
    while heap:
        weight, mask = heapq.heappop(heap)
        if weight >= cut:
            break
        count += 1
        if count > limit:
            return None
        if not mask & 1:
            heapq.heappush(heap, (weight + w[0], mask | 1))
        if mask:
            m = (mask & -mask).bit_length() - 1
            if m + 1 < n and not (mask >> (m + 1)) & 1:
                heapq.heappush(
                    heap,
                    (weight - w[m] + w[m + 1], (mask ^ (1 << m)) | (1 << (m + 1))),
                )
    return count


@dataclass(frozen=True)
class SaddlepointSolution:
    """Root and curvature of the weight-difference cumulant generating function."""

    s_hat: float
    kappa: float
    kappa2: float
    log2_cardinality: float


def saddlepoint_cardinality(r_mrb) -> SaddlepointSolution:
    """Saddlepoint estimate of the lighter-pattern count.

    kappa(s) = sum log(1/2 + 1/2 e^(s r_i)); its derivative is strictly
    increasing and has a root iff both signs occur among the r_i.  The
    one-sign cases are exact and handled separately: no pattern is lighter
    when every r_i is positive, and all but the hard decision itself are
    lighter when every r_i is negative.
    """
    r = np.asarray(r_mrb, dtype=np.float64)
    if len(r) < 1:
        raise ValueError("need at least one reliability value")
    dim = len(r)
    if np.all(r > 0):
        return SaddlepointSolution(math.nan, math.nan, math.nan, -math.inf)
    if np.all(r < 0):
        exact = math.log2(2.0**dim - 1.0) if dim <= 50 else dim
        return SaddlepointSolution(math.nan, math.nan, math.nan, exact)

    def kappa1(s: float) -> float:
        sig = 1.0 / (1.0 + np.exp(-s * r))
        return float(np.sum(r * sig))

    scale = 1.0 / float(np.max(np.abs(r)))
    lo, hi = -50.0 * scale, 50.0 * scale
    while kappa1(lo) > 0.0:
        lo *= 2.0
    while kappa1(hi) < 0.0:
        hi *= 2.0
    s_hat = float(brentq(kappa1, lo, hi, xtol=1e-14, rtol=8.9e-16))
    sig = 1.0 / (1.0 + np.exp(-s_hat * r))
    k1 = float(np.sum(r * sig))
    k2 = float(np.sum(r * r * sig * (1.0 - sig)))
    kap = float(np.sum(np.logaddexp(0.0, s_hat * r)) + dim * math.log(0.5))
    arg = (k1 - s_hat * k2) / math.sqrt(2.0 * k2)
    # exp(kappa - s k' + s^2 k''/2) erfc(arg) rewritten through erfcx for
    # stability; exact in k' rather than assuming k'(s_hat) is identically 0.
    log_tail = kap + math.log(0.5) + float(np.log(erfcx(arg))) - k1 * k1 / (2.0 * k2)
    return SaddlepointSolution(s_hat, kap, k2, dim + log_tail / _LN2)


# ---------------------------------------------------------------------------
# Sampling the most-reliable-bit channel.
# ---------------------------------------------------------------------------


def sample_mrb_llrs(n: int, k: int, delta: int, sigma: float, rng) -> np.ndarray:
    """LLRs of the k + delta most reliable positions of an all-zero frame.

    This proxy sorts by reliability only; it ignores the rank-repair swaps
    of the decoder's permutation, whose effect on these statistics is
    second order.
    """
    y = 1.0 + sigma * rng.standard_normal(n)
    r = 2.0 * y / (sigma * sigma)
    idx = np.argpartition(np.abs(r), n - (k + delta))[n - (k + delta) :]
    return r[idx]


def sample_cardinalities(
    n: int,
    k: int,
    delta: int,
    sigma: float,
    samples: int,
    seed,
    method: str = "saddlepoint",
    counting_cap: int = _BINOMIAL_LIMIT,
) -> np.ndarray:
    """Draw reliability vectors and return one cardinality per sample.

    method "saddlepoint" returns the (float) saddlepoint estimates; method
    "counting" counts exactly up to `counting_cap` and records +inf beyond
    it (a cap exceedance means "more than cap", and every downstream tail is
    monotone in D, so +inf gives the conservative value 1).
    """
    if method not in ("saddlepoint", "counting"):
        raise ValueError(f"unknown cardinality method {method!r}")
    rng = as_generator(seed)
    out = np.empty(samples, dtype=np.float64)
    for i in range(samples):
        r = sample_mrb_llrs(n, k, delta, sigma, rng)
        if method == "saddlepoint":
            out[i] = 2.0 ** saddlepoint_cardinality(r).log2_cardinality
        else:
            c = count_lighter(r, cap=counting_cap)
            out[i] = math.inf if c is None else float(c)
    return out


# ---------------------------------------------------------------------------
# Binomial rank model.
# ---------------------------------------------------------------------------


def list_miss_tail(cards: np.ndarray, delta: int, l_max: int) -> np.ndarray:
    """P[rank >= l_max] per sampled cardinality, under Binomial(D, 2^-delta)."""
    cards = np.asarray(cards, dtype=np.float64)
    p = 0.5**delta
    out = np.zeros_like(cards)
    inf_mask = np.isinf(cards)
    out[inf_mask] = 1.0
    small = ~inf_mask & (cards > 0) & (cards <= _BINOMIAL_LIMIT)
    if np.any(small):
        d = np.round(cards[small]).astype(np.int64)
        out[small] = binom.sf(l_max - 1, d, p)
    large = ~inf_mask & (cards > _BINOMIAL_LIMIT)
    if np.any(large):
        out[large] = poisson.sf(l_max - 1, cards[large] * p)
    return out


def expected_capped_rank(cards: np.ndarray, delta: int, cap: int) -> np.ndarray:
    """E[min(rank, cap)] per sampled cardinality.

    Uses E[min(X, m)] = E[X] - (E[X] S'(m) - m S(m+1)) where S is the
    survival function and S' the survival function with one trial removed
    (binomial) or S itself (Poisson); this avoids summing cap terms.
    """
    cards = np.asarray(cards, dtype=np.float64)
    p = 0.5**delta
    m = cap
    out = np.zeros_like(cards)
    if m <= 0:
        return out
    inf_mask = np.isinf(cards)
    out[inf_mask] = float(m)
    small = ~inf_mask & (cards > 0) & (cards <= _BINOMIAL_LIMIT)
    if np.any(small):
        d = np.round(cards[small]).astype(np.int64)
        mean = d * p
        excess = mean * binom.sf(m - 1, np.maximum(d - 1, 0), p) - m * binom.sf(m, d, p)
        out[small] = mean - excess
    large = ~inf_mask & (cards > _BINOMIAL_LIMIT)
    if np.any(large):
        lam = cards[large] * p
        excess = lam * poisson.sf(m - 1, lam) - m * poisson.sf(m, lam)
        out[large] = lam - excess
    return np.clip(out, 0.0, float(m))


# ---------------------------------------------------------------------------
# List-FER curves, rank statistics, bounds, tuning.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CurvePoint:
    eps: float
    head_mean: float  # E[min(rank, l_max - 1)], used for the conditional mean


@dataclass
class ListFerCurve:
    """Estimated list-miss probabilities for a set of list sizes."""

    n: int
    k: int
    delta: int
    sigma: float
    samples: int
    entries: dict[int, CurvePoint] = field(default_factory=dict)

    def eps(self, l_max: int) -> float:
        return self.entries[l_max].eps


def list_fer(
    n: int,
    k: int,
    delta: int,
    sigma: float,
    l_max_values,
    samples: int,
    seed,
    method: str = "saddlepoint",
    counting_cap: int = _BINOMIAL_LIMIT,
    cards: np.ndarray | None = None,
) -> ListFerCurve:
    """Estimate P[transmitted word misses the list] for each list size.

    Semi-simulation: reliability vectors are drawn, their cardinalities
    computed, and the binomial rank model averaged - no decoding happens.
    Pass `cards` to reuse previously sampled cardinalities.
    """
    if cards is None:
        cards = sample_cardinalities(n, k, delta, sigma, samples, seed, method, counting_cap)
    curve = ListFerCurve(n=n, k=k, delta=delta, sigma=sigma, samples=len(cards))
    for l_max in sorted(set(int(v) for v in l_max_values)):
        eps = float(np.mean(list_miss_tail(cards, delta, l_max)))
        head = float(np.mean(expected_capped_rank(cards, delta, l_max - 1)))
        curve.entries[l_max] = CurvePoint(eps=eps, head_mean=head)
    return curve


def conditional_rank(curve: ListFerCurve, l_max: int) -> float:
    """E[rank | rank < l_max] of the transmitted word under the rank model."""
    point = curve.entries[l_max]
    if point.eps >= 1.0:
        return float(l_max - 1)
    return (point.head_mean - (l_max - 1) * point.eps) / (1.0 - point.eps)


def rank_statistics(curve: ListFerCurve, l_max: int):
    """Rank PMF (from a densely sampled curve) and the conditional mean.

    The PMF entry at rank l is eps(l) - eps(l+1) and needs every list size
    1..l_max in the curve; the conditional mean never needs the dense curve
    because the head sum telescopes into a per-sample expectation.  When the
    dense entries are absent, the PMF comes back as None.
    """
    eps_values = [curve.entries[l].eps for l in sorted(curve.entries)]
    if any(b > a + 1e-12 for a, b in zip(eps_values, eps_values[1:])):
        raise InvalidCurve("list-miss estimates must be non-increasing in the list size")
    pmf = None
    if all(l in curve.entries for l in range(1, l_max + 1)):
        pmf = {
            l: curve.entries[l].eps - curve.entries[l + 1].eps
            for l in range(1, l_max)
        }
    return pmf, conditional_rank(curve, l_max)


def fer_upper_bound(curve: ListFerCurve, l_max: int, mld_fer: float = 0.0) -> float:
    """Decoder FER bound: optimal-decoder FER plus the list-miss probability."""
    if not 0.0 <= mld_fer <= 1.0:
        raise ValueError("mld_fer must be a probability")
    return mld_fer + curve.entries[l_max].eps


def min_list_size(
    n: int,
    k: int,
    delta: int,
    sigma: float,
    target: float,
    samples: int,
    seed,
    method: str = "saddlepoint",
    counting_cap: int = _BINOMIAL_LIMIT,
    cards: np.ndarray | None = None,
) -> int:
    """Smallest list size whose estimated miss probability is <= target.

    Exponential search followed by bisection, relying on monotonicity of
    the miss probability in the list size.

    Raises:
        UnreachableTarget: if even listing every pattern cannot reach the
            target at this sampling resolution.
    """
    if not 0.0 < target < 1.0:
        raise ValueError("target must be in (0, 1)")
    if cards is None:
        cards = sample_cardinalities(n, k, delta, sigma, samples, seed, method, counting_cap)

    def eps_at(l_max: int) -> float:
        return float(np.mean(list_miss_tail(cards, delta, l_max)))

    if eps_at(1) <= target:
        return 1
    ceiling = 1 << min(k + delta, 62)
    hi = 2
    while eps_at(hi) > target:
        hi *= 2
        if hi > ceiling:
            if eps_at(ceiling) > target:
                raise UnreachableTarget(
                    f"target {target} below the curve floor at this resolution"
                )
            hi = ceiling
            break
    lo = hi // 2  # eps(lo) > target, eps(hi) <= target
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if eps_at(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def cardinality_ccdf(cards: np.ndarray, thresholds) -> np.ndarray:
    """P[D > d] for each threshold d, treating capped samples as exceeding."""
    cards = np.asarray(cards, dtype=np.float64)
    return np.array([float(np.mean(cards > d)) for d in np.asarray(thresholds)])


# ---------------------------------------------------------------------------
# Time model.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimeModel:
    """Per-unit time factors (seconds) for the three complexity terms:
    elimination row operations, trellis sweep states, and per-search work.
    """

    rho1: float
    rho2: float
    rho3: float

    def __post_init__(self):
        if min(self.rho1, self.rho2, self.rho3) < 0:
            raise ValueError("time factors must be nonnegative")

    @classmethod
    def reference(cls) -> "TimeModel":
        # Desktop-CPU reference calibration, in seconds.
        return cls(rho1=0.0816e-9, rho2=26.4e-9, rho3=0.728e-9)


def decode_time(
    n: int, k: int, delta: int, searches: float, model: TimeModel | None = None
) -> float:
    """Predicted wall time of one decode with the given number of searches.

    Plug in an average search count for the average time or the list budget
    for the worst case.
    """
    m = model if model is not None else TimeModel.reference()
    left = n - k - delta
    right = k + delta
    return (
        m.rho1 * n * (n - k) * left
        + m.rho2 * (2.0**delta) * right
        + m.rho3 * searches * left * right
    )
