"""
BPSK modulation over the AWGN channel, LLR statistics, and the reliability
distributions used by the static stopping threshold and the most-reliable-bit
analysis.

Conventions (fixed, and load-bearing for every calibrated number downstream):
  * unit-energy BPSK, x = (-1)^c;
  * sigma = (2 * rate * 10^(EbN0_dB / 10))^(-1/2);
  * LLR r = 2 y / sigma^2, hard decision z = [r < 0].

Randomness comes from numpy's seeded generators; per-frame seeds are derived
from a master seed with `numpy.random.SeedSequence`, which makes simulation
results independent of how frames are distributed over workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc, gammaln
from scipy.optimize import brentq


@dataclass(frozen=True)
class ChannelFrame:
    """One transmission: codeword, observation y, LLRs r, hard decisions z."""

    codeword: np.ndarray | None
    y: np.ndarray
    r: np.ndarray
    z: np.ndarray
    sigma: float

    def __post_init__(self):
        for arr in (self.codeword, self.y, self.r, self.z):
            if arr is not None:
                arr.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.y)


def sigma_from_ebn0(ebn0_db: float, rate: float) -> float:
    """Noise standard deviation for a given Eb/N0 in dB at the given code rate."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    return (2.0 * rate * 10.0 ** (ebn0_db / 10.0)) ** -0.5


def as_generator(seed) -> np.random.Generator:
    """Accept an int seed, a SeedSequence, or a ready Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def transmit(codeword, sigma: float, seed) -> ChannelFrame:
    """Modulate, add white Gaussian noise, and fill in LLRs and hard decisions.

    Deterministic for a fixed (codeword, sigma, seed).
    """
    c = np.asarray(codeword, dtype=np.uint8)
    rng = as_generator(seed)
    x = 1.0 - 2.0 * c.astype(np.float64)
    y = x + sigma * rng.standard_normal(len(c))
    return frame_from_observations(y, sigma, codeword=c)


def frame_from_observations(y, sigma: float, codeword=None) -> ChannelFrame:
    """Build a frame from hand-injected observations (no noise drawn)."""
    y = np.asarray(y, dtype=np.float64).copy()
    r = 2.0 * y / (sigma * sigma)
    z = (y < 0).astype(np.uint8)
    c = None if codeword is None else np.asarray(codeword, dtype=np.uint8).copy()
    return ChannelFrame(codeword=c, y=y, r=r, z=z, sigma=float(sigma))


# ---------------------------------------------------------------------------
# Reliability (|r|) and magnitude (|y|) distributions.
# ---------------------------------------------------------------------------

_SQRT2 = np.sqrt(2.0)
_SQRT2PI = np.sqrt(2.0 * np.pi)


def reliability_pdf(r_abs, sigma: float):
    """Density of the LLR magnitude |r| under BPSK/AWGN."""
    r_abs = np.asarray(r_abs, dtype=np.float64)
    s2 = sigma * sigma
    a = sigma / (2.0 * _SQRT2PI)
    return a * (
        np.exp(-((s2 * r_abs - 2.0) ** 2) / (8.0 * s2))
        + np.exp(-((s2 * r_abs + 2.0) ** 2) / (8.0 * s2))
    )


def reliability_cdf(r_abs, sigma: float):
    """CDF of the LLR magnitude |r| under BPSK/AWGN."""
    r_abs = np.asarray(r_abs, dtype=np.float64)
    s2 = sigma * sigma
    d = 2.0 * _SQRT2 * sigma
    return 0.5 * erf((s2 * r_abs - 2.0) / d) + 0.5 * erf((s2 * r_abs + 2.0) / d)


def magnitude_pdf(y_abs, sigma: float):
    """Density of the received magnitude |y| under BPSK/AWGN."""
    y_abs = np.asarray(y_abs, dtype=np.float64)
    a = 1.0 / (_SQRT2PI * sigma)
    return a * (
        np.exp(-((y_abs - 1.0) ** 2) / (2.0 * sigma * sigma))
        + np.exp(-((y_abs + 1.0) ** 2) / (2.0 * sigma * sigma))
    )


def magnitude_cdf(y_abs, sigma: float):
    """CDF of the received magnitude |y| under BPSK/AWGN."""
    y_abs = np.asarray(y_abs, dtype=np.float64)
    d = _SQRT2 * sigma
    return 0.5 * erf((y_abs - 1.0) / d) + 0.5 * erf((y_abs + 1.0) / d)


def raw_bit_error_rate(sigma: float) -> float:
    """Uncoded hard-decision error probability Q(1/sigma)."""
    return 0.5 * erfc(1.0 / (sigma * _SQRT2))


def quantile_alpha(n: int, k: int, delta: int, sigma: float) -> float:
    """The reliability level below which a fraction (n-k-delta)/n of |r| falls.

    Found by bracketed root search on the |r| CDF to within 1e-10.
    """
    if not 0 <= delta <= n - k:
        raise ValueError(f"need 0 <= delta <= n - k, got delta = {delta}")
    target = (n - k - delta) / n
    if target <= 0.0:
        return 0.0
    hi = 4.0 / (sigma * sigma) + 4.0 / sigma
    while reliability_cdf(hi, sigma) < target:
        hi *= 2.0
    return float(brentq(lambda t: reliability_cdf(t, sigma) - target, 0.0, hi, xtol=1e-10))


def order_statistic_pdf(i: int, n: int, sigma: float, y: float) -> float:
    """Density of the i-th smallest of n i.i.d. received magnitudes |y|.

    Evaluated in log space to keep the binomial factor finite for large n.
    This is an analysis utility: after the rank-constrained permutation the
    sorted reliabilities are only approximately order statistics, so the
    decoder itself never consumes this quantity.
    """
    if not 1 <= i <= n:
        raise ValueError(f"order statistic index {i} out of range 1..{n}")
    if y < 0:
        raise ValueError("magnitude must be nonnegative")
    f = float(magnitude_pdf(y, sigma))
    if f <= 0.0:
        return 0.0
    big_f = float(magnitude_cdf(y, sigma))
    big_f = min(max(big_f, 0.0), 1.0)
    log_comb = gammaln(n + 1) - gammaln(i) - gammaln(n - i + 1)
    with np.errstate(divide="ignore"):
        log_term = (i - 1) * np.log(big_f) + (n - i) * np.log1p(-big_f)
    if not np.isfinite(log_term):
        return 0.0
    return float(np.exp(log_comb + log_term) * f)
