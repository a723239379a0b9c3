"""
The local-constraint ordered-statistics search loop, its stopping rules, and
the maximum-likelihood error counter.

The loop requests reliable-part patterns from a list-generating algorithm in
non-decreasing partial soft weight, completes each to a full test error
pattern, and keeps the lightest.  The moment the best full weight drops to
(or below) the current partial weight, no later candidate can win, so the
output is certified maximum likelihood; this zero-cost check is always
active.  On top of it an approximate-ideal rule may stop earlier: terminate
when best_weight < tau + partial_weight, with tau either recomputed per
frame from the unreliable positions (dynamic), precomputed per SNR by
quadrature (static), or taken from the true error pattern (oracle; test use
only).  The strict "<" is deliberate: boundary equality keeps searching.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .channel import ChannelFrame, quantile_alpha, reliability_pdf
from .errors import MissingTrace
from .gf2 import LinearCode, pack_bits, parity_rows
from .preprocess import preprocess
from .slva import SlvaSession
from .fpt import TfptSession

STOP_ML_CERTIFIED = "ml_certified"
STOP_THRESHOLD = "threshold"
STOP_EXHAUSTED = "exhausted"
STOP_LIST_FULL = "list_full"

STOPPING_RULES = ("trivial", "dai", "sai", "oracle")
LIST_ALGORITHMS = ("slva", "tfpt")


@dataclass(frozen=True)
class DecoderConfig:
    """Search parameters.

    Attributes:
        delta: Constraint degree; 0 recovers plain ordered-statistics
            search order, n - k exhausts the whole code.
        l_max: Maximum number of searches per frame.
        lga: "slva" or "tfpt".
        stopping: "trivial" keeps only the free certification check;
            "dai"/"sai" add the dynamic/static threshold; "oracle" uses the
            true pattern's unreliable-part weight (test only).
        tau: Explicit static threshold; if None under "sai" it is computed
            from the frame's noise level and cached.
        keep_trace: Record (partial, full, best-so-far) weights per step.
    """

    delta: int
    l_max: int
    lga: str = "slva"
    stopping: str = "trivial"
    tau: float | None = None
    keep_trace: bool = False

    def __post_init__(self):
        if self.l_max < 1:
            raise ValueError("l_max must be at least 1")
        if self.lga not in LIST_ALGORITHMS:
            raise ValueError(f"unknown list algorithm {self.lga!r}")
        if self.stopping not in STOPPING_RULES:
            raise ValueError(f"unknown stopping rule {self.stopping!r}")


@dataclass(frozen=True)
class DecodeResult:
    codeword: np.ndarray
    searches: int
    stop_reason: str
    gamma_opt: float
    trace: list[tuple[float, float, float]] | None

    @property
    def ml_certified(self) -> bool:
        """True when the search provably returned a maximum-likelihood word."""
        return self.stop_reason in (STOP_ML_CERTIFIED, STOP_EXHAUSTED)


def tau_dai(r_left_abs) -> float:
    """Expected unreliable-part soft weight of the true pattern, given r.

    Each unreliable position contributes |r| with probability 1/(1+e^|r|).
    """
    r = np.abs(np.asarray(r_left_abs, dtype=np.float64))
    # r e^-r / (1 + e^-r) never overflows for r >= 0
    ex = np.exp(-r)
    return float(np.sum(r * ex / (1.0 + ex)))


def tau_sai(n: int, k: int, delta: int, sigma: float) -> float:
    """SNR-level approximation of the expected unreliable-part soft weight.

    n times the integral of r/(1+e^r) against the |r| density from 0 to the
    (n-k-delta)-th n-quantile.  Pure function of (n, k, delta, sigma);
    results are cached.
    """
    return _tau_sai_cached(n, k, delta, round(float(sigma), 12))


@lru_cache(maxsize=None)
def _tau_sai_cached(n: int, k: int, delta: int, sigma: float) -> float:
    alpha = quantile_alpha(n, k, delta, sigma)
    if alpha <= 0.0:
        return 0.0
    val, _ = quad(
        lambda r: r / (1.0 + np.exp(r)) * reliability_pdf(r, sigma),
        0.0,
        alpha,
        epsabs=1e-8,
        limit=200,
    )
    return n * float(val)


def _make_session(inst, config: DecoderConfig):
    r_right = inst.r_abs_right
    if config.lga == "slva":
        return SlvaSession(inst.p2, r_right, inst.s2)
    return TfptSession(inst.p2, r_right, inst.s2)


def _resolve_tau(inst, frame, code, config: DecoderConfig) -> float | None:
    if config.stopping == "trivial":
        return None
    if config.stopping == "dai":
        return tau_dai(inst.r_abs_left)
    if config.stopping == "sai":
        if config.tau is not None:
            return config.tau
        return tau_sai(code.n, code.k, config.delta, frame.sigma)
    # oracle: unreliable-part weight of the true pattern
    if frame.codeword is None:
        raise ValueError("oracle stopping requires the frame's transmitted codeword")
    e_true = (frame.z ^ frame.codeword)[inst.pi.map]
    return float(inst.r_abs_left @ e_true[: inst.left_width])


def lc_osd(code: LinearCode, frame: ChannelFrame, config: DecoderConfig) -> DecodeResult:
    """Decode one frame.

    Returns the best test word found, the number of searches spent, and why
    the loop stopped: "ml_certified" (certification check fired),
    "threshold" (approximate-ideal rule fired), "exhausted" (every
    constrained pattern was examined), or "list_full" (budget ran out).
    """
    inst = preprocess(code, frame, config.delta)
    session = _make_session(inst, config)
    tau = _resolve_tau(inst, frame, code, config)

    lw = inst.left_width
    r_abs_perm = np.abs(inst.r_perm)
    r_left = r_abs_perm[:lw]
    p1_words = inst.p1.words if inst.p1 is not None else None
    s1 = inst.s1

    # The permuted hard decision is always a valid pattern (test word 0).
    best_l = inst.z_perm[:lw].copy()
    best_r = inst.z_perm[lw:].copy()
    gamma_opt = float(r_abs_perm @ inst.z_perm)

    trace: list[tuple[float, float, float]] | None = [] if config.keep_trace else None
    stop_reason = STOP_LIST_FULL
    searches = 0

    for _ in range(config.l_max):
        cand = session.next_candidate()
        if cand is None:
            stop_reason = STOP_EXHAUSTED
            break
        searches += 1
        gamma_r = cand.weight
        if lw:
            e_l = s1 ^ parity_rows(p1_words, pack_bits(cand.pattern))
            gamma_full = gamma_r + float(r_left @ e_l)
        else:
            e_l = s1
            gamma_full = gamma_r
        if gamma_full < gamma_opt:
            gamma_opt = gamma_full
            best_l = e_l
            best_r = cand.pattern
        if trace is not None:
            trace.append((gamma_r, gamma_full, gamma_opt))
        if gamma_opt <= gamma_r:
            stop_reason = STOP_ML_CERTIFIED
            break
        if tau is not None and gamma_opt < tau + gamma_r:
            stop_reason = STOP_THRESHOLD
            break

    e_perm = np.concatenate([best_l, best_r])
    n = code.n
    tep = np.zeros(n, dtype=np.uint8)
    tep[inst.pi.map] = e_perm
    codeword = frame.z ^ tep
    return DecodeResult(
        codeword=codeword,
        searches=searches,
        stop_reason=stop_reason,
        gamma_opt=gamma_opt,
        trace=trace,
    )


def delta_gamma(result: DecodeResult, j_star: int) -> float:
    """Per-frame threshold slack above the true unreliable-part weight.

    For the rank j* of the maximum-likelihood word in the trace, returns
    best(j*-1) - partial(j*-1) - unreliable_part(j*); +inf when j* = 1.
    Positive by construction, which is what makes the threshold rules safe.
    """
    if result.trace is None:
        raise MissingTrace("delta_gamma needs a decode run with keep_trace=True")
    if j_star < 1 or j_star > len(result.trace):
        raise ValueError(f"j_star {j_star} outside the trace of length {len(result.trace)}")
    if j_star == 1:
        return float("inf")
    g_r_prev, _, g_opt_prev = result.trace[j_star - 2]
    g_r_star, g_full_star, _ = result.trace[j_star - 1]
    return g_opt_prev - g_r_prev - (g_full_star - g_r_star)


def mld_error_indicator(
    code: LinearCode, delta: int, l_max: int, sent, frame: ChannelFrame
) -> bool:
    """Whether the search found a word strictly more likely than `sent`.

    Averaged over frames this lower-bounds the maximum-likelihood frame
    error rate: whenever it fires, even an exhaustive decoder would not have
    returned the transmitted word.
    """
    sent = np.asarray(sent, dtype=np.uint8)
    result = lc_osd(code, frame, DecoderConfig(delta=delta, l_max=l_max, stopping="trivial"))
    if np.array_equal(result.codeword, sent):
        return False
    gamma_sent = float(np.abs(frame.r) @ (frame.z ^ sent))
    # small margin: weights are float sums taken in different orders
    return result.gamma_opt < gamma_sent - 1e-9
