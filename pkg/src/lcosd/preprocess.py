"""
Per-frame decoding context: the reliability-sorting permutation with its rank
repair, block elimination of the permuted check matrix, parity splits, and
soft-weight primitives.

The permutation starts from a stable ascending sort of the reliabilities and
then greedily swaps forward columns from the reliable zone until the first
(n - k - delta) columns of the permuted check matrix are linearly
independent.  The greedy repair keeps the left reliability sum small but does
not globally minimize it, and that is deliberate: every calibrated statistic
downstream is defined relative to exactly this greedy procedure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelFrame
from .errors import DimensionMismatch, RankDeficient
from .gf2 import BitMatrix, LinearCode, Permutation, eliminate_block, syndrome


@dataclass(frozen=True)
class Candidate:
    """A test error pattern over the reliable part, with soft weight and rank."""

    pattern: np.ndarray
    weight: float
    rank: int


@dataclass(frozen=True)
class PreprocessedInstance:
    """Everything the search loop needs, computed once per frame.

    The degenerate cases keep exact semantics: `p1` is None when
    delta = n - k (empty left block; the whole permuted check matrix acts as
    the local constraint) and `p2` is None when delta = 0 (no local
    constraint; classic ordered-statistics search order).
    """

    pi: Permutation
    p1: BitMatrix | None
    p2: BitMatrix | None
    r_perm: np.ndarray
    z_perm: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    left_width: int
    right_width: int

    def __post_init__(self):
        for arr in (self.r_perm, self.z_perm, self.s1, self.s2):
            arr.flags.writeable = False

    @property
    def r_abs_left(self) -> np.ndarray:
        return np.abs(self.r_perm[: self.left_width])

    @property
    def r_abs_right(self) -> np.ndarray:
        return np.abs(self.r_perm[self.left_width :])


def soft_weight(e, r_abs) -> float:
    """Inner product <e, |r|>: the log-likelihood penalty of flipping e's support."""
    e = np.asarray(e, dtype=np.float64)
    r_abs = np.asarray(r_abs, dtype=np.float64)
    if e.shape != r_abs.shape:
        raise DimensionMismatch(f"pattern length {e.shape} != reliability length {r_abs.shape}")
    return float(e @ np.abs(r_abs))


def get_permutation(h: BitMatrix, r_abs, delta: int) -> Permutation:
    """Reliability sort with greedy rank repair of the left block.

    Ties in |r| are broken by original index (stable sort).  A column that
    leaves the left block rank deficient is swapped with successive columns
    from position n - k - delta + 1 onward until independence is restored.

    Raises:
        RankDeficient: if fewer than (n - k - delta) independent columns exist.
    """
    r_abs = np.abs(np.asarray(r_abs, dtype=np.float64))
    n = h.cols
    if len(r_abs) != n:
        raise DimensionMismatch(f"reliability length {len(r_abs)} != {n} columns")
    if not 0 <= delta <= h.rows:
        raise ValueError(f"need 0 <= delta <= {h.rows}, got {delta}")
    left_width = h.rows - delta
    perm = list(np.argsort(r_abs, kind="stable"))
    if left_width == 0:
        return Permutation(np.array(perm))
    cols = h.column_ints()
    pivots: dict[int, int] = {}
    swap_from = left_width
    for i in range(left_width):
        while True:
            acc = cols[perm[i]]
            while acc:
                lead = acc.bit_length() - 1
                piv = pivots.get(lead)
                if piv is None:
                    break
                acc ^= piv
            if acc:
                pivots[acc.bit_length() - 1] = acc
                break
            if swap_from >= n:
                raise RankDeficient("check matrix has rank below the left block width")
            perm[i], perm[swap_from] = perm[swap_from], perm[i]
            swap_from += 1
    return Permutation(np.array(perm))


def preprocess(code: LinearCode, frame: ChannelFrame, delta: int) -> PreprocessedInstance:
    """Build the permuted/eliminated context for one frame."""
    if not 0 <= delta <= code.n - code.k:
        raise ValueError(f"need 0 <= delta <= n - k = {code.n - code.k}, got {delta}")
    left_width = code.n - code.k - delta
    pi = get_permutation(code.h, np.abs(frame.r), delta)
    h_perm = code.h.permute_cols(pi)
    if left_width > 0:
        h_tilde = eliminate_block(h_perm, left_width)
        p1 = h_tilde.submatrix(0, left_width, left_width, code.n)
    else:
        h_tilde = h_perm
        p1 = None
    if delta > 0:
        p2 = h_tilde.submatrix(left_width, code.n - code.k, left_width, code.n)
    else:
        p2 = None
    z_perm = pi.apply(frame.z)
    r_perm = pi.apply(frame.r)
    full_syndrome = syndrome(h_tilde, z_perm)
    return PreprocessedInstance(
        pi=pi,
        p1=p1,
        p2=p2,
        r_perm=r_perm,
        z_perm=z_perm,
        s1=full_syndrome[:left_width],
        s2=full_syndrome[left_width:],
        left_width=left_width,
        right_width=code.n - left_width,
    )


def solve_left_part(inst: PreprocessedInstance, e_r) -> np.ndarray:
    """The unique left part forced by a reliable-part pattern (GF(2) solve)."""
    from .gf2 import pack_bits, parity_rows

    e_r = np.asarray(e_r, dtype=np.uint8)
    if e_r.shape != (inst.right_width,):
        raise DimensionMismatch(
            f"pattern length {e_r.shape} != right width {inst.right_width}"
        )
    if inst.left_width == 0:
        return np.zeros(0, dtype=np.uint8)
    return inst.s1 ^ parity_rows(inst.p1.words, pack_bits(e_r))


def reconstruct(inst: PreprocessedInstance, e_r) -> tuple[np.ndarray, np.ndarray]:
    """Complete a reliable-part pattern to a full pattern and test word.

    Returns (tep, word) in original channel order.  The word is a codeword
    whenever e_r satisfies the local constraint e_r P2^T = s2.
    """
    e_l = solve_left_part(inst, e_r)
    e_perm = np.concatenate([e_l, np.asarray(e_r, dtype=np.uint8)])
    n = len(e_perm)
    tep = np.zeros(n, dtype=np.uint8)
    tep[inst.pi.map] = e_perm
    z = np.zeros(n, dtype=np.uint8)
    z[inst.pi.map] = inst.z_perm
    return tep, z ^ tep
