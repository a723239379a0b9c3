"""
Best-first enumeration of test error patterns in soft-weight order.

`FptSession` walks a spanning tree of the precedence partial order on binary
vectors: the root is the all-zero pattern, one child sets the leftmost
position, the other shifts the leftmost one to the right.  Because the tree
respects precedence and the reliability vector is non-decreasing, popping a
min-weight frontier entry always yields the globally next-lightest pattern,
and the frontier grows by at most two entries per pop.

`TfptSession` adds linear constraints by meet-in-the-middle: the positions
are split into two halves, each enumerated by its own tree, and half-patterns
whose partial syndromes add up to the target are merged.  Half streams are
advanced lazily ("calculate when requested"): a merged pair is emitted only
once its total weight is provably minimal, the proof being that every pair
involving a not-yet-generated half-pattern weighs at least that half's next
emission.

Patterns are held as plain integer bit masks until emission; frontier entries
carry (weight, mask) only.
"""

from __future__ import annotations

import heapq

import numpy as np

from .errors import DimensionMismatch
from .gf2 import BitMatrix
from .preprocess import Candidate

_INF = float("inf")


def precedes(e, e2) -> bool:
    """Whether e precedes e2 in the order that soft weights must respect.

    Equivalent to: for every j, the suffix support count of e from position j
    on is at most that of e2.  One reverse scan.
    """
    e = np.asarray(e, dtype=np.uint8)
    e2 = np.asarray(e2, dtype=np.uint8)
    if e.shape != e2.shape:
        raise DimensionMismatch(f"pattern lengths differ: {e.shape} vs {e2.shape}")
    c1 = 0
    c2 = 0
    for i in range(len(e) - 1, -1, -1):
        c1 += int(e[i])
        c2 += int(e2[i])
        if c1 > c2:
            return False
    return True


def _mask_to_pattern(mask: int, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.uint8)
    i = 0
    while mask:
        if mask & 1:
            out[i] = 1
        mask >>= 1
        i += 1
    return out


class FptSession:
    """Unconstrained enumeration of F_2^N in non-decreasing soft weight.

    Requires a non-decreasing reliability vector.  Emits every pattern
    exactly once; returns None after all 2^N patterns are out.  Ties are
    broken by the packed integer value of the pattern.
    """

    def __init__(self, r_abs):
        r_abs = np.asarray(r_abs, dtype=np.float64)
        if np.any(r_abs < 0):
            raise ValueError("reliabilities must be nonnegative")
        if np.any(np.diff(r_abs) < 0):
            raise ValueError("reliability vector must be non-decreasing")
        self.length = len(r_abs)
        self._w = r_abs.tolist()
        self._frontier: list[tuple[float, int]] = [(0.0, 0)]
        self.emitted = 0

    def peek_weight(self) -> float:
        return self._frontier[0][0] if self._frontier else _INF

    def _push_children(self, weight: float, mask: int):
        w = self._w
        if self.length and not mask & 1:
            heapq.heappush(self._frontier, (weight + w[0], mask | 1))
        if mask:
            m = (mask & -mask).bit_length() - 1
            if m + 1 < self.length and not (mask >> (m + 1)) & 1:
                heapq.heappush(
                    self._frontier,
                    (weight - w[m] + w[m + 1], (mask ^ (1 << m)) | (1 << (m + 1))),
                )

    def next_candidate(self) -> Candidate | None:
        if not self._frontier:
            return None
        weight, mask = heapq.heappop(self._frontier)
        self._push_children(weight, mask)
        self.emitted += 1
        return Candidate(_mask_to_pattern(mask, self.length), weight, self.emitted)

    @property
    def frontier_size(self) -> int:
        return len(self._frontier)


class _HalfStream:
    """FPT over one half of the positions, tracking partial syndromes."""

    __slots__ = ("w", "cols", "length", "heap")

    def __init__(self, weights: list[float], cols: list[int]):
        self.w = weights
        self.cols = cols
        self.length = len(weights)
        self.heap: list[tuple[float, int, int]] = [(0.0, 0, 0)]

    def peek(self) -> float:
        return self.heap[0][0] if self.heap else _INF

    def pop(self) -> tuple[float, int, int]:
        weight, mask, syn = heapq.heappop(self.heap)
        w, cols = self.w, self.cols
        if self.length and not mask & 1:
            heapq.heappush(self.heap, (weight + w[0], mask | 1, syn ^ cols[0]))
        if mask:
            m = (mask & -mask).bit_length() - 1
            if m + 1 < self.length and not (mask >> (m + 1)) & 1:
                heapq.heappush(
                    self.heap,
                    (
                        weight - w[m] + w[m + 1],
                        (mask ^ (1 << m)) | (1 << (m + 1)),
                        syn ^ cols[m] ^ cols[m + 1],
                    ),
                )
        return weight, mask, syn


class TfptSession:
    """Constrained enumeration: {e : e P^T = s_end} in soft-weight order.

    Same contract as `SlvaSession`; the weight sequences of the two are
    identical.  Positions are split by reliability into a lower half (part A)
    and upper half (part B), as balanced as possible.  Emitted half-patterns
    are appended to per-partial-syndrome buckets; each bucket pair maintains
    a best-first frontier over index pairs, seeded at (0, 0) and extended by
    (i+1, j) on every pop plus (i, j+1) when i = 0, which generates every
    pair exactly once without a seen-set.
    """

    def __init__(self, p: BitMatrix | None, r_abs, s_end):
        r_abs = np.abs(np.asarray(r_abs, dtype=np.float64))
        if p is None:
            n_checks, length = 0, len(r_abs)
            cols = [0] * length
        else:
            n_checks, length = p.rows, p.cols
            if length != len(r_abs):
                raise DimensionMismatch(
                    f"reliability length {len(r_abs)} != {length} columns"
                )
            cols = p.column_ints()
        s_end = np.asarray(s_end, dtype=np.uint8)
        if s_end.shape != (n_checks,):
            raise DimensionMismatch(
                f"ending state length {s_end.shape} != {n_checks} check rows"
            )
        self.length = length
        self.n_checks = n_checks
        self.s_end = int(sum(int(b) << i for i, b in enumerate(s_end)))
        order = np.argsort(r_abs, kind="stable")
        n_a = (length + 1) // 2
        self._pos_a = order[:n_a].tolist()
        self._pos_b = order[n_a:].tolist()
        self._stream_a = _HalfStream(
            [float(r_abs[i]) for i in self._pos_a], [cols[i] for i in self._pos_a]
        )
        self._stream_b = _HalfStream(
            [float(r_abs[i]) for i in self._pos_b], [cols[i] for i in self._pos_b]
        )
        self._bucket_a: dict[int, list[tuple[float, int]]] = {}
        self._bucket_b: dict[int, list[tuple[float, int]]] = {}
        self._pending_a: dict[int, list[int]] = {}
        self._pending_b: dict[int, list[int]] = {}
        self._seeded: set[int] = set()
        self._pairs: list[tuple[float, float, int, int, int, int, int]] = []
        self.emitted = 0

    def _push_pair(self, syn_a: int, i: int, j: int):
        wa, ma = self._bucket_a[syn_a][i]
        wb, mb = self._bucket_b[syn_a ^ self.s_end][j]
        heapq.heappush(self._pairs, (wa + wb, wa, ma, mb, syn_a, i, j))

    def _advance_a(self):
        weight, mask, syn = self._stream_a.pop()
        bucket = self._bucket_a.setdefault(syn, [])
        idx = len(bucket)
        bucket.append((weight, mask))
        if idx == 0:
            partner = self._bucket_b.get(syn ^ self.s_end)
            if partner and syn not in self._seeded:
                self._seeded.add(syn)
                self._push_pair(syn, 0, 0)
        for j in self._pending_a.pop(syn, []):
            self._push_pair(syn, idx, j)

    def _advance_b(self):
        weight, mask, syn = self._stream_b.pop()
        bucket = self._bucket_b.setdefault(syn, [])
        idx = len(bucket)
        bucket.append((weight, mask))
        syn_a = syn ^ self.s_end
        if idx == 0:
            partner = self._bucket_a.get(syn_a)
            if partner and syn_a not in self._seeded:
                self._seeded.add(syn_a)
                self._push_pair(syn_a, 0, 0)
        for i in self._pending_b.pop(syn, []):
            self._push_pair(syn_a, i, idx)

    def _merge(self, mask_a: int, mask_b: int) -> np.ndarray:
        pattern = np.zeros(self.length, dtype=np.uint8)
        for positions, mask in ((self._pos_a, mask_a), (self._pos_b, mask_b)):
            i = 0
            while mask:
                if mask & 1:
                    pattern[positions[i]] = 1
                mask >>= 1
                i += 1
        return pattern

    def next_candidate(self) -> Candidate | None:
        while True:
            bound = min(self._stream_a.peek(), self._stream_b.peek())
            if self._pairs and self._pairs[0][0] <= bound:
                total, _, ma, mb, syn_a, i, j = heapq.heappop(self._pairs)
                syn_b = syn_a ^ self.s_end
                if i + 1 < len(self._bucket_a[syn_a]):
                    self._push_pair(syn_a, i + 1, j)
                else:
                    self._pending_a.setdefault(syn_a, []).append(j)
                if i == 0:
                    if j + 1 < len(self._bucket_b[syn_b]):
                        self._push_pair(syn_a, 0, j + 1)
                    else:
                        self._pending_b.setdefault(syn_b, []).append(0)
                self.emitted += 1
                return Candidate(self._merge(ma, mb), total, self.emitted)
            if bound == _INF:
                return None
            if self._stream_a.peek() <= self._stream_b.peek():
                self._advance_a()
            else:
                self._advance_b()
