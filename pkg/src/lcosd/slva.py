"""
Serial list Viterbi algorithm over the syndrome trellis of a binary linear
code: emits the constrained test error patterns in non-decreasing soft
weight, one per request.

The trellis has one section per code position; the state after i sections is
the partial syndrome of the first i bits.  The first request runs a full
Viterbi sweep (vectorized over the state space when it fits in memory); each
later request only extends states on the previously returned path, so it
costs O(N) dictionary operations.

The reference recursion keeps, per trellis vertex, an ordered list of best
paths and grows it on demand by comparing one new candidate from each
predecessor.  Recursing N levels deep per request is replaced here by an
explicit worklist with identical semantics.  Tie-breaking between equal-cost
incoming branches prefers bit 0; unreachable states carry +inf cost.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch
from .gf2 import BitMatrix
from .preprocess import Candidate

_INF = float("inf")

# Ceiling on (levels+1) * states for the vectorized first sweep; beyond it the
# sweep itself falls back to the on-demand store.
_DENSE_LIMIT = 1 << 22


class _Node:
    """Ordered best-path list for one (level, state) vertex."""

    __slots__ = ("costs", "bits", "ranks", "n_zero", "exhausted")

    def __init__(self):
        self.costs: list[float] = []
        self.bits: list[int] = []
        self.ranks: list[int] = []
        self.n_zero = 0
        self.exhausted = False


class SlvaSession:
    """On-demand enumeration of {e : e P^T = s_end} in soft-weight order.

    With zero check rows every pattern is valid and the session degenerates
    to unconstrained enumeration.  After all 2^(N - rank(P)) coset members
    have been emitted (or immediately, if s_end is inconsistent),
    `next_candidate` returns None.
    """

    def __init__(self, p: BitMatrix | None, r_abs, s_end, dense: bool | None = None):
        r_abs = np.abs(np.asarray(r_abs, dtype=np.float64))
        if p is None:
            n_checks, length = 0, len(r_abs)
            self._p_cols = [0] * length
        else:
            n_checks, length = p.rows, p.cols
            if length != len(r_abs):
                raise DimensionMismatch(
                    f"reliability length {len(r_abs)} != {length} columns"
                )
            self._p_cols = p.column_ints()
        s_end = np.asarray(s_end, dtype=np.uint8)
        if s_end.shape != (n_checks,):
            raise DimensionMismatch(
                f"ending state length {s_end.shape} != {n_checks} check rows"
            )
        self.length = length
        self.n_checks = n_checks
        self.s_end = int(sum(int(b) << i for i, b in enumerate(s_end)))
        self._r = r_abs.tolist()
        self._nodes: dict[int, _Node] = {}
        self._states = 1 << n_checks
        if dense is None:
            dense = (length + 1) * self._states <= _DENSE_LIMIT
        self._dense = dense
        self._cost = None
        self._bit = None
        self.emitted = 0
        self.entries_created = 0

    # -- first sweep --------------------------------------------------------

    def _sweep(self):
        S = self._states
        cost = np.full((self.length + 1, S), _INF)
        cost[0, 0] = 0.0
        bit = np.zeros((self.length, S), dtype=np.uint8)
        idx = np.arange(S)
        for i in range(1, self.length + 1):
            prev = cost[i - 1]
            flipped = prev[idx ^ self._p_cols[i - 1]] + self._r[i - 1]
            take1 = flipped < prev
            cost[i] = np.where(take1, flipped, prev)
            bit[i - 1] = take1
        self._cost = cost
        self._bit = bit

    # -- lazy store ---------------------------------------------------------

    def _key(self, level: int, state: int) -> int:
        return (level << self.n_checks) | state

    def _make_node(self, level: int, state: int) -> _Node:
        node = _Node()
        if self._cost is not None:
            c = float(self._cost[level, state])
            if np.isfinite(c):
                node.costs.append(c)
                b = int(self._bit[level - 1, state])
                node.bits.append(b)
                node.ranks.append(1)
                node.n_zero = 1 - b
                self.entries_created += 1
            else:
                node.exhausted = True
        self._nodes[self._key(level, state)] = node
        return node

    def _child_cost(self, level: int, state: int, rank: int):
        """Cost of the rank-th best path into (level, state); None if unresolved."""
        if level == 0:
            return 0.0 if (state == 0 and rank == 1) else _INF
        node = self._nodes.get(self._key(level, state))
        if node is None:
            if rank == 1 and self._cost is not None:
                return float(self._cost[level, state])
            node = self._make_node(level, state)
        if rank <= len(node.costs):
            return node.costs[rank - 1]
        if node.exhausted:
            return _INF
        return None

    def _ensure(self, level: int, state: int, rank: int):
        stack = [(level, state, rank)]
        while stack:
            lv, st, rk = stack[-1]
            if lv == 0:
                stack.pop()
                continue
            node = self._nodes.get(self._key(lv, st))
            if node is None:
                node = self._make_node(lv, st)
            if node.exhausted or len(node.costs) >= rk:
                stack.pop()
                continue
            n0 = node.n_zero
            n1 = len(node.costs) - n0
            col = self._p_cols[lv - 1]
            c0 = self._child_cost(lv - 1, st, n0 + 1)
            if c0 is None:
                stack.append((lv - 1, st, n0 + 1))
                continue
            c1 = self._child_cost(lv - 1, st ^ col, n1 + 1)
            if c1 is None:
                stack.append((lv - 1, st ^ col, n1 + 1))
                continue
            if c1 < _INF:
                c1 += self._r[lv - 1]
            if c0 <= c1:
                if c0 == _INF:
                    node.exhausted = True
                    continue
                node.costs.append(c0)
                node.bits.append(0)
                node.ranks.append(n0 + 1)
                node.n_zero += 1
            else:
                node.costs.append(c1)
                node.bits.append(1)
                node.ranks.append(n1 + 1)
            self.entries_created += 1

    def _walk_path(self, rank: int) -> np.ndarray:
        pattern = np.zeros(self.length, dtype=np.uint8)
        lv, st, rk = self.length, self.s_end, rank
        while lv > 0:
            node = self._nodes.get(self._key(lv, st))
            if node is None or rk > len(node.costs):
                # rank-1 path that never left the dense sweep
                b = int(self._bit[lv - 1, st])
                nxt = 1
            else:
                b = node.bits[rk - 1]
                nxt = node.ranks[rk - 1]
            if b:
                pattern[lv - 1] = 1
                st ^= self._p_cols[lv - 1]
            rk = nxt
            lv -= 1
        return pattern

    # -- public -------------------------------------------------------------

    def next_candidate(self) -> Candidate | None:
        """The next-lightest constrained pattern, or None when exhausted.

        Must be called sequentially; the rank of the returned candidate is
        the number of calls made so far.
        """
        rank = self.emitted + 1
        if self.length == 0:
            if rank == 1 and self.s_end == 0:
                self.emitted = 1
                return Candidate(np.zeros(0, dtype=np.uint8), 0.0, 1)
            return None
        if self._dense and self._cost is None:
            self._sweep()
        self._ensure(self.length, self.s_end, rank)
        node = self._nodes[self._key(self.length, self.s_end)]
        if rank > len(node.costs):
            return None
        cost = node.costs[rank - 1]
        pattern = self._walk_path(rank)
        self.emitted = rank
        return Candidate(pattern, cost, rank)
