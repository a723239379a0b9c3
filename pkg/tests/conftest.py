"""Shared fixtures and brute-force oracles used across the suite."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from lcosd import BitMatrix, LinearCode, enumerate_codewords

# Parity check matrix of the length-7 Hamming code, in the column order used
# by the worked trellis example (syndrome of z = [1,0,0,1,0,0,0] is [1,0,1]).
HAMMING_H = np.array(
    [
        [1, 0, 1, 0, 1, 0, 1],
        [0, 1, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ],
    dtype=np.uint8,
)

EXAMPLE_LLRS = np.array([-2.0, 3.0, 4.0, -6.0, 7.0, 10.0, 14.0])


@pytest.fixture(scope="session")
def hamming_code() -> LinearCode:
    return LinearCode(7, 4, BitMatrix.from_dense(HAMMING_H))


@pytest.fixture(scope="session")
def hamming_codewords(hamming_code) -> np.ndarray:
    return enumerate_codewords(hamming_code)


def all_vectors(n: int) -> np.ndarray:
    """All 2^n binary vectors, one per row."""
    out = np.zeros((1 << n, n), dtype=np.uint8)
    for i in range(n):
        step = 1 << i
        out[step : 2 * step] = out[:step]
        out[step : 2 * step, i] = 1
    return out


def brute_force_coset(p: np.ndarray, s_end: np.ndarray, r_abs: np.ndarray):
    """All patterns e with e P^T = s_end, sorted by soft weight.

    Returns (sorted weights, list of patterns in that order).
    """
    n = p.shape[1]
    vecs = all_vectors(n)
    ok = np.all((vecs @ p.T) % 2 == s_end, axis=1)
    members = vecs[ok]
    weights = members @ np.abs(r_abs)
    order = np.argsort(weights, kind="stable")
    return weights[order], members[order]


def exhaustive_ml_weight(codewords: np.ndarray, frame) -> float:
    """Soft weight of the best test error pattern over all codewords."""
    teps = codewords ^ frame.z
    return float(np.min(teps @ np.abs(frame.r)))


def row_space_set(dense: np.ndarray) -> frozenset:
    """Every GF(2) combination of the rows, as a set of byte strings."""
    rows, _ = dense.shape
    out = set()
    for combo in itertools.product([0, 1], repeat=rows):
        v = np.zeros(dense.shape[1], dtype=np.uint8)
        for i, c in enumerate(combo):
            if c:
                v ^= dense[i]
        out.add(v.tobytes())
    return frozenset(out)
