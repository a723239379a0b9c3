"""
Dense GF(2) linear algebra on word-packed bit matrices.

Rows are stored least-significant-bit-first in 64-bit words so that row
operations (XOR, AND, popcount) vectorize with numpy.  Dense storage is
the right trade-off here: block lengths stay in the hundreds-to-thousands
range and the elimination inner loop is a handful of word XORs per row.

All container types are immutable after construction and safe to share
across processes.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, ParseError, RankDeficient

_WORD = 64


def _n_words(cols: int) -> int:
    return (cols + _WORD - 1) // _WORD


def pack_bits(bits) -> np.ndarray:
    """Pack a 0/1 vector into little-endian uint64 words."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    n = bits.shape[-1]
    nw = _n_words(n)
    padded = np.zeros(bits.shape[:-1] + (nw * 8,), dtype=np.uint8)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    padded[..., : packed.shape[-1]] = packed
    return padded.view(np.uint64)


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns a uint8 vector of length *n*."""
    return np.unpackbits(
        np.ascontiguousarray(words).view(np.uint8), axis=-1, count=n, bitorder="little"
    )


def parity_rows(words: np.ndarray, v_words: np.ndarray) -> np.ndarray:
    """Per-row parity of ``words AND v_words`` (i.e. the GF(2) product M v)."""
    return (np.bitwise_count(words & v_words).sum(axis=1) & 1).astype(np.uint8)


class BitMatrix:
    """An immutable dense binary matrix with word-packed rows.

    Attributes:
        rows: Number of rows (>= 1).
        cols: Number of columns (>= 1).
        words: uint64 array of shape (rows, n_words); padding bits beyond
            `cols` are kept zero so word-wise equality is well defined.
    """

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        if rows < 1 or cols < 1:
            raise DimensionMismatch(f"matrix shape ({rows}, {cols}) is degenerate")
        if words.shape != (rows, _n_words(cols)):
            raise DimensionMismatch("word array does not match the declared shape")
        words = np.ascontiguousarray(words, dtype=np.uint64)
        pad = _n_words(cols) * _WORD - cols
        if pad:
            words = words.copy()
            words[:, -1] &= np.uint64((1 << (_WORD - pad)) - 1)
        words.flags.writeable = False
        self.rows = rows
        self.cols = cols
        self.words = words

    @classmethod
    def from_dense(cls, array) -> "BitMatrix":
        dense = np.atleast_2d(np.asarray(array, dtype=np.uint8) & 1)
        return cls(dense.shape[0], dense.shape[1], pack_bits(dense))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    def to_dense(self) -> np.ndarray:
        return unpack_bits(self.words, self.cols)

    def get(self, r: int, c: int) -> int:
        return int(self.words[r, c >> 6] >> np.uint64(c & 63)) & 1

    def column_ints(self) -> list[int]:
        """Each column as a Python int whose bit t is the entry in row t."""
        packed = np.packbits(self.to_dense().T, axis=1, bitorder="little")
        return [int.from_bytes(row.tobytes(), "little") for row in packed]

    def permute_cols(self, perm: "Permutation") -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense()[:, perm.map])

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense()[r0:r1, c0:c1])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self):  # pragma: no cover - containers of matrices unused
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


@dataclass(frozen=True)
class Permutation:
    """A column/position permutation; ``applied[i] = original[map[i]]``."""

    map: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.map, dtype=np.int64)
        if sorted(m.tolist()) != list(range(len(m))):
            raise DimensionMismatch("permutation map is not a bijection")
        m.flags.writeable = False
        object.__setattr__(self, "map", m)

    def __len__(self) -> int:
        return len(self.map)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v)[self.map]

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.map)
        inv[self.map] = np.arange(len(self.map))
        return Permutation(inv)


def rank(m: BitMatrix) -> int:
    """GF(2) rank; the input is not modified."""
    words = m.words.copy()
    r = 0
    for c in range(m.cols):
        w, b = divmod(c, _WORD)
        col = (words[r:, w] >> np.uint64(b)) & np.uint64(1)
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        below = r + 1 + np.nonzero((words[r + 1 :, w] >> np.uint64(b)) & np.uint64(1))[0]
        if below.size:
            words[below] ^= words[r]
        r += 1
        if r == m.rows:
            break
    return r


def eliminate_block(m: BitMatrix, left_width: int) -> BitMatrix:
    """Row-reduce so the left block becomes (identity over zeros).

    Applies invertible row operations only, so the row space is preserved.
    Requires the leftmost `left_width` columns to have rank `left_width`.

    Raises:
        RankDeficient: if the left block cannot be completed to an identity.
    """
    if left_width > m.rows:
        raise RankDeficient(
            f"left block of width {left_width} cannot have full column rank "
            f"with only {m.rows} rows"
        )
    words = m.words.copy()
    for j in range(left_width):
        w, b = divmod(j, _WORD)
        col = (words[j:, w] >> np.uint64(b)) & np.uint64(1)
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            raise RankDeficient(f"left block is rank deficient at column {j}")
        p = j + int(nz[0])
        if p != j:
            words[[j, p]] = words[[p, j]]
        col = (words[:, w] >> np.uint64(b)) & np.uint64(1)
        col[j] = 0
        others = np.nonzero(col)[0]
        if others.size:
            words[others] ^= words[j]
    return BitMatrix(m.rows, m.cols, words)


def syndrome(m: BitMatrix, v) -> np.ndarray:
    """The GF(2) product v M^T as a uint8 vector of length rows(m)."""
    v = np.asarray(v, dtype=np.uint8)
    if v.shape != (m.cols,):
        raise DimensionMismatch(f"vector length {v.shape} != {m.cols} columns")
    return parity_rows(m.words, pack_bits(v))


def nullspace_basis(m: BitMatrix) -> np.ndarray:
    """A basis of {v : M v^T = 0}, one vector per row (may be empty)."""
    dense = m.to_dense()
    rows, cols = dense.shape
    work = dense.copy()
    pivots = []
    r = 0
    for c in range(cols):
        nz = np.nonzero(work[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        others = np.nonzero(work[:, c])[0]
        for o in others:
            if o != r:
                work[o] ^= work[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for pr, pc in enumerate(pivots):
            basis[i, pc] = work[pr, fc]
    return basis


@dataclass(frozen=True)
class LinearCode:
    """A binary linear [n, k] code given by a full-row-rank parity check matrix."""

    n: int
    k: int
    h: BitMatrix

    def __post_init__(self):
        if not 0 < self.k < self.n:
            raise DimensionMismatch(f"need 0 < k < n, got (n, k) = ({self.n}, {self.k})")
        if (self.h.rows, self.h.cols) != (self.n - self.k, self.n):
            raise DimensionMismatch(
                f"check matrix shape {(self.h.rows, self.h.cols)} != "
                f"{(self.n - self.k, self.n)}"
            )
        if rank(self.h) != self.n - self.k:
            raise RankDeficient("parity check matrix is not full row rank")

    @property
    def rate(self) -> float:
        return self.k / self.n


def enumerate_codewords(code: LinearCode) -> np.ndarray:
    """All 2^k codewords as a (2^k, n) uint8 array.  Guarded to k <= 20."""
    if code.k > 20:
        raise ValueError("codeword enumeration is limited to k <= 20")
    basis = nullspace_basis(code.h)
    assert basis.shape[0] == code.k
    out = np.zeros((1 << code.k, code.n), dtype=np.uint8)
    for i in range(code.k):
        step = 1 << i
        out[step : 2 * step] = out[:step] ^ basis[i]
    return out


def random_code(n: int, k: int, seed: int) -> LinearCode:
    """A code with an i.i.d.-uniform check matrix, resampled until full rank.

    Deterministic for a fixed (n, k, seed); the failure probability per draw
    is about 2^-(k+1), so resampling terminates almost immediately.
    """
    if not 0 < k < n:
        raise DimensionMismatch(f"need 0 < k < n, got (n, k) = ({n}, {k})")
    rng = np.random.default_rng(seed)
    while True:
        h = BitMatrix.from_dense(rng.integers(0, 2, size=(n - k, n), dtype=np.uint8))
        if rank(h) == n - k:
            return LinearCode(n, k, h)


def load_alist(text: str) -> LinearCode:
    """Parse a parity check matrix in the standard alist interchange format.

    Layout: header ``n m``, the two maximum degrees, n column degrees,
    m row degrees, then per-column and per-row 1-based index lists.  Both
    the unpadded and the zero-padded index-list conventions are accepted.

    Raises:
        ParseError: on malformed input.
        RankDeficient: if the matrix is not full row rank.
    """
    try:
        tokens = [int(t) for t in text.split()]
    except ValueError as exc:
        raise ParseError(f"non-integer token in alist input: {exc}") from None
    if len(tokens) < 4:
        raise ParseError("alist input is truncated before the degree lists")
    pos = 0

    def take(count: int) -> list[int]:
        nonlocal pos
        if pos + count > len(tokens):
            raise ParseError("alist input ended unexpectedly")
        out = tokens[pos : pos + count]
        pos += count
        return out

    n, m = take(2)
    if n < 2 or m < 1 or m >= n:
        raise ParseError(f"alist header (n, m) = ({n}, {m}) is not a valid code shape")
    max_col, max_row = take(2)
    col_deg = take(n)
    row_deg = take(m)
    if any(d < 0 or d > m for d in col_deg) or any(d < 0 or d > n for d in row_deg):
        raise ParseError("alist degree out of range")
    if sum(col_deg) != sum(row_deg):
        raise ParseError("alist column and row degree sums disagree")
    remaining = len(tokens) - pos
    if remaining == sum(col_deg) + sum(row_deg):
        padded = False
    elif remaining == n * max_col + m * max_row:
        padded = True
    else:
        raise ParseError("alist index lists have unexpected length")

    dense = np.zeros((m, n), dtype=np.uint8)
    for c in range(n):
        entries = take(max_col if padded else col_deg[c])
        live = [e for e in entries if e != 0]
        if len(live) != col_deg[c]:
            raise ParseError(f"column {c + 1} lists {len(live)} entries, degree says {col_deg[c]}")
        for e in live:
            if not 1 <= e <= m:
                raise ParseError(f"column {c + 1} row index {e} out of range 1..{m}")
            dense[e - 1, c] = 1
    for r in range(m):
        entries = take(max_row if padded else row_deg[r])
        live = sorted(e for e in entries if e != 0)
        if len(live) != row_deg[r]:
            raise ParseError(f"row {r + 1} lists {len(live)} entries, degree says {row_deg[r]}")
        for e in live:
            if not 1 <= e <= n:
                raise ParseError(f"row {r + 1} column index {e} out of range 1..{n}")
        if live != sorted(np.nonzero(dense[r])[0] + 1):
            raise ParseError(f"row {r + 1} index list disagrees with the column lists")
    return LinearCode(n, n - m, BitMatrix.from_dense(dense))


def save_alist(code: LinearCode) -> str:
    """Serialize the parity check matrix in unpadded alist form."""
    dense = code.h.to_dense()
    m, n = dense.shape
    col_idx = [list(np.nonzero(dense[:, c])[0] + 1) for c in range(n)]
    row_idx = [list(np.nonzero(dense[r])[0] + 1) for r in range(m)]
    out = io.StringIO()
    out.write(f"{n} {m}\n")
    out.write(f"{max(map(len, col_idx))} {max(map(len, row_idx))}\n")
    out.write(" ".join(str(len(c)) for c in col_idx) + "\n")
    out.write(" ".join(str(len(r)) for r in row_idx) + "\n")
    for entries in col_idx + row_idx:
        out.write(" ".join(map(str, entries)) + "\n")
    return out.getvalue()
