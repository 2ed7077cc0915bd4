"""Linear algebra over GF(2) on bit-packed rows.

Rows are stored as Python integers: bit ``j`` of a row holds the entry in
column ``j``.  Row addition is XOR.  All objects are immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_CODE_DIMENSION = 24
MAX_DUAL_RANK = 16


class BudgetExceededError(ValueError):
    """An enumeration would exceed its configured size budget."""


class TrivialCodeError(ValueError):
    """The code contains only the zero codeword."""


def _mask(n: int) -> int:
    return (1 << n) - 1


@dataclass(frozen=True)
class Gf2Vector:
    bits: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits outside vector length")

    @classmethod
    def from_iterable(cls, values: Iterable[int]) -> "Gf2Vector":
        bits = 0
        length = 0
        for j, v in enumerate(values):
            v = int(v)
            if v not in (0, 1):
                raise ValueError(f"non-binary entry {v!r} at position {j}")
            bits |= v << j
            length = j + 1
        return cls(bits, length)

    @classmethod
    def from_support(cls, support: Iterable[int], length: int) -> "Gf2Vector":
        bits = 0
        for j in support:
            if not 0 <= j < length:
                raise ValueError(f"index {j} out of range for length {length}")
            bits |= 1 << j
        return cls(bits, length)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    @property
    def support(self) -> tuple[int, ...]:
        return bit_indices(self.bits)

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __xor__(self, other: "Gf2Vector") -> "Gf2Vector":
        if other.length != self.length:
            raise ValueError("length mismatch")
        return Gf2Vector(self.bits ^ other.bits, self.length)

    def dot(self, other: "Gf2Vector") -> int:
        if other.length != self.length:
            raise ValueError("length mismatch")
        return (self.bits & other.bits).bit_count() & 1

    def to_array(self) -> np.ndarray:
        return np.array([(self.bits >> j) & 1 for j in range(self.length)], dtype=np.uint8)

    def __str__(self) -> str:
        return "".join(str((self.bits >> j) & 1) for j in range(self.length))


@dataclass(frozen=True)
class Gf2Matrix:
    num_rows: int
    num_cols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.num_rows:
            raise ValueError("row count does not match num_rows")
        limit = 1 << self.num_cols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError("row has bits beyond num_cols")

    @classmethod
    def from_array(cls, array) -> "Gf2Matrix":
        a = np.asarray(array)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("matrix entries must be 0 or 1")
        m, n = a.shape
        weights = 1 << np.arange(n, dtype=object)
        rows = tuple(int(np.dot(a[i].astype(object), weights)) if n else 0 for i in range(m))
        return cls(m, n, rows)

    @classmethod
    def from_rows(cls, rows: Sequence[int], num_cols: int) -> "Gf2Matrix":
        return cls(len(rows), num_cols, tuple(int(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, m: int, n: int) -> "Gf2Matrix":
        return cls(m, n, (0,) * m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.num_rows, self.num_cols

    def row(self, i: int) -> Gf2Vector:
        return Gf2Vector(self.rows[i], self.num_cols)

    def column(self, j: int) -> Gf2Vector:
        return Gf2Vector(sum(((r >> j) & 1) << i for i, r in enumerate(self.rows)), self.num_rows)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.num_rows, self.num_cols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in bit_indices(r):
                out[i, j] = 1
        return out

    def transpose(self) -> "Gf2Matrix":
        cols = [0] * self.num_cols
        for i, r in enumerate(self.rows):
            for j in bit_indices(r):
                cols[j] |= 1 << i
        return Gf2Matrix(self.num_cols, self.num_rows, tuple(cols))

    def mul_vector(self, v: Gf2Vector) -> Gf2Vector:
        """Return ``M v`` over GF(2)."""
        if v.length != self.num_cols:
            raise ValueError("dimension mismatch")
        bits = 0
        for i, r in enumerate(self.rows):
            bits |= ((r & v.bits).bit_count() & 1) << i
        return Gf2Vector(bits, self.num_rows)

    def __matmul__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.num_cols != other.num_rows:
            raise ValueError("dimension mismatch")
        out = []
        for r in self.rows:
            acc = 0
            for k in bit_indices(r):
                acc ^= other.rows[k]
            out.append(acc)
        return Gf2Matrix(self.num_rows, other.num_cols, tuple(out))

    def is_zero(self) -> bool:
        return not any(self.rows)

    def __str__(self) -> str:
        return "\n".join(str(self.row(i)) for i in range(self.num_rows))


def bit_indices(bits: int) -> tuple[int, ...]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return tuple(out)


def rref(M: Gf2Matrix) -> tuple[Gf2Matrix, int, tuple[int, ...]]:
    """Reduced row echelon form of ``M`` over GF(2).

    Pivots are chosen column by column, taking the first row at or below
    the current pivot row with a one in that column.  Zero rows end up at
    the bottom, so the result has the same shape as ``M``.

    Returns ``(R, rank, pivot_cols)``.
    """
    rows = list(M.rows)
    m = len(rows)
    pivots: list[int] = []
    r = 0
    for col in range(M.num_cols):
        if r == m:
            break
        bit = 1 << col
        found = next((i for i in range(r, m) if rows[i] & bit), None)
        if found is None:
            continue
        rows[r], rows[found] = rows[found], rows[r]
        pr = rows[r]
        for i in range(m):
            if i != r and rows[i] & bit:
                rows[i] ^= pr
        pivots.append(col)
        r += 1
    return Gf2Matrix(m, M.num_cols, tuple(rows)), r, tuple(pivots)


def rank(M: Gf2Matrix) -> int:
    """GF(2) rank via an XOR basis keyed on leading bits."""
    basis: dict[int, int] = {}
    for r in M.rows:
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                break
            r ^= basis[top]
    return len(basis)


def independent_row_indices(M: Gf2Matrix) -> list[int]:
    """Indices of a maximal linearly independent subset of rows, greedy in row order."""
    basis: dict[int, int] = {}
    keep = []
    for i, r in enumerate(M.rows):
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                keep.append(i)
                break
            r ^= basis[top]
    return keep


def nullspace_basis(H: Gf2Matrix) -> Gf2Matrix:
    """Basis of ``{x : Hx = 0 mod 2}``, returned column-wise as an ``n x k`` matrix."""
    n = H.num_cols
    if n < 1:
        raise ValueError("H must have at least one column")
    vectors = nullspace_vectors(H)
    k = len(vectors)
    rows = [0] * n
    for c, v in enumerate(vectors):
        for j in bit_indices(v):
            rows[j] |= 1 << c
    return Gf2Matrix(n, k, tuple(rows))


def nullspace_vectors(H: Gf2Matrix) -> list[int]:
    """Nullspace basis as bit-packed length-n vectors, one per free column."""
    R, r, pivots = rref(H)
    pivot_set = set(pivots)
    out = []
    for f in range(H.num_cols):
        if f in pivot_set:
            continue
        v = 1 << f
        for i, p in enumerate(pivots):
            if (R.rows[i] >> f) & 1:
                v |= 1 << p
        out.append(v)
    return out


def combine_rows(H: Gf2Matrix, row_set: Iterable[int]) -> Gf2Vector:
    """XOR of the selected rows of ``H``; the result is a dual codeword."""
    idx = list(row_set)
    if not idx:
        raise ValueError("row_set must be nonempty")
    acc = 0
    for i in idx:
        if not 0 <= i < H.num_rows:
            raise ValueError(f"row index {i} out of range for {H.num_rows} rows")
        acc ^= H.rows[i]
    return Gf2Vector(acc, H.num_cols)


def gray_code_span(generators: Sequence[int]) -> Iterator[int]:
    """Yield every GF(2) combination of ``generators`` (assumed independent) once, starting at 0."""
    acc = 0
    yield acc
    for i in range(1, 1 << len(generators)):
        acc ^= generators[(i & -i).bit_length() - 1]
        yield acc


def min_weight_oracle(H: Gf2Matrix, budget: int = MAX_CODE_DIMENSION) -> tuple[int, Gf2Vector]:
    """Minimum Hamming weight of a nonzero codeword, by enumerating the whole code."""
    basis = nullspace_vectors(H)
    k = len(basis)
    if k == 0:
        raise TrivialCodeError("no nonzero codeword: the code is trivial")
    if k > budget:
        raise BudgetExceededError(f"code dimension {k} exceeds enumeration budget {budget}")
    best = H.num_cols + 1
    witness = 0
    for cw in gray_code_span(basis):
        if cw:
            w = cw.bit_count()
            if w < best:
                best, witness = w, cw
    return best, Gf2Vector(witness, H.num_cols)


def enumerate_codewords(H: Gf2Matrix, budget: int = MAX_CODE_DIMENSION) -> Iterator[Gf2Vector]:
    basis = nullspace_vectors(H)
    if len(basis) > budget:
        raise BudgetExceededError(f"code dimension {len(basis)} exceeds enumeration budget {budget}")
    n = H.num_cols
    return (Gf2Vector(cw, n) for cw in gray_code_span(basis))


def enumerate_dual_codewords(H: Gf2Matrix, budget: int = MAX_DUAL_RANK) -> Iterator[Gf2Vector]:
    """Every vector of the row space of ``H`` exactly once, zero vector included."""
    gens = [H.rows[i] for i in independent_row_indices(H)]
    if len(gens) > budget:
        raise BudgetExceededError(f"rank {len(gens)} exceeds dual enumeration budget {budget}")
    n = H.num_cols
    return (Gf2Vector(h, n) for h in gray_code_span(gens))


def in_row_space(H: Gf2Matrix, v: Gf2Vector) -> bool:
    basis: dict[int, int] = {}
    for r in H.rows:
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                break
            r ^= basis[top]
    x = v.bits
    while x:
        top = x.bit_length() - 1
        if top not in basis:
            return False
        x ^= basis[top]
    return True
