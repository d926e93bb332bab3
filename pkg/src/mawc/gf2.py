"""Dense GF(2) vectors and matrices packed into Python integers.

Bit order is most-significant-first: entry ``i`` of a length-``n`` vector is
bit ``n - 1 - i`` of its integer value.  With that convention the integer
order of values coincides with the lexicographic order of bit tuples, which
is what the decoders use for tie-breaking.  Matrices are stored as a tuple of
packed rows.  Products are XOR / popcount over whole rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


def parity(x: int) -> int:
    return x.bit_count() & 1


@dataclass(frozen=True, order=True)
class BitVector:
    length: int
    value: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value {self.value} does not fit in {self.length} bits")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitVector:
        value = 0
        length = 0
        for b in bits:
            if b not in (0, 1, True, False):
                raise ValueError(f"entry {b!r} is not a bit")
            value = (value << 1) | int(b)
            length += 1
        return cls(length, value)

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, 0)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not -self.length <= i < self.length:
            raise IndexError(i)
        i %= self.length
        return (self.value >> (self.length - 1 - i)) & 1

    def __iter__(self):
        for i in range(self.length):
            yield (self.value >> (self.length - 1 - i)) & 1

    def __xor__(self, other: BitVector) -> BitVector:
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")
        return BitVector(self.length, self.value ^ other.value)

    @property
    def weight(self) -> int:
        return self.value.bit_count()

    def bits(self) -> tuple[int, ...]:
        return tuple(self)

    def concat(self, other: BitVector) -> BitVector:
        return BitVector(self.length + other.length, (self.value << other.length) | other.value)

    def split(self, first: int) -> tuple[BitVector, BitVector]:
        rest = self.length - first
        return BitVector(first, self.value >> rest), BitVector(rest, self.value & ((1 << rest) - 1))

    def to_array(self) -> np.ndarray:
        return np.fromiter(self, dtype=np.uint8, count=self.length)

    def __repr__(self) -> str:
        return "BitVector(" + "".join(map(str, self)) + ")" if self.length else "BitVector()"


@dataclass(frozen=True)
class BitMatrix:
    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("dimensions must be non-negative")
        if len(self.data) != self.rows:
            raise ValueError("row count does not match data")
        for r in self.data:
            if r < 0 or r >> self.cols:
                raise ValueError("row value wider than the column count")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> BitMatrix:
        packed = [BitVector.from_bits(r) for r in rows]
        if cols is None:
            cols = packed[0].length if packed else 0
        if any(p.length != cols for p in packed):
            raise ValueError("ragged rows")
        return cls(len(packed), cols, tuple(p.value for p in packed))

    @classmethod
    def from_array(cls, arr) -> BitMatrix:
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        return cls.from_rows(arr.astype(np.uint8).tolist(), cols=arr.shape[1])

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, tuple(1 << (n - 1 - i) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def from_columns(cls, columns: Sequence[BitVector]) -> BitMatrix:
        if not columns:
            raise ValueError("need at least one column")
        n = columns[0].length
        data = []
        for i in range(n):
            row = 0
            for c in columns:
                row = (row << 1) | c[i]
            data.append(row)
        return cls(n, len(columns), tuple(data))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return (self.data[i] >> (self.cols - 1 - j)) & 1

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.data[i])

    @cached_property
    def columns(self) -> tuple[int, ...]:
        """Packed columns, each an integer of ``rows`` bits."""
        out = []
        for j in range(self.cols):
            shift = self.cols - 1 - j
            col = 0
            for r in self.data:
                col = (col << 1) | ((r >> shift) & 1)
            out.append(col)
        return tuple(out)

    def column(self, j: int) -> BitVector:
        return BitVector(self.rows, self.columns[j])

    @property
    def T(self) -> BitMatrix:
        return BitMatrix(self.cols, self.rows, self.columns)

    def hstack(self, other: BitMatrix) -> BitMatrix:
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return BitMatrix(
            self.rows,
            self.cols + other.cols,
            tuple((a << other.cols) | b for a, b in zip(self.data, other.data)),
        )

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i in range(self.rows):
            for j in range(self.cols):
                out[i, j] = self[i, j]
        return out

    def __matmul__(self, other):
        if isinstance(other, BitVector):
            return mat_vec_mul(self, other)
        if isinstance(other, BitMatrix):
            return mat_mat_mul(self, other)
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(format(r, f"0{self.cols}b") if self.cols else "" for r in self.data)
        return f"BitMatrix({self.rows}x{self.cols}: [{body}])"


def mat_vec_mul(A: BitMatrix, x: BitVector) -> BitVector:
    if A.cols != x.length:
        raise ValueError(f"cannot multiply {A.rows}x{A.cols} matrix by length-{x.length} vector")
    y = 0
    for r in A.data:
        y = (y << 1) | parity(r & x.value)
    return BitVector(A.rows, y)


def mat_mat_mul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    if A.cols != B.rows:
        raise ValueError(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    out = []
    for r in A.data:
        acc = 0
        for j in range(A.cols):
            if (r >> (A.cols - 1 - j)) & 1:
                acc ^= B.data[j]
        out.append(acc)
    return BitMatrix(A.rows, B.cols, tuple(out))


def _rref(rows: Sequence[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form of packed rows; returns (rows, pivot columns)."""
    work = list(rows)
    pivots: list[int] = []
    r = 0
    for j in range(ncols):
        bit = 1 << (ncols - 1 - j)
        pivot = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
        pivots.append(j)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


def rank(A: BitMatrix) -> int:
    return len(_rref(A.data, A.cols)[1])


def kernel_basis(B: BitMatrix) -> list[BitVector]:
    """Basis of ``{v : B v = 0}``, one vector per free column."""
    reduced, pivots = _rref(B.data, B.cols)
    pivot_set = set(pivots)
    basis = []
    for f in range(B.cols):
        if f in pivot_set:
            continue
        v = 1 << (B.cols - 1 - f)
        fbit = 1 << (B.cols - 1 - f)
        for row, pc in zip(reduced, pivots):
            if row & fbit:
                v |= 1 << (B.cols - 1 - pc)
        basis.append(BitVector(B.cols, v))
    return basis


def random_matrix(rows: int, cols: int, rng: np.random.Generator) -> BitMatrix:
    """Matrix with i.i.d. uniform entries drawn from ``rng``."""
    if rows < 1 or cols < 1:
        raise ValueError("dimensions must be at least 1")
    return BitMatrix.from_array(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))


def random_vector(length: int, rng: np.random.Generator) -> BitVector:
    if length == 0:
        return BitVector(0, 0)
    return BitVector.from_bits(rng.integers(0, 2, size=length, dtype=np.uint8).tolist())


def bernoulli_vector(length: int, prob: float, rng: np.random.Generator) -> BitVector:
    if length == 0:
        return BitVector(0, 0)
    bits = rng.random(length) < prob
    return BitVector.from_bits(bits.astype(np.uint8).tolist())


# Vectorized helpers for the enumeration-heavy decoders.


def span_table(columns: Sequence[int]) -> np.ndarray:
    """All XOR combinations of ``columns``, indexed by the MSB-first coefficient word.

    ``span_table(A.columns)[w]`` is the packed value of ``A @ BitVector(A.cols, w)``.
    """
    table = np.zeros(1, dtype=np.uint64)
    for col in reversed(columns):
        table = np.concatenate([table, table ^ np.uint64(col)])
    return table


def popcount(arr: np.ndarray) -> np.ndarray:
    return np.bitwise_count(arr).astype(np.int64)


def weights(nbits: int) -> np.ndarray:
    """Hamming weight of every integer in ``range(2**nbits)``."""
    return popcount(np.arange(1 << nbits, dtype=np.uint64))


def random_independent_columns(rows: int, count: int, rng: np.random.Generator,
                               start: Sequence[int] = ()) -> list[int]:
    """Draw ``count`` packed columns one at a time, redrawing any column that
    is linearly dependent on ``start`` plus the columns drawn so far.

    Once ``rows`` independent columns exist, further columns are drawn
    unconstrained.  Because columns are drawn sequentially, the first ``r``
    columns do not depend on ``count``.
    """
    basis: dict[int, int] = {}  # leading bit -> reduced vector

    def reduce(v: int) -> int:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                return v
            v ^= basis[top]
        return 0

    def insert(v: int) -> bool:
        v = reduce(v)
        if v:
            basis[v.bit_length() - 1] = v
            return True
        return False

    for c in start:
        insert(c)
    out = []
    for _ in range(count):
        while True:
            col = random_vector(rows, rng).value
            if len(basis) >= rows or insert(col):
                break
        out.append(col)
    return out
