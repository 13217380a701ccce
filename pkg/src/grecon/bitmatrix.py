"""Bit-packed Boolean matrices and the concept-forming operators.

Rows are packed into ``uint64`` words, least significant bit first, so that
row scans (the dominant access pattern of every algorithm here) touch
contiguous memory.  Column bitsets and a CSR view of the ones are derived
lazily and cached; a matrix never changes after construction.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BooleanMatrix",
    "ContractError",
    "bool_product",
    "down",
    "leq",
    "pack_bits",
    "residual_error",
    "unpack_bits",
    "up",
]

WORD = 64


class ContractError(ValueError):
    """Raised when a from-below contract (``AB <= I``) is violated."""


def n_words(nbits: int) -> int:
    return max(1, (nbits + WORD - 1) // WORD)


def pack_bits(dense: np.ndarray) -> np.ndarray:
    """Pack a 2-D boolean array into ``uint64`` words along the last axis."""
    dense = np.asarray(dense, dtype=bool)
    rows, cols = dense.shape
    words = n_words(cols)
    padded = np.zeros((rows, words * WORD), dtype=bool)
    padded[:, :cols] = dense
    as_bytes = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(as_bytes).view("<u8").astype(np.uint64, copy=False).reshape(rows, words)


def unpack_bits(bits: np.ndarray, nbits: int) -> np.ndarray:
    bits = np.ascontiguousarray(bits, dtype=np.uint64)
    if bits.shape[0] == 0:
        return np.zeros((0, nbits), dtype=bool)
    as_bytes = bits.view(np.uint8).reshape(bits.shape[0], -1)
    return np.unpackbits(as_bytes, axis=1, count=nbits, bitorder="little").astype(bool)


def _index_mask(indices: Iterable[int], nbits: int, what: str) -> np.ndarray:
    mask = np.zeros(nbits, dtype=bool)
    for idx in indices:
        idx = int(idx)
        if idx < 0 or idx >= nbits:
            raise IndexError(f"{what} index {idx} out of range [0, {nbits})")
        mask[idx] = True
    return mask


class BooleanMatrix:
    """Immutable m x n binary matrix (a formal context).

    Build one with :meth:`from_dense` or :meth:`from_rows`; the constructor
    takes already packed words.
    """

    __slots__ = ("m", "n", "bits", "__dict__")

    def __init__(self, bits: np.ndarray, m: int, n: int):
        bits = np.ascontiguousarray(bits, dtype=np.uint64)
        if bits.shape != (m, n_words(n)):
            raise ValueError(f"packed shape {bits.shape} does not match {m}x{n}")
        tail = n % WORD
        if tail and m and np.any(bits[:, -1] >> np.uint64(tail)):
            raise IndexError("bits set beyond the last column")
        bits.setflags(write=False)
        self.m = int(m)
        self.n = int(n)
        self.bits = bits

    @classmethod
    def from_dense(cls, dense) -> "BooleanMatrix":
        arr = np.asarray(dense)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        if arr.dtype != bool:
            if not np.isin(arr, (0, 1)).all():
                raise ValueError("matrix entries must be 0 or 1")
            arr = arr.astype(bool)
        m, n = arr.shape
        return cls(pack_bits(arr), m, n)

    @classmethod
    def from_rows(cls, rows: Sequence[Iterable[int]], n: int) -> "BooleanMatrix":
        """Build from per-row lists of column indices."""
        dense = np.zeros((len(rows), n), dtype=bool)
        for i, row in enumerate(rows):
            for j in row:
                j = int(j)
                if j < 0 or j >= n:
                    raise IndexError(f"column index {j} out of range [0, {n})")
                dense[i, j] = True
        return cls.from_dense(dense)

    @classmethod
    def zeros(cls, m: int, n: int) -> "BooleanMatrix":
        return cls(np.zeros((m, n_words(n)), dtype=np.uint64), m, n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    def to_dense(self) -> np.ndarray:
        return unpack_bits(self.bits, self.n)

    @cached_property
    def ones_count(self) -> int:
        return int(np.bitwise_count(self.bits).sum())

    @property
    def density(self) -> float:
        if self.m == 0 or self.n == 0:
            return 0.0
        return self.ones_count / (self.m * self.n)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(row_ptr, col_idx)`` of the ones, columns ascending within a row."""
        dense = self.to_dense()
        counts = dense.sum(axis=1)
        row_ptr = np.zeros(self.m + 1, dtype=np.int64)
        np.cumsum(counts, out=row_ptr[1:])
        col_idx = np.nonzero(dense)[1].astype(np.int32)
        row_ptr.setflags(write=False)
        col_idx.setflags(write=False)
        return row_ptr, col_idx

    @cached_property
    def column_bits(self) -> np.ndarray:
        """Column-major packing: one object bitset per attribute."""
        cols = pack_bits(self.to_dense().T)
        cols.setflags(write=False)
        return cols

    def row(self, i: int) -> frozenset[int]:
        row_ptr, col_idx = self.csr
        return frozenset(int(j) for j in col_idx[row_ptr[i] : row_ptr[i + 1]])

    def __getitem__(self, ij: tuple[int, int]) -> bool:
        i, j = ij
        if not (0 <= i < self.m and 0 <= j < self.n):
            raise IndexError(f"entry ({i}, {j}) out of range for {self.m}x{self.n}")
        return bool((int(self.bits[i, j // WORD]) >> (j % WORD)) & 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BooleanMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.m, self.n, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"BooleanMatrix({self.m}x{self.n}, ones={self.ones_count})"


def up(I: BooleanMatrix, C: Iterable[int]) -> frozenset[int]:
    """Attributes shared by every object in ``C``; all attributes when ``C`` is empty."""
    mask = _index_mask(C, I.m, "object")
    if not mask.any():
        return frozenset(range(I.n))
    common = np.bitwise_and.reduce(I.bits[mask], axis=0)
    return frozenset(np.flatnonzero(unpack_bits(common[None, :], I.n)[0]).tolist())


def down(I: BooleanMatrix, D: Iterable[int]) -> frozenset[int]:
    """Objects having every attribute in ``D``; all objects when ``D`` is empty."""
    attr = _index_mask(D, I.n, "attribute")
    want = pack_bits(attr[None, :])[0]
    hit = np.all((I.bits & want) == want, axis=1)
    return frozenset(np.flatnonzero(hit).tolist())


def bool_product(A: BooleanMatrix, B: BooleanMatrix) -> BooleanMatrix:
    """Max-min product: OR of the rank-one rectangles ``A[:, l] x B[l, :]``."""
    if A.n != B.m:
        raise ValueError(f"inner dimensions differ: {A.shape} o {B.shape}")
    out = np.zeros((A.m, n_words(B.n)), dtype=np.uint64)
    a_dense = A.to_dense()
    for l in range(A.n):
        rows = a_dense[:, l]
        if rows.any():
            out[rows] |= B.bits[l]
    return BooleanMatrix(out, A.m, B.n)


def leq(M1: BooleanMatrix, M2: BooleanMatrix) -> bool:
    """Elementwise ``M1 <= M2``."""
    if M1.shape != M2.shape:
        raise ValueError(f"shape mismatch: {M1.shape} vs {M2.shape}")
    return not np.any(M1.bits & ~M2.bits)


def residual_error(I: BooleanMatrix, AB: BooleanMatrix) -> int:
    """Number of ones of ``I`` left uncovered by the from-below approximation ``AB``."""
    if I.shape != AB.shape:
        raise ValueError(f"shape mismatch: {I.shape} vs {AB.shape}")
    if not leq(AB, I):
        raise ContractError("approximation covers entries that are zero in I")
    return int(np.bitwise_count(I.bits & ~AB.bits).sum())
