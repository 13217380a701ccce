"""Formal concepts: closure, Close-by-One enumeration, canonical ordering.

Concept collections are kept in a CSR-style :class:`ConceptTable` (one flat
array of extent members, one of intent members, plus offsets) because real
datasets produce hundreds of thousands of concepts; :class:`FormalConcept`
objects are only materialised on access.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numba as nb
import numpy as np

from ._bits import lowest_bit, popcount, test_bit
from .bitmatrix import BooleanMatrix, down, up

__all__ = [
    "ConceptStream",
    "ConceptTable",
    "FormalConcept",
    "canonical_stream",
    "closure",
    "enumerate_concepts",
]


@dataclass(frozen=True)
class FormalConcept:
    extent: frozenset[int]
    intent: frozenset[int]

    @classmethod
    def of(cls, extent: Iterable[int], intent: Iterable[int]) -> "FormalConcept":
        return cls(frozenset(int(i) for i in extent), frozenset(int(j) for j in intent))

    @property
    def size(self) -> int:
        return len(self.extent) * len(self.intent)

    def is_closed_in(self, I: BooleanMatrix) -> bool:
        return up(I, self.extent) == self.intent and down(I, self.intent) == self.extent

    def __str__(self) -> str:
        ext = ",".join(map(str, sorted(self.extent)))
        itt = ",".join(map(str, sorted(self.intent)))
        return f"<{{{ext}}}, {{{itt}}}>"


def closure(I: BooleanMatrix, D: Iterable[int]) -> FormalConcept:
    """The concept generated by attribute set ``D``: ``<D', D''>``."""
    extent = down(I, D)
    return FormalConcept(extent, up(I, extent))


class ConceptTable:
    """An indexed collection of concepts in CSR layout.

    ``extent(l)`` and ``intent(l)`` return ascending ``int32`` index arrays
    (read-only views into the flat storage).
    """

    def __init__(self, ext_ptr, ext_idx, int_ptr, int_idx, m: int, n: int):
        self.ext_ptr = np.ascontiguousarray(ext_ptr, dtype=np.int64)
        self.ext_idx = np.ascontiguousarray(ext_idx, dtype=np.int32)
        self.int_ptr = np.ascontiguousarray(int_ptr, dtype=np.int64)
        self.int_idx = np.ascontiguousarray(int_idx, dtype=np.int32)
        for arr in (self.ext_ptr, self.ext_idx, self.int_ptr, self.int_idx):
            arr.setflags(write=False)
        self.m = m
        self.n = n

    @classmethod
    def from_concepts(cls, concepts: Iterable[FormalConcept], m: int, n: int) -> "ConceptTable":
        concepts = list(concepts)
        ext_ptr = np.zeros(len(concepts) + 1, dtype=np.int64)
        int_ptr = np.zeros(len(concepts) + 1, dtype=np.int64)
        exts: list[int] = []
        ints: list[int] = []
        for l, c in enumerate(concepts):
            exts.extend(sorted(c.extent))
            ints.extend(sorted(c.intent))
            ext_ptr[l + 1] = len(exts)
            int_ptr[l + 1] = len(ints)
        return cls(ext_ptr, np.array(exts, dtype=np.int32), int_ptr, np.array(ints, dtype=np.int32), m, n)

    def __len__(self) -> int:
        return len(self.ext_ptr) - 1

    def extent(self, l: int) -> np.ndarray:
        return self.ext_idx[self.ext_ptr[l] : self.ext_ptr[l + 1]]

    def intent(self, l: int) -> np.ndarray:
        return self.int_idx[self.int_ptr[l] : self.int_ptr[l + 1]]

    def __getitem__(self, l: int) -> FormalConcept:
        if l < 0:
            l += len(self)
        if not 0 <= l < len(self):
            raise IndexError(l)
        return FormalConcept.of(self.extent(l).tolist(), self.intent(l).tolist())

    def __iter__(self) -> Iterator[FormalConcept]:
        for l in range(len(self)):
            yield self[l]

    @property
    def extent_sizes(self) -> np.ndarray:
        return np.diff(self.ext_ptr)

    @property
    def intent_sizes(self) -> np.ndarray:
        return np.diff(self.int_ptr)

    @property
    def sizes(self) -> np.ndarray:
        return self.extent_sizes * self.intent_sizes

    def take(self, order: np.ndarray) -> "ConceptTable":
        """A new table holding the concepts at positions ``order``, in that order."""
        order = np.asarray(order, dtype=np.int64)
        ext_ptr, ext_idx = _gather_runs(self.ext_ptr, self.ext_idx, order)
        int_ptr, int_idx = _gather_runs(self.int_ptr, self.int_idx, order)
        return ConceptTable(ext_ptr, ext_idx, int_ptr, int_idx, self.m, self.n)

    def to_set(self) -> set[FormalConcept]:
        return set(self)


@nb.njit(cache=True)
def _gather_runs(ptr, idx, order):
    out_ptr = np.zeros(order.shape[0] + 1, dtype=np.int64)
    for r in range(order.shape[0]):
        l = order[r]
        out_ptr[r + 1] = out_ptr[r] + ptr[l + 1] - ptr[l]
    out = np.empty(out_ptr[-1], dtype=np.int32)
    for r in range(order.shape[0]):
        l = order[r]
        out[out_ptr[r] : out_ptr[r + 1]] = idx[ptr[l] : ptr[l + 1]]
    return out_ptr, out


# --- Close-by-One -----------------------------------------------------------


@nb.njit(cache=True)
def _grow(arr, need):
    if need <= arr.shape[0]:
        return arr
    cap = arr.shape[0] * 2
    while cap < need:
        cap *= 2
    out = np.empty(cap, dtype=arr.dtype)
    out[: arr.shape[0]] = arr
    return out


@nb.njit(cache=True)
def _is_subset(c, col, lo, hi):
    for w in range(lo, hi + 1):
        if c[w] & ~col[w]:
            return False
    return True


@nb.njit(cache=True)
def _cbo_kernel(cols, rows, m, n):
    wm = cols.shape[1]
    wn = rows.shape[1]
    depth_cap = n + 2
    ext = np.zeros((depth_cap, wm), dtype=np.uint64)
    itt = np.zeros((depth_cap, wn), dtype=np.uint64)
    nxt = np.zeros(depth_cap, dtype=np.int64)
    lo = np.zeros(depth_cap, dtype=np.int64)
    hi = np.zeros(depth_cap, dtype=np.int64)
    full_attrs = np.zeros(wn, dtype=np.uint64)
    for j in range(n):
        full_attrs[j >> 6] |= np.uint64(1) << np.uint64(j & 63)

    ext_ptr = np.zeros(1024, dtype=np.int64)
    int_ptr = np.zeros(1024, dtype=np.int64)
    ext_idx = np.empty(4096, dtype=np.int32)
    int_idx = np.empty(4096, dtype=np.int32)
    count = 0

    # root concept <X, X'>
    for i in range(m):
        ext[0, i >> 6] |= np.uint64(1) << np.uint64(i & 63)
    lo[0] = 0
    hi[0] = (m - 1) >> 6 if m > 0 else -1
    for j in range(n):
        if _is_subset(ext[0], cols[j], lo[0], hi[0]):
            itt[0, j >> 6] |= np.uint64(1) << np.uint64(j & 63)

    depth = 0
    emit = True
    cnt_c = m
    while True:
        if emit:
            # append concept at `depth`
            count += 1
            ext_ptr = _grow(ext_ptr, count + 1)
            int_ptr = _grow(int_ptr, count + 1)
            e0 = ext_ptr[count - 1]
            ext_idx = _grow(ext_idx, e0 + cnt_c)
            p = e0
            for w in range(lo[depth], hi[depth] + 1):
                word = ext[depth, w]
                while word:
                    ext_idx[p] = (w << 6) + lowest_bit(word)
                    p += 1
                    word &= word - np.uint64(1)
            ext_ptr[count] = p
            i0 = int_ptr[count - 1]
            int_idx = _grow(int_idx, i0 + n)
            q = i0
            for w in range(wn):
                word = itt[depth, w]
                while word:
                    int_idx[q] = (w << 6) + lowest_bit(word)
                    q += 1
                    word &= word - np.uint64(1)
            int_ptr[count] = q
            emit = False

        j = nxt[depth]
        if j >= n:
            depth -= 1
            if depth < 0:
                break
            continue
        nxt[depth] = j + 1
        if test_bit(itt[depth], j):
            continue

        a = ext[depth]
        b = itt[depth]
        c = ext[depth + 1]
        d = itt[depth + 1]
        clo = wm
        chi = -1
        cnt = 0
        for w in range(lo[depth], hi[depth] + 1):
            v = a[w] & cols[j, w]
            c[w] = v
            if v:
                cnt += popcount(v)
                if w < clo:
                    clo = w
                chi = w

        canonical = True
        if cnt == 0:
            for w in range(wn):
                d[w] = full_attrs[w]
            for k in range(j):
                if not test_bit(b, k):
                    canonical = False
                    break
        elif cnt <= n:
            for w in range(wn):
                d[w] = full_attrs[w]
            for w in range(clo, chi + 1):
                word = c[w]
                while word:
                    i = (w << 6) + lowest_bit(word)
                    for u in range(wn):
                        d[u] &= rows[i, u]
                    word &= word - np.uint64(1)
            for w in range(wn):
                base = w << 6
                if base >= j:
                    break
                low = d[w] & ~b[w]
                if j - base < 64:
                    low &= (np.uint64(1) << np.uint64(j - base)) - np.uint64(1)
                if low:
                    canonical = False
                    break
        else:
            for k in range(j):
                if not test_bit(b, k) and _is_subset(c, cols[k], clo, chi):
                    canonical = False
                    break
            if canonical:
                for w in range(wn):
                    d[w] = b[w]
                d[j >> 6] |= np.uint64(1) << np.uint64(j & 63)
                for k in range(j + 1, n):
                    if not test_bit(b, k) and _is_subset(c, cols[k], clo, chi):
                        d[k >> 6] |= np.uint64(1) << np.uint64(k & 63)

        if canonical:
            depth += 1
            nxt[depth] = j + 1
            lo[depth] = clo
            hi[depth] = chi
            cnt_c = cnt
            emit = True

    return ext_ptr[: count + 1].copy(), ext_idx[: ext_ptr[count]].copy(), int_ptr[: count + 1].copy(), int_idx[: int_ptr[count]].copy()


def enumerate_concepts(I: BooleanMatrix) -> ConceptTable:
    """All formal concepts of ``I`` via Close-by-One.

    The table is in CbO depth-first order: the top concept ``<X, X'>`` first,
    then children generated by adding attributes in ascending index order.
    """
    ext_ptr, ext_idx, int_ptr, int_idx = _cbo_kernel(I.column_bits, I.bits, I.m, I.n)
    return ConceptTable(ext_ptr, ext_idx, int_ptr, int_idx, I.m, I.n)


# --- canonical order --------------------------------------------------------


@nb.njit(cache=True)
def _reversed_intent_keys(int_ptr, int_idx, words):
    # word 0 most significant; lower attribute index = higher bit, so that
    # descending key order is ascending lexicographic order of equal-length intents
    keys = np.zeros((words, int_ptr.shape[0] - 1), dtype=np.uint64)
    for l in range(int_ptr.shape[0] - 1):
        for p in range(int_ptr[l], int_ptr[l + 1]):
            j = int_idx[p]
            keys[j >> 6, l] |= np.uint64(1) << np.uint64(63 - (j & 63))
    return keys


def canonical_order(table: ConceptTable) -> np.ndarray:
    """Positions of the nonzero-size concepts of ``table`` in canonical order.

    Order: size descending, then extent size descending, then intent
    ascending as a sorted attribute-index sequence.  Equal size and equal
    extent size imply equal intent size, so the last key only ever compares
    sequences of the same length.
    """
    ext_sizes = table.extent_sizes
    sizes = table.sizes
    keep = np.flatnonzero(sizes > 0)
    words = max(1, (table.n + 63) // 64)
    rev = _reversed_intent_keys(table.int_ptr, table.int_idx, words)[:, keep]
    # np.lexsort: last key is primary
    keys = [~rev[w] for w in range(words - 1, -1, -1)]
    keys.append(-ext_sizes[keep])
    keys.append(-sizes[keep])
    return keep[np.lexsort(keys)]


class ConceptStream:
    """Concepts in canonical order, consumed front to back by one reader.

    ``table`` exposes the whole ordered sequence for array-level consumers;
    ``position`` is the index of the next unread concept.
    """

    def __init__(self, table: ConceptTable):
        self.table = table
        self.position = 0

    def __len__(self) -> int:
        return len(self.table)

    @property
    def exhausted(self) -> bool:
        return self.position >= len(self.table)

    def read(self) -> FormalConcept | None:
        if self.exhausted:
            return None
        c = self.table[self.position]
        self.position += 1
        return c

    def __iter__(self) -> Iterator[FormalConcept]:
        while not self.exhausted:
            yield self.read()

    def rewind(self) -> "ConceptStream":
        return ConceptStream(self.table)


def canonical_stream(concepts, m: int | None = None, n: int | None = None) -> ConceptStream:
    """Sort concepts into the canonical stream, dropping zero-size concepts.

    Accepts a :class:`ConceptTable` or any iterable of :class:`FormalConcept`
    (then ``m`` and ``n`` are required).
    """
    if not isinstance(concepts, ConceptTable):
        if m is None or n is None:
            raise TypeError("m and n are required when passing FormalConcept objects")
        concepts = ConceptTable.from_concepts(set(concepts), m, n)
    return ConceptStream(concepts.take(canonical_order(concepts)))
