"""GreConD: factor concepts built on demand by greedy attribute growth.

Each factor starts from the empty intent and repeatedly adds the attribute
whose closure covers the most still-uncovered ones, stopping when no
attribute improves on the current value.  Ties go to the lowest attribute.
"""

from __future__ import annotations

import time

import numba as nb
import numpy as np

from ._bits import popcount
from .bitmatrix import BooleanMatrix, n_words
from .concepts import FormalConcept
from .factorization import Factorization, IncompleteConceptsError, check_epsilon, required_coverage

__all__ = ["grecond_factorize"]


@nb.njit(cache=True)
def _up(cols, extent, out):
    """Attribute mask of the columns containing every object of ``extent``."""
    out[:] = 0
    for y in range(cols.shape[0]):
        ok = True
        for w in range(extent.shape[0]):
            if extent[w] & ~cols[y, w]:
                ok = False
                break
        if ok:
            out[y >> 6] |= np.uint64(1) << np.uint64(y & 63)


@nb.njit(cache=True)
def _value(uncovered, extent, intent):
    v = 0
    for w in range(extent.shape[0]):
        x = extent[w]
        while x:
            bit = x & (~x + np.uint64(1))
            x ^= bit
            i = w * 64 + popcount(bit - np.uint64(1))
            for t in range(intent.shape[0]):
                v += popcount(uncovered[i, t] & intent[t])
    return v


@nb.njit(cache=True)
def _grow(cols, uncovered, m, n):
    wm = cols.shape[1]
    wn = uncovered.shape[1]
    extent = np.zeros(wm, dtype=np.uint64)
    for i in range(m):
        extent[i >> 6] |= np.uint64(1) << np.uint64(i & 63)
    intent = np.zeros(wn, dtype=np.uint64)
    cand_ext = np.empty(wm, dtype=np.uint64)
    cand_int = np.empty(wn, dtype=np.uint64)
    best_ext = np.empty(wm, dtype=np.uint64)
    best_int = np.empty(wn, dtype=np.uint64)
    value = 0
    while True:
        best_j = -1
        best_v = value
        for j in range(n):
            if (intent[j >> 6] >> np.uint64(j & 63)) & np.uint64(1):
                continue
            for w in range(wm):
                cand_ext[w] = extent[w] & cols[j, w]
            _up(cols, cand_ext, cand_int)
            v = _value(uncovered, cand_ext, cand_int)
            if v > best_v:
                best_v = v
                best_j = j
                best_ext[:] = cand_ext
                best_int[:] = cand_int
        if best_j < 0:
            break
        extent[:] = best_ext
        intent[:] = best_int
        value = best_v
    return extent, intent, value


@nb.njit(cache=True)
def _remove(uncovered, extent, intent):
    for w in range(extent.shape[0]):
        x = extent[w]
        while x:
            bit = x & (~x + np.uint64(1))
            x ^= bit
            i = w * 64 + popcount(bit - np.uint64(1))
            for t in range(intent.shape[0]):
                uncovered[i, t] &= ~intent[t]


def _members(words: np.ndarray, nbits: int) -> frozenset:
    bits = np.unpackbits(words.view(np.uint8), count=nbits, bitorder="little")
    return frozenset(np.flatnonzero(bits).tolist())


def grecond_factorize(I: BooleanMatrix, epsilon: float = 1.0) -> Factorization:
    epsilon = check_epsilon(epsilon)
    start = time.perf_counter()
    total = I.ones_count
    need = required_coverage(total, epsilon)
    cols = np.ascontiguousarray(I.column_bits)
    if cols.shape[0] == 0:
        cols = np.zeros((0, n_words(I.m)), dtype=np.uint64)
    uncovered = I.bits.copy()
    factors, gains = [], []
    covered = 0
    while covered < need:
        extent, intent, value = _grow(cols, uncovered, I.m, I.n)
        if value <= 0:
            raise IncompleteConceptsError("no attribute growth covers an uncovered one")
        _remove(uncovered, extent, intent)
        factors.append(FormalConcept(_members(extent, I.m), _members(intent, I.n)))
        gains.append(int(value))
        covered += int(value)
    return Factorization(
        factors=factors,
        new_coverage=gains,
        total_ones=total,
        m=I.m,
        n=I.n,
        wall_ms=(time.perf_counter() - start) * 1e3,
    )
