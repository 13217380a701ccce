"""Word-level helpers shared by the compiled kernels."""

from __future__ import annotations

import numba as nb
import numpy as np

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@nb.njit(inline="always", cache=True)
def popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@nb.njit(inline="always", cache=True)
def lowest_bit(x):
    """Index of the least significant set bit of a nonzero word."""
    return popcount((x & (~x + np.uint64(1))) - np.uint64(1))


@nb.njit(inline="always", cache=True)
def test_bit(words, j):
    return (words[j >> 6] >> np.uint64(j & 63)) & np.uint64(1) != 0


@nb.njit(inline="always", cache=True)
def set_bit(words, j):
    words[j >> 6] |= np.uint64(1) << np.uint64(j & 63)


@nb.njit(cache=True)
def count_sorted_intersection(a, b):
    """``|a & b|`` for two ascending index arrays."""
    i = 0
    k = 0
    hits = 0
    while i < a.shape[0] and k < b.shape[0]:
        x = a[i]
        y = b[k]
        if x == y:
            hits += 1
            i += 1
            k += 1
        elif x < y:
            i += 1
        else:
            k += 1
    return hits


@nb.njit(cache=True)
def count_sorted_intersection3(a, b, c):
    """``|a & b & c|`` for three ascending index arrays."""
    i = 0
    k = 0
    r = 0
    hits = 0
    while i < a.shape[0] and k < b.shape[0] and r < c.shape[0]:
        x = a[i]
        y = b[k]
        z = c[r]
        top = max(x, max(y, z))
        if x == top and y == top and z == top:
            hits += 1
            i += 1
            k += 1
            r += 1
        else:
            if x < top:
                i += 1
            if y < top:
                k += 1
            if z < top:
                r += 1
    return hits
