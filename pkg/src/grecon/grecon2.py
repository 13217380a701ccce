"""GreCon2: every concept's cell lists are built up front, then greedy
selection repeatedly takes the concept with the largest live coverage and
decrements the coverage of every concept sharing a newly covered one.

``cells`` is dense: one list per matrix entry, ``m * n`` heads.
"""

from __future__ import annotations

import time

import numba as nb
import numpy as np

from . import _cells
from ._cells import BLOCK, CellLists
from .bitmatrix import BooleanMatrix
from .concepts import ConceptStream, ConceptTable
from .factorization import Factorization, IncompleteConceptsError, check_epsilon, required_coverage

__all__ = ["GreCon2State", "grecon2_factorize"]


@nb.njit(cache=True)
def _fill(s, n, ext_ptr, ext_idx, int_ptr, int_idx, covers):
    for l in range(ext_ptr.shape[0] - 1):
        e0, e1 = ext_ptr[l], ext_ptr[l + 1]
        i0, i1 = int_ptr[l], int_ptr[l + 1]
        covers[l] = (e1 - e0) * (i1 - i0)
        for p in range(e0, e1):
            base = np.int64(ext_idx[p]) * n
            for q in range(i0, i1):
                _cells.append(s, base + int_idx[q], l)


@nb.njit(cache=True)
def _select(s, n, ext_ptr, ext_idx, int_ptr, int_idx, covers, need, chosen, gains):
    covered = 0
    k = 0
    while covered < need:
        l = np.argmax(covers)
        gain = covers[l]
        if gain <= 0:
            return k, False
        chosen[k] = l
        gains[k] = gain
        k += 1
        for p in range(ext_ptr[l], ext_ptr[l + 1]):
            base = np.int64(ext_idx[p]) * n
            for q in range(int_ptr[l], int_ptr[l + 1]):
                cell = base + int_idx[q]
                remaining = s.length[cell]
                b = s.head[cell]
                while b >= 0:
                    take = min(BLOCK, remaining)
                    for r in range(b * BLOCK, b * BLOCK + take):
                        covers[s.items[r]] -= 1
                    remaining -= take
                    b = s.nxt[b]
                _cells.clear(s, cell)
        covered += gain
    return k, True


class GreCon2State:
    """``covers`` and ``cells`` after the upfront initialization.

    Concept indices are positions in ``table``; any concept list works,
    including one with zero-size concepts.
    """

    def __init__(self, I: BooleanMatrix, table: ConceptTable):
        self.I = I
        self.table = table
        sizes = table.sizes
        bound = int(I.ones_count + sizes.sum() // BLOCK + 1)
        self.cells = CellLists(I.m * I.n, blocks=bound)
        self.covers = np.zeros(len(table), dtype=np.int64)
        _fill(self.cells.store, I.n, table.ext_ptr, table.ext_idx, table.int_ptr, table.int_idx, self.covers)

    def cell(self, i: int, j: int) -> list[int]:
        return self.cells.get(i * self.I.n + j)


def grecon2_factorize(I: BooleanMatrix, stream: ConceptStream, epsilon: float = 1.0) -> Factorization:
    epsilon = check_epsilon(epsilon)
    start = time.perf_counter()
    table = stream.table
    total = I.ones_count
    need = required_coverage(total, epsilon)
    state = GreCon2State(I, table)
    cap = max(1, min(len(table), need))
    chosen = np.empty(cap, dtype=np.int64)
    gains = np.empty(cap, dtype=np.int64)
    k, complete = _select(
        state.cells.store, I.n, table.ext_ptr, table.ext_idx, table.int_ptr, table.int_idx,
        state.covers, need, chosen, gains,
    )
    if not complete:
        raise IncompleteConceptsError("concept stream does not cover every one of the matrix")
    stream.position = len(table)
    return Factorization(
        factors=[table[int(l)] for l in chosen[:k]],
        new_coverage=[int(g) for g in gains[:k]],
        total_ones=total,
        m=I.m,
        n=I.n,
        cell_appends=state.cells.appends,
        wall_ms=(time.perf_counter() - start) * 1e3,
        stats={"peak_slots": len(table), "peak_cell_entries": state.cells.peak},
    )
