"""Growable per-cell index lists backed by a pool of fixed-size blocks.

Each cell owns a singly linked chain of blocks holding ``BLOCK`` concept
indices.  Cleared cells hand their blocks back to a free stack, so memory
released by uncovered ones is reused by later appends.  All mutation happens
in compiled helpers; the pool only grows from Python, between kernel calls,
via :meth:`CellLists.reserve`.
"""

from __future__ import annotations

from collections import namedtuple

import numba as nb
import numpy as np

BLOCK = 16

# meta slots
BUMP = 0  # next never-used block
NFREE = 1  # entries on the free stack
APPENDS = 2  # total appends ever made
STORED = 3  # indices currently held
PEAK = 4  # max of STORED

Store = namedtuple("Store", "head tail length items nxt free meta")


class CellLists:
    def __init__(self, n_cells: int, blocks: int = 1024):
        blocks = max(16, int(blocks))
        self.store = Store(
            head=np.full(n_cells, -1, dtype=np.int64),
            tail=np.full(n_cells, -1, dtype=np.int64),
            length=np.zeros(n_cells, dtype=np.int32),
            items=np.empty(blocks * BLOCK, dtype=np.int32),
            nxt=np.full(blocks, -1, dtype=np.int64),
            free=np.empty(blocks, dtype=np.int64),
            meta=np.zeros(5, dtype=np.int64),
        )

    @property
    def capacity(self) -> int:
        return self.store.nxt.shape[0]

    def available(self) -> int:
        meta = self.store.meta
        return int(self.capacity - meta[BUMP] + meta[NFREE])

    def reserve(self, blocks: int) -> None:
        """Make sure at least ``blocks`` blocks can be taken without growing."""
        short = blocks - self.available()
        if short <= 0:
            return
        s = self.store
        cap = max(self.capacity * 2, self.capacity + short)
        items = np.empty(cap * BLOCK, dtype=np.int32)
        items[: s.items.shape[0]] = s.items
        nxt = np.full(cap, -1, dtype=np.int64)
        nxt[: s.nxt.shape[0]] = s.nxt
        free = np.empty(cap, dtype=np.int64)
        free[: s.free.shape[0]] = s.free
        self.store = s._replace(items=items, nxt=nxt, free=free)

    def get(self, cell: int) -> list[int]:
        return _collect(self.store, cell).tolist()

    @property
    def appends(self) -> int:
        return int(self.store.meta[APPENDS])

    @property
    def stored(self) -> int:
        return int(self.store.meta[STORED])

    @property
    def peak(self) -> int:
        return int(self.store.meta[PEAK])


@nb.njit(inline="always", cache=True)
def free_blocks(s):
    return s.nxt.shape[0] - s.meta[BUMP] + s.meta[NFREE]


@nb.njit(inline="always", cache=True)
def _take_block(s):
    meta = s.meta
    if meta[NFREE] > 0:
        meta[NFREE] -= 1
        b = s.free[meta[NFREE]]
    else:
        b = meta[BUMP]
        meta[BUMP] += 1
    s.nxt[b] = -1
    return b


@nb.njit(inline="always", cache=True)
def append(s, cell, value):
    k = s.length[cell]
    if k % BLOCK == 0:
        b = _take_block(s)
        if k == 0:
            s.head[cell] = b
        else:
            s.nxt[s.tail[cell]] = b
        s.tail[cell] = b
    s.items[s.tail[cell] * BLOCK + k % BLOCK] = value
    s.length[cell] = k + 1
    meta = s.meta
    meta[APPENDS] += 1
    meta[STORED] += 1
    if meta[STORED] > meta[PEAK]:
        meta[PEAK] = meta[STORED]


@nb.njit(inline="always", cache=True)
def clear(s, cell):
    b = s.head[cell]
    meta = s.meta
    while b >= 0:
        s.free[meta[NFREE]] = b
        meta[NFREE] += 1
        b = s.nxt[b]
    meta[STORED] -= s.length[cell]
    s.head[cell] = -1
    s.tail[cell] = -1
    s.length[cell] = 0


@nb.njit(cache=True)
def _collect(s, cell):
    out = np.empty(s.length[cell], dtype=np.int32)
    b = s.head[cell]
    p = 0
    while b >= 0:
        take = min(BLOCK, out.shape[0] - p)
        out[p : p + take] = s.items[b * BLOCK : b * BLOCK + take]
        p += take
        b = s.nxt[b]
    return out
