"""GreCon3: greedy concept-based factorization with lazily built cell lists.

Concepts are read from the size-ordered stream only while they can still
beat the best coverage seen in the current round.  The first factor is the
first concept of the stream, the second and third are found with closed-form
coverage formulas, and from the fourth factor on coverage is tracked in
sparse per-row cell lists that are filled concept by concept, large concepts
row by row with suspension once their upper bound falls behind.

State of a run:

* ``cells`` - one entry per one of the matrix, laid out row by row in the
  CSR order of ``I.csr`` (so a row's entries are ordered by column).  An
  entry exists while its one is uncovered and the store is initialized;
  it holds the slots of the concepts known to cover it.
* slot arrays ``covers``, ``potential``, ``progress`` and ``slot_concept``
  (the stream position of the concept held, -1 when the slot is free).
  ``covers[l] + potential[l]`` bounds the live coverage of slot ``l``.
* ``queue`` - slots read from the stream and not yet freed, sorted by that
  bound after every factor.
"""

from __future__ import annotations

import time
from collections import namedtuple

import numba as nb
import numpy as np

from . import _cells
from ._bits import count_sorted_intersection, count_sorted_intersection3, popcount, set_bit
from ._cells import BLOCK, CellLists
from .bitmatrix import BooleanMatrix
from .concepts import ConceptStream, FormalConcept
from .factorization import Factorization, IncompleteConceptsError, check_epsilon, required_coverage

__all__ = [
    "DEFAULT_SMALL_THRESHOLD",
    "GreCon3",
    "grecon3_factorize",
    "second_factor_coverage",
    "third_factor_coverage",
]

DEFAULT_SMALL_THRESHOLD = 100

# ctl slots
NF = 0  # factors chosen
INIT = 1  # cell entries allocated
POS = 2  # next unread stream position
FRESH = 3  # never-used slots start here
NFREE = 4  # free slot stack height
INUSE = 5
PEAK_SLOTS = 6
QLEN = 7
PHASE = 8  # 0 idle, 1 walking the queue, 2 reading the stream
QI = 9
BEST_COV = 10
BEST_SLOT = 11
BEST_RANK = 12
PENDING = 13  # slot read from the stream but not yet covered
NEED = 14  # blocks requested when a kernel stops for space
F0 = 15
F1 = 16
SMALL = 17
CTL_SIZE = 18

# kernel status
DONE = 0
NEED_SPACE = 1
NOTHING_COVERS = 2

Ctx = namedtuple("Ctx", "row_ptr row_bits live ext_ptr ext_idx int_ptr int_idx mask")
Pool = namedtuple("Pool", "slot_concept covers potential progress free_slots queue ctl")


def second_factor_coverage(c: FormalConcept, f1: FormalConcept) -> int:
    """Live coverage of ``c`` when ``f1`` is the only factor chosen."""
    return len(c.extent) * len(c.intent) - len(f1.extent & c.extent) * len(f1.intent & c.intent)


def third_factor_coverage(c: FormalConcept, f1: FormalConcept, f2: FormalConcept) -> int:
    """Live coverage of ``c`` after factors ``f1`` and ``f2``, by inclusion-exclusion."""
    return (
        len(c.extent) * len(c.intent)
        - len(f1.extent & c.extent) * len(f1.intent & c.intent)
        - len(f2.extent & c.extent) * len(f2.intent & c.intent)
        + len(f1.extent & f2.extent & c.extent) * len(f1.intent & f2.intent & c.intent)
    )


# --- kernels ----------------------------------------------------------------


@nb.njit(inline="always", cache=True)
def _ext(ctx, s):
    return ctx.ext_idx[ctx.ext_ptr[s] : ctx.ext_ptr[s + 1]]


@nb.njit(inline="always", cache=True)
def _int(ctx, s):
    return ctx.int_idx[ctx.int_ptr[s] : ctx.int_ptr[s + 1]]


@nb.njit(inline="always", cache=True)
def _size(ctx, s):
    return (ctx.ext_ptr[s + 1] - ctx.ext_ptr[s]) * (ctx.int_ptr[s + 1] - ctx.int_ptr[s])


@nb.njit(cache=True)
def _closed_form(ctx, s, f0, f1, nf):
    a = _ext(ctx, s)
    b = _int(ctx, s)
    a0 = _ext(ctx, f0)
    b0 = _int(ctx, f0)
    cov = a.shape[0] * b.shape[0] - count_sorted_intersection(a0, a) * count_sorted_intersection(b0, b)
    if nf == 2:
        a1 = _ext(ctx, f1)
        b1 = _int(ctx, f1)
        cov -= count_sorted_intersection(a1, a) * count_sorted_intersection(b1, b)
        cov += count_sorted_intersection3(a0, a1, a) * count_sorted_intersection3(b0, b1, b)
    return cov


@nb.njit(inline="always", cache=True)
def _load_mask(ctx, b):
    mask = ctx.mask
    mask[:] = 0
    for q in range(b.shape[0]):
        set_bit(mask, b[q])
    return mask


@nb.njit(inline="always", cache=True)
def _cell_id(ctx, i, w, bit):
    # position of (i, j) among the ones of I, in row-major order
    words = ctx.row_bits[i]
    rank = popcount(words[w] & (bit - np.uint64(1)))
    for v in range(w):
        rank += popcount(words[v])
    return ctx.row_ptr[i] + rank


@nb.njit(inline="always", cache=True)
def _cover_row(ctx, store, i, mask, l):
    hits = 0
    live = ctx.live[i]
    for w in range(mask.shape[0]):
        x = live[w] & mask[w]
        while x:
            bit = x & (~x + np.uint64(1))
            _cells.append(store, _cell_id(ctx, i, w, bit), l)
            hits += 1
            x ^= bit
    return hits


@nb.njit(cache=True)
def _cover_concept(ctx, pool, store, l):
    s = pool.slot_concept[l]
    a = _ext(ctx, s)
    mask = _load_mask(ctx, _int(ctx, s))
    cov = 0
    for p in range(a.shape[0]):
        cov += _cover_row(ctx, store, a[p], mask, l)
    pool.covers[l] = cov
    return cov


@nb.njit(cache=True)
def _cover_incremental(ctx, pool, store, l, best):
    s = pool.slot_concept[l]
    a = _ext(ctx, s)
    b = _int(ctx, s)
    mask = _load_mask(ctx, b)
    width = b.shape[0]
    start = np.searchsorted(a, pool.progress[l], side="right")
    for p in range(start, a.shape[0]):
        pool.covers[l] += _cover_row(ctx, store, a[p], mask, l)
        pool.potential[l] -= width
        if pool.covers[l] + pool.potential[l] < best:
            pool.progress[l] = a[p]
            return pool.covers[l]
    if a.shape[0] > 0:
        pool.progress[l] = a[a.shape[0] - 1]
    return pool.covers[l]


@nb.njit(cache=True)
def _cover(ctx, pool, store, l, best):
    ctl = pool.ctl
    nf = ctl[NF]
    if nf < 3:
        return _closed_form(ctx, pool.slot_concept[l], ctl[F0], ctl[F1], nf)
    if pool.potential[l] == 0:
        return pool.covers[l]
    s = pool.slot_concept[l]
    if ctx.ext_ptr[s + 1] - ctx.ext_ptr[s] < ctl[SMALL]:
        _cover_concept(ctx, pool, store, l)
        pool.potential[l] = 0
        return pool.covers[l]
    return _cover_incremental(ctx, pool, store, l, best)


@nb.njit(cache=True)
def _allocate(ctx, pool, s):
    ctl = pool.ctl
    if ctl[NFREE] > 0:
        ctl[NFREE] -= 1
        l = pool.free_slots[ctl[NFREE]]
    else:
        l = ctl[FRESH]
        ctl[FRESH] += 1
    pool.slot_concept[l] = s
    pool.covers[l] = 0
    pool.potential[l] = _size(ctx, s)
    pool.progress[l] = -1
    ctl[INUSE] += 1
    if ctl[INUSE] > ctl[PEAK_SLOTS]:
        ctl[PEAK_SLOTS] = ctl[INUSE]
    return l


@nb.njit(inline="always", cache=True)
def _release(pool, l):
    ctl = pool.ctl
    pool.slot_concept[l] = -1
    pool.free_slots[ctl[NFREE]] = l
    ctl[NFREE] += 1
    ctl[INUSE] -= 1


@nb.njit(inline="always", cache=True)
def _wins(ctl, cov, rank):
    # ties go to the concept earlier in the stream
    return cov > ctl[BEST_COV] or (cov == ctl[BEST_COV] and rank < ctl[BEST_RANK])


@nb.njit(inline="always", cache=True)
def _has_room(ctl, pool, store, l):
    if ctl[NF] < 3 or pool.potential[l] == 0:
        return True
    # each append takes at most one new block
    if _cells.free_blocks(store) >= pool.potential[l]:
        return True
    ctl[NEED] = pool.potential[l]
    return False


@nb.njit(cache=True)
def _load_concepts(ctx, pool, store):
    ctl = pool.ctl
    q = pool.queue
    n_stream = ctx.ext_ptr.shape[0] - 1
    if ctl[PHASE] == 0:
        ctl[PHASE] = 1
        ctl[QI] = 0
        ctl[BEST_COV] = -1
        ctl[BEST_SLOT] = -1
        ctl[BEST_RANK] = n_stream
        ctl[PENDING] = -1

    if ctl[PHASE] == 1:
        while ctl[QI] < ctl[QLEN]:
            l = q[ctl[QI]]
            # the queue is sorted by bound, so nothing further can win
            if pool.covers[l] + pool.potential[l] < ctl[BEST_COV]:
                break
            if not _has_room(ctl, pool, store, l):
                return NEED_SPACE
            c = _cover(ctx, pool, store, l, ctl[BEST_COV])
            if _wins(ctl, c, pool.slot_concept[l]):
                ctl[BEST_COV] = c
                ctl[BEST_SLOT] = l
                ctl[BEST_RANK] = pool.slot_concept[l]
            ctl[QI] += 1
        ctl[PHASE] = 2

    while True:
        l = ctl[PENDING]
        if l < 0:
            if ctl[POS] >= n_stream:
                break
            s = ctl[POS]
            ctl[POS] += 1
            l = _allocate(ctx, pool, s)
            q[ctl[QLEN]] = l
            ctl[QLEN] += 1
            # the stream is size-ordered: no later concept can win either
            if _size(ctx, s) < ctl[BEST_COV]:
                break
            ctl[PENDING] = l
        if not _has_room(ctl, pool, store, l):
            return NEED_SPACE
        c = _cover(ctx, pool, store, l, ctl[BEST_COV])
        ctl[PENDING] = -1
        if _wins(ctl, c, pool.slot_concept[l]):
            ctl[BEST_COV] = c
            ctl[BEST_SLOT] = l
            ctl[BEST_RANK] = pool.slot_concept[l]

    ctl[PHASE] = 0
    if ctl[BEST_SLOT] < 0 or ctl[BEST_COV] <= 0:
        return NOTHING_COVERS
    return DONE


@nb.njit(cache=True)
def _uncover(ctx, pool, store, s):
    a = _ext(ctx, s)
    mask = _load_mask(ctx, _int(ctx, s))
    initialized = pool.ctl[INIT] != 0
    gain = 0
    for p in range(a.shape[0]):
        i = a[p]
        live = ctx.live[i]
        for w in range(mask.shape[0]):
            x = live[w] & mask[w]
            live[w] &= ~mask[w]
            while x:
                bit = x & (~x + np.uint64(1))
                x ^= bit
                gain += 1
                if not initialized:
                    continue
                r = _cell_id(ctx, i, w, bit)
                remaining = store.length[r]
                blk = store.head[r]
                while blk >= 0:
                    take = min(BLOCK, remaining)
                    for e in range(blk * BLOCK, blk * BLOCK + take):
                        k = store.items[e]
                        pool.covers[k] -= 1
                        if pool.covers[k] + pool.potential[k] == 0 and pool.slot_concept[k] >= 0:
                            _release(pool, k)
                    remaining -= take
                    blk = store.nxt[blk]
                _cells.clear(store, r)
    return gain


@nb.njit(cache=True)
def _reorder_queue(pool):
    """Stable sort of the queue by bound, descending; drop and free zero-bound slots."""
    ctl = pool.ctl
    q = pool.queue
    nq = ctl[QLEN]
    bound = np.empty(nq, dtype=np.int64)
    for t in range(nq):
        bound[t] = -(pool.covers[q[t]] + pool.potential[q[t]])
    order = np.argsort(bound, kind="mergesort")
    tmp = q[:nq][order]
    keep = 0
    for t in range(nq):
        l = tmp[t]
        if pool.covers[l] + pool.potential[l] > 0:
            q[keep] = l
            keep += 1
        elif pool.slot_concept[l] >= 0:
            _release(pool, l)
    ctl[QLEN] = keep


# --- driver -----------------------------------------------------------------


class GreCon3:
    """One factorization run; methods expose the individual steps.

    Slots are the indices of the candidate pool; concepts are identified by
    their stream position.
    """

    def __init__(self, I: BooleanMatrix, stream: ConceptStream, small_threshold: int = DEFAULT_SMALL_THRESHOLD):
        self.I = I
        self.stream = stream
        self.table = stream.table
        row_ptr, col_idx = I.csr
        t = self.table
        self.ctx = Ctx(
            row_ptr, I.bits, I.bits.copy(), t.ext_ptr, t.ext_idx, t.int_ptr, t.int_idx,
            np.zeros(I.bits.shape[1], dtype=np.uint64),
        )
        cap = len(t) + 1
        ctl = np.zeros(CTL_SIZE, dtype=np.int64)
        ctl[F0] = ctl[F1] = -1
        ctl[SMALL] = int(small_threshold)
        ctl[POS] = stream.position
        self.pool = Pool(
            slot_concept=np.full(cap, -1, dtype=np.int64),
            covers=np.zeros(cap, dtype=np.int64),
            potential=np.zeros(cap, dtype=np.int64),
            progress=np.full(cap, -1, dtype=np.int64),
            free_slots=np.empty(cap, dtype=np.int64),
            queue=np.empty(cap, dtype=np.int64),
            ctl=ctl,
        )
        self.cells = CellLists(len(col_idx), blocks=max(1024, len(col_idx) // 4))
        self.factors: list[int] = []
        self.gains: list[int] = []
        self.covered = 0

    # state views
    @property
    def ctl(self) -> np.ndarray:
        return self.pool.ctl

    @property
    def covers(self) -> np.ndarray:
        return self.pool.covers

    @property
    def potential(self) -> np.ndarray:
        return self.pool.potential

    @property
    def progress(self) -> np.ndarray:
        return self.pool.progress

    @property
    def queue(self) -> list[int]:
        return self.pool.queue[: self.ctl[QLEN]].tolist()

    @property
    def free_slots(self) -> list[int]:
        return self.pool.free_slots[: self.ctl[NFREE]].tolist()

    def concept_at(self, slot: int) -> FormalConcept:
        return self.table[int(self.pool.slot_concept[slot])]

    def cell_entry(self, i: int, j: int) -> list[int] | None:
        """Slots listed at one ``(i, j)``, or None when the entry does not exist."""
        row_ptr, col_idx = self.I.csr
        row = col_idx[row_ptr[i] : row_ptr[i + 1]]
        pos = int(np.searchsorted(row, j))
        if pos == len(row) or row[pos] != j:
            return None
        live = (int(self.ctx.live[i, j >> 6]) >> (j & 63)) & 1
        if not self.ctl[INIT] or not live:
            return None
        return self.cells.get(int(row_ptr[i]) + pos)

    @property
    def cell_appends(self) -> int:
        return self.cells.appends

    # individual steps
    def allocate(self, position: int) -> int:
        """Put stream concept ``position`` into a fresh slot and enqueue it."""
        l = int(_allocate(self.ctx, self.pool, position))
        self.pool.queue[self.ctl[QLEN]] = l
        self.ctl[QLEN] += 1
        return l

    def _reserve_for(self, l: int) -> None:
        self.cells.reserve(int(self.pool.potential[l]))

    def cover_concept(self, l: int) -> int:
        self._reserve_for(l)
        return int(_cover_concept(self.ctx, self.pool, self.cells.store, l))

    def cover_incremental(self, l: int, best_coverage: int) -> int:
        self._reserve_for(l)
        return int(_cover_incremental(self.ctx, self.pool, self.cells.store, l, best_coverage))

    def cover(self, l: int, best_coverage: int) -> int:
        self._reserve_for(l)
        return int(_cover(self.ctx, self.pool, self.cells.store, l, best_coverage))

    def initialize_cells(self) -> None:
        """Give every uncovered one an (empty) entry."""
        self.ctl[INIT] = 1

    def load_concepts(self) -> int:
        while True:
            status = _load_concepts(self.ctx, self.pool, self.cells.store)
            if status == NEED_SPACE:
                self.cells.reserve(int(self.ctl[NEED]))
                continue
            if status == NOTHING_COVERS:
                raise IncompleteConceptsError("no remaining candidate covers an uncovered one")
            self.stream.position = int(self.ctl[POS])
            return int(self.ctl[BEST_SLOT])

    def uncover(self, position: int) -> int:
        """Mark the ones of stream concept ``position`` covered; returns how many were live."""
        return int(_uncover(self.ctx, self.pool, self.cells.store, position))

    def add_factor(self, position: int) -> int:
        gain = self.uncover(position)
        nf = self.ctl[NF]
        if nf < 2:
            self.ctl[F0 + nf] = position
        self.ctl[NF] = nf + 1
        self.factors.append(position)
        self.gains.append(gain)
        self.covered += gain
        return gain

    def select_first(self) -> int:
        """The first factor is simply the largest concept."""
        if self.ctl[POS] >= len(self.table):
            raise IncompleteConceptsError("empty concept stream")
        position = int(self.ctl[POS])
        self.ctl[POS] += 1
        self.stream.position = position + 1
        return self.add_factor(position)

    def step(self) -> int:
        """Find, record and uncover the next factor; returns its new coverage."""
        if self.ctl[NF] == 0:
            return self.select_first()
        if self.ctl[NF] == 3 and not self.ctl[INIT]:
            self.initialize_cells()
        l = self.load_concepts()
        expected = self.ctl[BEST_COV]
        gain = self.add_factor(int(self.pool.slot_concept[l]))
        if gain != expected:
            raise AssertionError(f"slot {l}: predicted coverage {expected}, uncovered {gain}")
        _reorder_queue(self.pool)
        return gain

    def run(self, epsilon: float = 1.0) -> Factorization:
        epsilon = check_epsilon(epsilon)
        start = time.perf_counter()
        total = self.I.ones_count
        need = required_coverage(total, epsilon)
        while self.covered < need:
            self.step()
        return Factorization(
            factors=[self.table[p] for p in self.factors],
            new_coverage=list(self.gains),
            total_ones=total,
            m=self.I.m,
            n=self.I.n,
            cell_appends=self.cells.appends,
            wall_ms=(time.perf_counter() - start) * 1e3,
            stats={"peak_slots": int(self.ctl[PEAK_SLOTS]), "peak_cell_entries": self.cells.peak},
        )


def grecon3_factorize(
    I: BooleanMatrix,
    stream: ConceptStream,
    epsilon: float = 1.0,
    small_threshold: int = DEFAULT_SMALL_THRESHOLD,
) -> Factorization:
    epsilon = check_epsilon(epsilon)
    start = time.perf_counter()
    result = GreCon3(I, stream, small_threshold).run(epsilon)
    result.wall_ms = (time.perf_counter() - start) * 1e3
    return result
