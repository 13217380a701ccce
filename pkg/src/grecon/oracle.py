"""Slow reference implementations used as ground truth in tests.

Nothing here shares code with the production algorithms apart from the
canonical concept order, which both sides must agree on.
"""

from __future__ import annotations

from .bitmatrix import BooleanMatrix
from .concepts import FormalConcept, canonical_stream
from .factorization import Factorization, IncompleteConceptsError, check_epsilon, coverage_reached

__all__ = ["brute_force_concepts", "naive_grecon"]

MAX_BRUTE_FORCE_ATTRIBUTES = 20


def _int_rows(I: BooleanMatrix) -> list[int]:
    dense = I.to_dense()
    return [sum(1 << j for j in range(I.n) if dense[i, j]) for i in range(I.m)]


def _int_cols(I: BooleanMatrix) -> list[int]:
    dense = I.to_dense()
    return [sum(1 << i for i in range(I.m) if dense[i, j]) for j in range(I.n)]


def _members(mask: int) -> frozenset[int]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return frozenset(out)


def brute_force_concepts(I: BooleanMatrix) -> set[FormalConcept]:
    """Close every attribute subset; 2**n work, so n is capped at 20."""
    if I.n > MAX_BRUTE_FORCE_ATTRIBUTES:
        raise ValueError(f"brute force refuses n={I.n} > {MAX_BRUTE_FORCE_ATTRIBUTES}")
    cols = _int_cols(I)
    all_objects = (1 << I.m) - 1
    # extent of every subset D, built from D minus its lowest attribute
    extents = [all_objects] * (1 << I.n)
    for d in range(1, 1 << I.n):
        low = (d & -d).bit_length() - 1
        extents[d] = extents[d & (d - 1)] & cols[low]
    found: set[FormalConcept] = set()
    seen: set[int] = set()
    for ext in extents:
        if ext in seen:
            continue
        seen.add(ext)
        intent = [j for j in range(I.n) if ext & cols[j] == ext]
        found.add(FormalConcept(_members(ext), frozenset(intent)))
    return found


def naive_grecon(I: BooleanMatrix, epsilon: float = 1.0) -> Factorization:
    """Greedy set cover over all concepts, recomputing every coverage each step."""
    epsilon = check_epsilon(epsilon)
    if I.n <= MAX_BRUTE_FORCE_ATTRIBUTES:
        concepts = brute_force_concepts(I)
    else:
        from .concepts import enumerate_concepts

        concepts = enumerate_concepts(I).to_set()
    ordered = list(canonical_stream(concepts, I.m, I.n))
    residual = _int_rows(I)
    total = I.ones_count
    masks = [sum(1 << j for j in c.intent) for c in ordered]

    factors: list[FormalConcept] = []
    gains: list[int] = []
    covered = 0
    while not coverage_reached(covered, total, epsilon):
        best, best_gain = -1, 0
        for l, c in enumerate(ordered):
            gain = sum(bin(residual[i] & masks[l]).count("1") for i in c.extent)
            if gain > best_gain:
                best, best_gain = l, gain
        if best < 0:
            raise IncompleteConceptsError("no concept covers a remaining one")
        for i in ordered[best].extent:
            residual[i] &= ~masks[best]
        factors.append(ordered[best])
        gains.append(best_gain)
        covered += best_gain
    return Factorization(factors, gains, total, I.m, I.n)
