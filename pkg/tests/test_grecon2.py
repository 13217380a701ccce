import numpy as np
import pytest

from conftest import SMALL, SMALL_CONCEPTS, random_corpus
from grecon.bitmatrix import BooleanMatrix
from grecon.concepts import ConceptTable, canonical_stream, enumerate_concepts
from grecon.factorization import IncompleteConceptsError
from grecon.grecon2 import GreCon2State, grecon2_factorize
from grecon.oracle import naive_grecon

A, B, C, D = range(4)


@pytest.fixture
def small_state():
    return GreCon2State(SMALL, ConceptTable.from_concepts(SMALL_CONCEPTS, 3, 4))


def test_initial_covers(small_state):
    assert small_state.covers.tolist() == [3, 3, 0, 2, 4]


def test_initial_cells(small_state):
    assert small_state.cell(0, C) == [0, 1, 4]
    assert small_state.cell(0, A) == [1]
    assert small_state.cell(2, D) == [4]
    assert small_state.cell(1, A) == []
    # every one is listed, zeros never
    for i in range(3):
        for j in range(4):
            assert bool(small_state.cell(i, j)) == SMALL[i, j]


def test_covers_match_cell_lists(small_state):
    counts = np.zeros(5, dtype=int)
    for i in range(3):
        for j in range(4):
            for l in small_state.cell(i, j):
                counts[l] += 1
    assert counts.tolist() == small_state.covers.tolist()


def test_small_matches_oracle():
    F = grecon2_factorize(SMALL, canonical_stream(enumerate_concepts(SMALL)), 1.0)
    oracle = naive_grecon(SMALL, 1.0)
    assert F.factors == oracle.factors
    assert F.new_coverage == [4, 2, 1]
    # every (concept, one) pair of the non-empty concepts
    assert F.cell_appends == 12


def test_incomplete_stream():
    partial = canonical_stream([SMALL_CONCEPTS[4]], 3, 4)
    with pytest.raises(IncompleteConceptsError):
        grecon2_factorize(SMALL, partial, 1.0)
    # a partial stream is fine if epsilon is within reach
    F = grecon2_factorize(SMALL, canonical_stream([SMALL_CONCEPTS[4]], 3, 4), 0.5)
    assert F.new_coverage == [4]


def test_zero_matrix():
    I = BooleanMatrix.zeros(3, 2)
    F = grecon2_factorize(I, canonical_stream(enumerate_concepts(I)), 1.0)
    assert F.k == 0 and F.error == 0


def test_equivalence_with_oracle():
    for I in random_corpus(size=80, seed=21):
        table = enumerate_concepts(I)
        for eps in (0.75, 1.0):
            F = grecon2_factorize(I, canonical_stream(table), eps)
            G = naive_grecon(I, eps)
            assert F.factors == G.factors and F.new_coverage == G.new_coverage
