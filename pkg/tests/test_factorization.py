import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import SMALL
from grecon.factorization import Factorization, check_epsilon, coverage_reached, required_coverage
from grecon.oracle import naive_grecon
from grecon.synthetic import MUSHROOM_CARDINALITIES, random_matrix, seed_from_env, taxonomy_matrix


@given(st.integers(0, 10_000), st.floats(0.01, 1.0))
def test_required_coverage_is_minimal(total, eps):
    need = required_coverage(total, eps)
    assert coverage_reached(need, total, eps)
    if need > 0:
        assert not coverage_reached(need - 1, total, eps)


def test_epsilon_bounds():
    assert check_epsilon(1) == 1.0
    for bad in (0, -0.1, 1.01):
        with pytest.raises(ValueError):
            check_epsilon(bad)


def test_factor_matrices():
    F = naive_grecon(SMALL)
    a, b = F.factor_matrices()
    assert a.shape == (3, 3) and b.shape == (3, 4)
    assert F.reconstruction() == SMALL
    assert F.covered + F.error == F.total_ones


def test_empty_factorization():
    F = Factorization([], [], total_ones=0, m=2, n=2)
    assert F.coverage == 1.0 and F.k == 0
    assert F.reconstruction().ones_count == 0


def test_seed_from_env(monkeypatch):
    monkeypatch.delenv("BMF_SEED", raising=False)
    assert seed_from_env(5) == 5
    monkeypatch.setenv("BMF_SEED", "42")
    assert seed_from_env() == 42
    assert random_matrix(5, 5, 0.5) == random_matrix(5, 5, 0.5, seed=42)


def test_taxonomy_is_one_hot():
    I = taxonomy_matrix(m=300, seed=3)
    dense = I.to_dense()
    offsets = np.cumsum((0,) + MUSHROOM_CARDINALITIES)
    for a in range(len(MUSHROOM_CARDINALITIES)):
        assert (dense[:, offsets[a] : offsets[a + 1]].sum(axis=1) == 1).all()
    assert taxonomy_matrix(m=300, seed=3) == I
