import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import EXAMPLE_A, EXAMPLE_B, EXAMPLE_I, SMALL, BLOCKS
from grecon.bitmatrix import (
    BooleanMatrix,
    ContractError,
    bool_product,
    down,
    leq,
    pack_bits,
    residual_error,
    unpack_bits,
    up,
)

A, B, C, D = range(4)


def matrices(max_m=10, max_n=10):
    shapes = st.tuples(st.integers(0, max_m), st.integers(0, max_n))
    return shapes.flatmap(lambda s: arrays(bool, s)).map(BooleanMatrix.from_dense)


def test_pack_roundtrip_crosses_word_boundary():
    rng = np.random.default_rng(0)
    dense = rng.random((7, 131)) < 0.5
    assert (unpack_bits(pack_bits(dense), 131) == dense).all()


def test_counts_and_density():
    assert SMALL.ones_count == 7
    assert SMALL.density == pytest.approx(7 / 12)
    assert SMALL.shape == (3, 4)
    assert BooleanMatrix.zeros(0, 3).density == 0.0


def test_csr_is_row_major():
    row_ptr, col_idx = SMALL.csr
    assert row_ptr.tolist() == [0, 3, 5, 7]
    assert col_idx.tolist() == [0, 2, 3, 1, 2, 2, 3]


def test_from_rows_checks_range():
    assert BooleanMatrix.from_rows([[0, 2, 3], [1, 2], [2, 3]], 4) == SMALL
    with pytest.raises(IndexError):
        BooleanMatrix.from_rows([[4]], 4)


def test_up_examples():
    assert up(SMALL, {0, 2}) == {C, D}
    assert up(SMALL, set()) == set(range(4))
    assert up(SMALL, {0, 1, 2}) == {C}


def test_down_examples():
    assert down(SMALL, {C, D}) == {0, 2}
    assert down(SMALL, set()) == {0, 1, 2}
    assert down(SMALL, {A, B, C, D}) == set()


def test_operator_index_errors():
    with pytest.raises(IndexError):
        up(SMALL, {3})
    with pytest.raises(IndexError):
        down(SMALL, {-1})


def test_product_of_example_factors():
    assert bool_product(EXAMPLE_A, EXAMPLE_B) == EXAMPLE_I


def test_identity_product():
    eye = BooleanMatrix.from_dense(np.eye(3, dtype=bool))
    b = BooleanMatrix.from_dense(np.array([[1, 0, 1, 1], [0, 0, 0, 0], [1, 1, 0, 0]], dtype=bool))
    assert bool_product(eye, b) == b


def test_product_is_union_of_rectangles():
    rng = np.random.default_rng(3)
    a = rng.random((6, 4)) < 0.5
    b = rng.random((4, 5)) < 0.5
    expected = np.zeros((6, 5), dtype=bool)
    for l in range(4):
        expected |= np.outer(a[:, l], b[l])
    assert bool_product(BooleanMatrix.from_dense(a), BooleanMatrix.from_dense(b)).to_dense().tolist() == expected.tolist()


def test_product_dimension_mismatch():
    with pytest.raises(ValueError):
        bool_product(EXAMPLE_A, EXAMPLE_I)


def test_residual_error_examples():
    assert residual_error(SMALL, SMALL) == 0
    assert residual_error(SMALL, BooleanMatrix.zeros(3, 4)) == 7


def test_residual_error_after_one_factor():
    # <{0,1,2},{a,b,c,d}> covers 12 of the 22 ones
    rect = np.zeros((5, 7), dtype=bool)
    rect[np.ix_([0, 1, 2], [0, 1, 2, 3])] = True
    assert BLOCKS.ones_count == 22
    assert residual_error(BLOCKS, BooleanMatrix.from_dense(rect)) == 10


def test_residual_error_contract():
    extra = SMALL.to_dense()
    extra[1, 0] = True
    with pytest.raises(ContractError):
        residual_error(SMALL, BooleanMatrix.from_dense(extra))
    with pytest.raises(ValueError):
        residual_error(SMALL, BooleanMatrix.zeros(4, 3))


def test_leq():
    extra = SMALL.to_dense()
    extra[1, 0] = True
    assert leq(SMALL, SMALL)
    assert leq(BooleanMatrix.zeros(3, 4), SMALL)
    assert not leq(BooleanMatrix.from_dense(extra), SMALL)


@settings(max_examples=150, deadline=None)
@given(matrices(), st.data())
def test_galois_connection(I, data):
    objs = st.sets(st.integers(0, max(I.m - 1, 0)), max_size=I.m) if I.m else st.just(set())
    c1 = data.draw(objs)
    c2 = c1 | data.draw(objs)
    assert up(I, c2) <= up(I, c1)
    assert c1 <= down(I, up(I, c1))
    assert up(I, down(I, up(I, c1))) == up(I, c1)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_dense_roundtrip(I):
    assert BooleanMatrix.from_dense(I.to_dense()) == I
    assert I.ones_count == int(I.to_dense().sum())
