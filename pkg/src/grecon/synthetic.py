"""Synthetic inputs for benchmarking when the public datasets are not at hand."""

from __future__ import annotations

import os

import numpy as np

from .bitmatrix import BooleanMatrix

# value counts of the 21 nominal attributes (119 binary columns, one value per
# attribute per row), the shape of the binarized UCI mushroom table
MUSHROOM_CARDINALITIES = (6, 4, 10, 2, 9, 2, 2, 2, 12, 2, 5, 4, 4, 9, 9, 4, 3, 5, 9, 6, 10)


def seed_from_env(default: int = 0) -> int:
    """Seed for synthetic data, overridable through ``BMF_SEED``."""
    raw = os.environ.get("BMF_SEED")
    return int(raw) if raw not in (None, "") else default


def random_matrix(m: int, n: int, density: float, seed: int | None = None) -> BooleanMatrix:
    rng = np.random.default_rng(seed_from_env() if seed is None else seed)
    return BooleanMatrix.from_dense(rng.random((m, n)) < density)


def taxonomy_matrix(
    m: int = 8124,
    cardinalities=MUSHROOM_CARDINALITIES,
    branching=(3, 4, 4),
    free: int = 2,
    noise: float = 0.001,
    seed: int | None = None,
) -> BooleanMatrix:
    """One-hot nominal table whose values follow a random taxonomy.

    Each row is a random leaf of a tree with the given ``branching``.  Every
    attribute except the last ``free`` ones is fixed at one tree level (its
    value depends only on the row's ancestor at that level); the free
    attributes are uniform.  Each value is then resampled with probability
    ``noise``.  Exactly one column per attribute is set, so the density is
    ``len(cardinalities) / sum(cardinalities)``; with the defaults this gives
    a mushroom-sized context (8124 x 119, 17.65% ones, ~1.3e5 concepts).
    """
    rng = np.random.default_rng(seed_from_env() if seed is None else seed)
    cards = np.asarray(cardinalities, dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(cards)[:-1]))
    n_attr = len(cards)
    depth = len(branching)
    level = rng.integers(0, depth, size=n_attr)
    level[n_attr - free :] = depth
    leaf = rng.integers(0, int(np.prod(branching)), size=m)
    values = np.zeros((m, n_attr), dtype=np.int64)
    for a in range(n_attr):
        if level[a] == depth:
            values[:, a] = rng.integers(0, cards[a], size=m)
            continue
        below = int(np.prod(branching[level[a] + 1 :]))
        nodes = int(np.prod(branching[: level[a] + 1]))
        table = rng.integers(0, cards[a], size=nodes)
        values[:, a] = table[leaf // below]
    flip = rng.random(values.shape) < noise
    values = np.where(flip, rng.integers(0, 1 << 30, size=values.shape) % cards, values)
    dense = np.zeros((m, int(cards.sum())), dtype=bool)
    dense[np.arange(m)[:, None], offsets + values] = True
    return BooleanMatrix.from_dense(dense)
