import numpy as np
import pytest

from grecon.bitmatrix import BooleanMatrix
from grecon.concepts import FormalConcept

A, B, C, D, E, F, G = range(7)

SMALL = BooleanMatrix.from_dense(
    np.array(
        [
            [1, 0, 1, 1],
            [0, 1, 1, 0],
            [0, 0, 1, 1],
        ],
        dtype=bool,
    )
)

# three-factor example: I = A o B
EXAMPLE_I = BooleanMatrix.from_dense(
    np.array(
        [
            [1, 1, 1, 0, 0, 0],
            [1, 1, 1, 0, 0, 0],
            [0, 1, 1, 1, 1, 0],
            [0, 1, 1, 1, 1, 1],
            [0, 0, 1, 1, 0, 1],
        ],
        dtype=bool,
    )
)
EXAMPLE_A = BooleanMatrix.from_dense(
    np.array([[1, 0, 0], [1, 0, 0], [0, 1, 0], [0, 1, 1], [0, 0, 1]], dtype=bool)
)
EXAMPLE_B = BooleanMatrix.from_dense(
    np.array([[1, 1, 1, 0, 0, 0], [0, 1, 1, 1, 1, 0], [0, 0, 1, 1, 0, 1]], dtype=bool)
)

BLOCKS = BooleanMatrix.from_dense(
    np.array(
        [
            [1, 1, 1, 1, 0, 0, 0],
            [1, 1, 1, 1, 0, 0, 0],
            [1, 1, 1, 1, 1, 1, 1],
            [0, 0, 1, 1, 1, 1, 1],
            [0, 0, 1, 1, 0, 0, 0],
        ],
        dtype=bool,
    )
)
C1 = FormalConcept.of({0, 1, 2}, {A, B, C, D})
C2 = FormalConcept.of({2, 3}, {C, D, E, F, G})
C3 = FormalConcept.of({0, 1, 2, 3, 4}, {C, D})
C4 = FormalConcept.of({2}, {A, B, C, D, E, F, G})

# concepts of SMALL in enumeration order
SMALL_CONCEPTS = [
    FormalConcept.of({0, 1, 2}, {C}),
    FormalConcept.of({0}, {A, C, D}),
    FormalConcept.of(set(), {A, B, C, D}),
    FormalConcept.of({1}, {B, C}),
    FormalConcept.of({0, 2}, {C, D}),
]

CORPUS_SEED = 20240611
CORPUS_SIZE = 240
CORPUS_DENSITIES = (0.2, 0.35, 0.5)


def random_corpus(size=CORPUS_SIZE, max_dim=12, seed=CORPUS_SEED):
    """Deterministic list of random matrices, cycling through the densities."""
    rng = np.random.default_rng(seed)
    out = []
    for t in range(size):
        m, n = rng.integers(1, max_dim + 1, size=2)
        density = CORPUS_DENSITIES[t % len(CORPUS_DENSITIES)]
        out.append(BooleanMatrix.from_dense(rng.random((m, n)) < density))
    return out


@pytest.fixture(scope="session")
def corpus():
    return random_corpus()


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
