"""The result type shared by every factorization algorithm."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bitmatrix import BooleanMatrix, bool_product
from .concepts import FormalConcept

__all__ = ["Factorization", "IncompleteConceptsError", "coverage_reached", "required_coverage"]


class IncompleteConceptsError(RuntimeError):
    """The candidate concepts cannot cover the remaining ones."""


def coverage_reached(covered: int, total: int, epsilon: float) -> bool:
    """Stopping rule shared by all algorithms: covered / total >= epsilon."""
    if total == 0:
        return True
    return covered / total >= epsilon


def required_coverage(total: int, epsilon: float) -> int:
    """Smallest covered count that satisfies :func:`coverage_reached`."""
    if total == 0:
        return 0
    need = min(total, max(0, math.ceil(epsilon * total)))
    while need > 0 and coverage_reached(need - 1, total, epsilon):
        need -= 1
    while not coverage_reached(need, total, epsilon):
        need += 1
    return need


def check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    return epsilon


@dataclass
class Factorization:
    """Ordered factor concepts with the number of ones each newly covered.

    ``stats`` carries algorithm-specific instrumentation (peak pool sizes and
    the like); ``cell_appends`` counts index appends into cell lists.
    """

    factors: list[FormalConcept]
    new_coverage: list[int]
    total_ones: int
    m: int
    n: int
    cell_appends: int = 0
    wall_ms: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def covered(self) -> int:
        return int(sum(self.new_coverage))

    @property
    def error(self) -> int:
        return self.total_ones - self.covered

    @property
    def coverage(self) -> float:
        return 1.0 if self.total_ones == 0 else self.covered / self.total_ones

    def factor_matrices(self) -> tuple[BooleanMatrix, BooleanMatrix]:
        """The object-factor matrix A_F (m x k) and factor-attribute matrix B_F (k x n)."""
        a = np.zeros((self.m, self.k), dtype=bool)
        b = np.zeros((self.k, self.n), dtype=bool)
        for l, f in enumerate(self.factors):
            a[sorted(f.extent), l] = True
            b[l, sorted(f.intent)] = True
        return BooleanMatrix.from_dense(a), BooleanMatrix.from_dense(b)

    def reconstruction(self) -> BooleanMatrix:
        a, b = self.factor_matrices()
        return bool_product(a, b)
