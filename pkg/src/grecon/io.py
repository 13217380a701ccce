"""Reading datasets and writing factorizations and concept dumps."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .bitmatrix import BooleanMatrix
from .concepts import FormalConcept
from .factorization import Factorization

__all__ = [
    "DatasetFormatError",
    "DatasetMeta",
    "REFERENCE_DATASETS",
    "format_concept",
    "load_dense",
    "load_fimi",
    "load_matrix",
    "write_concepts",
    "write_dense",
    "write_factorization",
]


class DatasetFormatError(ValueError):
    """The file content does not follow the expected format."""


@dataclass(frozen=True)
class DatasetMeta:
    name: str
    m: int
    n: int
    density_percent: float
    ones: int
    concepts: int | None = None

    @classmethod
    def of(cls, name: str, I: BooleanMatrix, concepts: int | None = None) -> "DatasetMeta":
        return cls(name, I.m, I.n, 100.0 * I.density, I.ones_count, concepts)

    def matches(self, other: "DatasetMeta", tol: float = 0.01) -> bool:
        """Same dimensions and density within ``tol`` percentage points."""
        return self.m == other.m and self.n == other.n and abs(self.density_percent - other.density_percent) <= tol


def _ref(name, m, n, density, concepts):
    return DatasetMeta(name, m, n, density, round(m * n * density / 100), concepts)


# published characteristics of the usual benchmark datasets; ones are
# reconstructed from the rounded density, so compare on density
REFERENCE_DATASETS = {
    d.name: d
    for d in (
        _ref("advertisement", 3279, 1557, 0.88, 9192),
        _ref("americas_large", 10127, 3485, 52.50, 36992),
        _ref("americas_small", 3477, 1587, 1.91, 2764),
        _ref("apj", 2044, 1164, 0.29, 798),
        _ref("customer", 10961, 277, 1.50, 47848),
        _ref("dna", 4590, 392, 1.47, 4483),
        _ref("mushroom", 8124, 119, 17.65, 221525),
        _ref("nfs", 12841, 4894, 89.82, 24303286),
        _ref("T10I4D100K", 100000, 1000, 1.01, 2347376),
        _ref("ord5bike_day", 731, 58, 35.18, 81277),
        _ref("nom20magic", 19020, 202, 5.45, 1376212),
        _ref("nom15magic", 19020, 152, 7.24, 1149717),
        _ref("inter6shuttle", 43500, 106, 43.44, 381636),
        _ref("inter10crx", 653, 139, 44.10, 10199818),
    )
}


def _lines(path) -> list[str]:
    with open(path, "r", encoding="utf-8", newline=None) as fh:
        text = fh.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def load_fimi(path, index_base: int = 1, n_cols: int | None = None) -> BooleanMatrix:
    """One transaction per line, whitespace separated item ids.

    ``index_base`` is 1 for the usual repository files; ``n_cols`` declares
    the attribute count when the largest ids never occur.
    """
    if index_base not in (0, 1):
        raise ValueError("index_base must be 0 or 1")
    lines = _lines(path)
    if not lines:
        raise DatasetFormatError(f"{path}: empty file")
    rows = []
    top = -1
    for lineno, line in enumerate(lines, 1):
        items = []
        for tok in line.split():
            try:
                v = int(tok)
            except ValueError:
                raise DatasetFormatError(f"{path}:{lineno}: not an item id: {tok!r}") from None
            v -= index_base
            if v < 0:
                raise DatasetFormatError(f"{path}:{lineno}: item id {tok} below index base {index_base}")
            items.append(v)
            top = max(top, v)
        rows.append(items)
    n = top + 1
    if n_cols is not None:
        if n_cols < n:
            raise DatasetFormatError(f"{path}: item id {top + index_base} exceeds declared {n_cols} attributes")
        n = n_cols
    return BooleanMatrix.from_rows(rows, n)


def load_dense(path) -> BooleanMatrix:
    """Rows of 0/1 characters, optionally separated by spaces or commas."""
    lines = _lines(path)
    rows = []
    for lineno, line in enumerate(lines, 1):
        cells = line.replace(",", " ").split()
        if len(cells) == 1:
            cells = list(cells[0])
        if any(c not in ("0", "1") for c in cells):
            raise DatasetFormatError(f"{path}:{lineno}: expected only 0 and 1")
        if rows and len(cells) != len(rows[0]):
            raise DatasetFormatError(f"{path}:{lineno}: row has {len(cells)} entries, expected {len(rows[0])}")
        rows.append([c == "1" for c in cells])
    if not rows:
        raise DatasetFormatError(f"{path}: empty file")
    return BooleanMatrix.from_dense(np.array(rows, dtype=bool).reshape(len(rows), len(rows[0])))


def load_matrix(path, fmt: str = "fimi", index_base: int = 1, n_cols: int | None = None) -> BooleanMatrix:
    if fmt == "fimi":
        return load_fimi(path, index_base=index_base, n_cols=n_cols)
    if fmt == "dense":
        return load_dense(path)
    raise ValueError(f"unknown format {fmt!r}")


def write_dense(I: BooleanMatrix, path) -> None:
    dense = I.to_dense()
    with open(path, "w", encoding="utf-8") as fh:
        for row in dense:
            fh.write("".join("1" if v else "0" for v in row) + "\n")


def format_concept(c: FormalConcept) -> str:
    ext = " ".join(map(str, sorted(c.extent)))
    itn = " ".join(map(str, sorted(c.intent)))
    return f"{ext} | {itn}"


def write_concepts(concepts: Iterable[FormalConcept], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in concepts:
            fh.write(format_concept(c) + "\n")


def factorization_record(F: Factorization) -> dict:
    return {
        "k": F.k,
        "error": F.error,
        "total_ones": F.total_ones,
        "coverage_per_factor": [int(g) for g in F.new_coverage],
        "factors": [{"extent": sorted(f.extent), "intent": sorted(f.intent)} for f in F.factors],
        "wall_ms": F.wall_ms,
        "cell_appends": F.cell_appends,
    }


def write_factorization(F: Factorization, fmt: str = "text", path=None) -> str:
    """Serialize ``F``; writes to ``path`` when given and returns the text."""
    if fmt == "text":
        text = "".join(format_concept(f) + "\n" for f in F.factors)
    elif fmt == "json":
        text = json.dumps(factorization_record(F), indent=2) + "\n"
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    if path is not None:
        with open(os.fspath(path), "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
