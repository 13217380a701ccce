"""Command-line interface: ``grecon factorize | concepts | bench``.

Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3 the
algorithm could not cover the matrix.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .bitmatrix import BooleanMatrix
from .concepts import canonical_stream, enumerate_concepts
from .factorization import Factorization, IncompleteConceptsError
from .grecon2 import grecon2_factorize
from .grecon3 import DEFAULT_SMALL_THRESHOLD, grecon3_factorize
from .grecond import grecond_factorize
from .io import DatasetFormatError, format_concept, load_matrix, write_factorization
from .oracle import naive_grecon
from .synthetic import random_matrix, seed_from_env, taxonomy_matrix

ALGORITHMS = ("grecond", "grecon2", "grecon3", "naive")
DEFAULT_EPSILONS = "0.75,0.8,0.85,0.9,0.95,1.0"

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INCOMPLETE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def run_algorithm(I: BooleanMatrix, algorithm: str, epsilon: float, small_threshold: int = DEFAULT_SMALL_THRESHOLD):
    """Run one algorithm end to end; returns ``(factorization, concept_count, total_ms)``.

    For the concept-based algorithms the time includes enumerating and
    sorting the concepts.
    """
    start = time.perf_counter()
    count = None
    if algorithm == "grecond":
        F = grecond_factorize(I, epsilon)
    elif algorithm == "naive":
        F = naive_grecon(I, epsilon)
    elif algorithm in ("grecon2", "grecon3"):
        table = enumerate_concepts(I)
        count = len(table)
        stream = canonical_stream(table)
        if algorithm == "grecon2":
            F = grecon2_factorize(I, stream, epsilon)
        else:
            F = grecon3_factorize(I, stream, epsilon, small_threshold)
    else:
        raise UsageError(f"unknown algorithm {algorithm!r}")
    return F, count, (time.perf_counter() - start) * 1e3


def _epsilon(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1], got {v}")
    return v


def _epsilons(text: str) -> list[float]:
    return [_epsilon(t) for t in text.split(",") if t.strip()]


def _algorithms(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    for a in names:
        if a not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
    return names


def _shape(text: str) -> tuple[int, int]:
    try:
        m, n = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MxN, got {text!r}") from None
    return m, n


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _add_input(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--input", required=required, help="dataset file")
    p.add_argument("--format", choices=("fimi", "dense"), default="fimi")
    p.add_argument("--index-base", type=int, choices=(0, 1), default=1, help="first item id in FIMI files")
    p.add_argument("--n-cols", type=int, default=None, help="declared attribute count for FIMI files")


def _load(args) -> BooleanMatrix:
    return load_matrix(args.input, args.format, index_base=args.index_base, n_cols=args.n_cols)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="grecon", description="From-below Boolean matrix factorization with formal concepts.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("factorize", help="factorize one dataset")
    _add_input(p)
    p.add_argument("--algorithm", choices=ALGORITHMS, default="grecon3")
    p.add_argument("--epsilon", type=_epsilon, default=1.0)
    p.add_argument("--small-threshold", type=_positive, default=DEFAULT_SMALL_THRESHOLD)
    p.add_argument("--output", help="write the factors here")
    p.add_argument("--output-format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("concepts", help="count formal concepts")
    _add_input(p)
    p.add_argument("--dump", help="write every concept, in enumeration order, one per line")
    p.set_defaults(func=cmd_concepts)

    p = sub.add_parser("bench", help="minimal-of-N timing over algorithms and epsilons")
    _add_input(p, required=False)
    p.add_argument("--synthetic", choices=("taxonomy", "random"), help="generate the input (seeded by BMF_SEED)")
    p.add_argument("--shape", type=_shape, default=(2000, 20), help="MxN for --synthetic random")
    p.add_argument("--density", type=float, default=0.4, help="density for --synthetic random")
    p.add_argument("--runs", type=_positive, default=5)
    p.add_argument("--epsilons", type=_epsilons, default=_epsilons(DEFAULT_EPSILONS))
    p.add_argument("--algorithms", type=_algorithms, default=["grecond", "grecon2", "grecon3"])
    p.add_argument("--small-threshold", type=_positive, default=DEFAULT_SMALL_THRESHOLD)
    p.add_argument("--json", dest="json_path", help="also write the JSON report here")
    p.set_defaults(func=cmd_bench)
    return parser


def summary(F: Factorization, algorithm: str, epsilon: float, I: BooleanMatrix, concept_count, wall_ms: float) -> dict:
    return {
        "algorithm": algorithm,
        "epsilon": epsilon,
        "m": I.m,
        "n": I.n,
        "ones": I.ones_count,
        "concept_count": concept_count,
        "k": F.k,
        "error": F.error,
        "coverage": F.coverage,
        "coverage_per_factor": [int(g) for g in F.new_coverage],
        "cell_appends": F.cell_appends,
        "peak_slots": F.stats.get("peak_slots"),
        "peak_cell_entries": F.stats.get("peak_cell_entries"),
        "wall_ms": round(wall_ms, 3),
    }


def cmd_factorize(args) -> int:
    I = _load(args)
    F, count, ms = run_algorithm(I, args.algorithm, args.epsilon, args.small_threshold)
    F.wall_ms = ms
    if args.output:
        write_factorization(F, args.output_format, args.output)
    print(json.dumps(summary(F, args.algorithm, args.epsilon, I, count, ms), sort_keys=True))
    return 0


def cmd_concepts(args) -> int:
    I = _load(args)
    table = enumerate_concepts(I)
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            for c in table:
                fh.write(format_concept(c) + "\n")
    print(json.dumps({"m": I.m, "n": I.n, "ones": I.ones_count, "concept_count": len(table)}, sort_keys=True))
    return 0


def _bench_input(args) -> tuple[BooleanMatrix, str]:
    if args.synthetic and args.input:
        raise UsageError("give either --input or --synthetic, not both")
    if args.synthetic == "taxonomy":
        return taxonomy_matrix(seed=seed_from_env()), f"taxonomy(seed={seed_from_env()})"
    if args.synthetic == "random":
        m, n = args.shape
        return random_matrix(m, n, args.density, seed=seed_from_env()), f"random({m}x{n},{args.density},seed={seed_from_env()})"
    if not args.input:
        raise UsageError("bench needs --input or --synthetic")
    return _load(args), args.input


def bench(I: BooleanMatrix, algorithms, epsilons, runs: int, small_threshold: int = DEFAULT_SMALL_THRESHOLD) -> list[dict]:
    rows = []
    for algorithm in algorithms:
        for eps in epsilons:
            best = None
            for _ in range(runs):
                F, count, ms = run_algorithm(I, algorithm, eps, small_threshold)
                if best is None or ms < best[2]:
                    best = (F, count, ms)
            F, count, ms = best
            rows.append(summary(F, algorithm, eps, I, count, ms))
    return rows


def format_table(rows: list[dict]) -> str:
    epsilons = sorted({r["epsilon"] for r in rows})
    algorithms = list(dict.fromkeys(r["algorithm"] for r in rows))
    cell = {(r["algorithm"], r["epsilon"]): r for r in rows}
    header = ["algorithm"] + [f"{e:g}" for e in epsilons]
    lines = [header]
    for a in algorithms:
        lines.append([a] + [f"{cell[a, e]['wall_ms']:,.1f}" if (a, e) in cell else "-" for e in epsilons])
    for a in algorithms:
        r = cell.get((a, max(epsilons)))
        if r and r["cell_appends"]:
            lines.append([f"{a} appends"] + [f"{cell[a, e]['cell_appends']:,}" if (a, e) in cell else "-" for e in epsilons])
    widths = [max(len(row[c]) for row in lines) for c in range(len(header))]
    out = []
    for row in lines:
        out.append("  ".join(row[0].ljust(widths[0]) if c == 0 else row[c].rjust(widths[c]) for c in range(len(row))))
    return "\n".join(out)


def cmd_bench(args) -> int:
    I, label = _bench_input(args)
    rows = bench(I, args.algorithms, args.epsilons, args.runs, args.small_threshold)
    report = {"input": label, "m": I.m, "n": I.n, "ones": I.ones_count, "runs": args.runs, "results": rows}
    print(format_table(rows))
    print(json.dumps(report, sort_keys=True))
    if args.json_path:
        with open(args.json_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"grecon: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, DatasetFormatError) as exc:
        print(f"grecon: {exc}", file=sys.stderr)
        return EXIT_IO
    except IncompleteConceptsError as exc:
        print(f"grecon: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE


if __name__ == "__main__":
    sys.exit(main())
