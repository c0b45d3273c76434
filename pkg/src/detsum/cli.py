"""Command-line entry point: ``detsum solve | knapsack | bench | gen``.

Exit codes: 0 success, 1 the requested witness does not exist, 2 malformed
input or arguments, 3 an internal contract violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import sys
import time
from contextlib import contextmanager
from typing import Iterable, TextIO

from . import generators
from .bitmap import BACKENDS
from .errors import ContractViolation, DetsumError, MalformedInputError, NotAMemberError
from .knapsack import knapsack_all_capacities
from .oracle import bellman_witness, dp_knapsack
from .solver import Instance, SolverConfig, all_targets, dp_targets, kx_targets, reconstruct

EXIT_OK = 0
EXIT_NO_WITNESS = 1
EXIT_MALFORMED = 2
EXIT_CONTRACT = 3

# dp wins on CPython whenever t * n stays below this; calibrated by the scaling suite
AUTO_DP_THRESHOLD = 1 << 36

CSV_COLUMNS = ("algo", "n", "t", "u", "wall_ms", "conv_work", "peak_bytes", "checksum")


def read_values(stream: TextIO) -> list[int]:
    out = []
    for lineno, line in enumerate(stream, 1):
        text = line.strip()
        if not text:
            continue
        try:
            v = int(text)
        except ValueError:
            raise MalformedInputError(f"line {lineno}: not an integer: {text!r}") from None
        if v < 1:
            raise MalformedInputError(f"line {lineno}: elements must be positive, got {v}")
        out.append(v)
    return out


def read_items(stream: TextIO) -> list[tuple[int, int]]:
    out = []
    for lineno, line in enumerate(stream, 1):
        parts = line.split()
        if not parts:
            continue
        try:
            if len(parts) != 2:
                raise ValueError
            w, p = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedInputError(f"line {lineno}: expected 'weight profit', got {line.strip()!r}") from None
        if w < 1 or p < 1:
            raise MalformedInputError(f"line {lineno}: weight and profit must be positive")
        out.append((w, p))
    return out


def format_targets(values: Iterable[int], intervals: bool = False) -> str:
    values = list(values)
    if not intervals:
        return " ".join(map(str, values))
    runs = []
    for v in values:
        if runs and runs[-1][1] == v - 1:
            runs[-1][1] = v
        else:
            runs.append([v, v])
    return " ".join(str(a) if a == b else f"{a}-{b}" for a, b in runs)


def format_profile(entries: list) -> str:
    return " ".join("-" if e is None else str(e) for e in entries)


def choose_algo(algo: str, n: int, t: int, threshold: int = AUTO_DP_THRESHOLD) -> str:
    if algo != "auto":
        return algo
    return "dp" if n * t < threshold else "dnc"


def run_solver(instance: Instance, algo: str, backend: str = "auto", witness: bool = False):
    if algo == "dp":
        return dp_targets(instance)
    if algo == "kx":
        return kx_targets(instance, backend, witness=witness)
    if algo == "dnc":
        return all_targets(instance, SolverConfig(backend=backend, witness=witness))
    raise ValueError(f"unknown algorithm {algo!r}")


def witness_for(report, y: int):
    """Witness for ``y`` in ``report``'s answer; raises ``NotAMemberError`` if there is none."""
    if report.algorithm == "dp":
        inst = report.instance
        return bellman_witness(inst.values(), inst.t, y)
    return reconstruct(report, y)


@contextmanager
def _open_in(path: str):
    if path == "-":
        yield sys.stdin
    else:
        with open(path) as fh:
            yield fh


@contextmanager
def _open_out(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_solve(args) -> int:
    with _open_in(args.input) as fh:
        values = read_values(fh)
    instance = Instance.from_values(values, args.target)
    algo = choose_algo(args.algo, instance.n, instance.t, args.auto_threshold)
    wants = args.witness is not None
    report = run_solver(instance, algo, args.backend, witness=wants)
    line = format_targets(report.targets(), args.intervals)
    if not wants or args.out is not None:
        with _open_out(args.out) as out:
            out.write(line + "\n")
    if wants:
        try:
            w = witness_for(report, args.witness)
        except NotAMemberError:
            print(f"{args.witness}: none")
            return EXIT_NO_WITNESS
        print(f"{args.witness}: " + " ".join(map(str, w.values())))
    return EXIT_OK


def cmd_knapsack(args) -> int:
    with _open_in(args.input) as fh:
        items = read_items(fh)
    if args.capacity < 0:
        raise MalformedInputError("capacity must be non-negative")
    if args.algo == "dp":
        f = dp_knapsack(items, args.capacity)
    else:
        f = knapsack_all_capacities(items, args.capacity).profile
    if args.prefix_max:
        f = f.prefix_max()
    with _open_out(args.out) as out:
        out.write(format_profile(f.to_list()) + "\n")
    return EXIT_OK


def profile_checksum(entries: list) -> str:
    data = format_profile(entries).encode()
    return hashlib.blake2b(data, digest_size=8).hexdigest()


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, (time.perf_counter() - start) * 1000.0


def _record(algo, n, t, u, wall_ms, counters, checksum, timing: bool) -> dict:
    return {
        "algo": algo, "n": n, "t": t, "u": u,
        "wall_ms": f"{wall_ms:.3f}" if timing else "0",
        "conv_work": counters.conv_work + counters.maxplus_work if counters else 0,
        "peak_bytes": counters.peak_bytes if counters else (t + 1 + 7) // 8,
        "checksum": checksum,
    }


def bench_equiv(sizes, t, count, seed, kind, backend, timing):
    rows = []
    for j in range(count):
        n = sizes[j % len(sizes)]
        values = generators.generate(kind, n, t, seed + j)
        instance = Instance.from_values(values, t)
        sums = set()
        for algo in ("dp", "kx", "dnc"):
            report, ms = _timed(lambda: run_solver(instance, algo, backend))
            sums.add(report.answer.checksum())
            counters = None if algo == "dp" else report.counters
            rows.append(_record(algo, n, t, max(values, default=0), ms, counters,
                                report.answer.checksum(), timing))
        if len(sums) != 1:
            raise ContractViolation(f"checksum mismatch on instance seed={seed + j}")
    return rows


def bench_scaling(sizes, n, seed, kind, backend, timing):
    rows = []
    for t in sizes:
        values = generators.generate(kind, n, t, seed)
        instance = Instance.from_values(values, t)
        report, ms = _timed(lambda: run_solver(instance, "dnc", backend))
        rows.append(_record("dnc", n, t, max(values, default=0), ms, report.counters,
                            report.answer.checksum(), timing))
    return rows


def bench_knapsack(sizes, t, count, seed, kind, timing):
    rows = []
    for j in range(count):
        n = sizes[j % len(sizes)]
        items = generators.knapsack_items(kind, n, t, seed + j)
        u = max((w for w, _ in items), default=0)
        f, ms = _timed(lambda: dp_knapsack(items, t))
        ref = profile_checksum(f.to_list())
        rows.append(_record("dp", n, t, u, ms, None, ref, timing))
        rep, ms = _timed(lambda: knapsack_all_capacities(items, t))
        got = profile_checksum(rep.profile.to_list())
        rows.append(_record("reduction", n, t, u, ms, rep.counters, got, timing))
        if got != ref:
            raise ContractViolation(f"knapsack mismatch on instance seed={seed + j}")
    return rows


def cmd_bench(args) -> int:
    sizes = args.sizes
    timing = not args.no_timing
    if args.suite == "equiv":
        rows = bench_equiv(sizes or [16, 32, 64], args.t, args.count, args.seed, args.gen,
                           args.backend, timing)
    elif args.suite == "scaling":
        rows = bench_scaling(sizes or [1 << e for e in range(14, 19)], args.n, args.seed,
                             args.gen, args.backend, timing)
    else:
        rows = bench_knapsack(sizes or [16, 32, 64], args.t, args.count, args.seed, args.gen, timing)
    with _open_out(args.csv) as out:
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return EXIT_OK


def cmd_gen(args) -> int:
    with _open_out(args.out) as out:
        if args.knapsack:
            for w, p in generators.knapsack_items(args.kind, args.n, args.t, args.seed):
                out.write(f"{w} {p}\n")
        else:
            for v in generators.generate(args.kind, args.n, args.t, args.seed):
                out.write(f"{v}\n")
    return EXIT_OK


def parse_size(text: str) -> int:
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base) ** int(exp)
    return int(text)


def parse_sizes(text: str) -> list[int]:
    try:
        return [parse_size(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="detsum", description="Deterministic all-targets subset sum.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="all achievable targets up to T")
    p.add_argument("input", nargs="?", default="-", help="one positive integer per line (default stdin)")
    p.add_argument("--target", "-t", type=int, required=True)
    p.add_argument("--algo", choices=("dp", "kx", "dnc", "auto"), default="auto")
    p.add_argument("--witness", type=int, default=None, metavar="Y")
    p.add_argument("--out", default=None)
    p.add_argument("--intervals", action="store_true", help="print maximal runs as lo-hi")
    p.add_argument("--backend", choices=BACKENDS, default="auto")
    p.add_argument("--auto-threshold", type=int, default=AUTO_DP_THRESHOLD,
                   help="auto picks dp while n*t is below this")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("knapsack", help="best profit for every exact weight up to T")
    p.add_argument("input", nargs="?", default="-", help="one 'weight profit' pair per line")
    p.add_argument("--capacity", "-t", type=int, required=True)
    p.add_argument("--algo", choices=("dp", "reduction"), default="reduction")
    p.add_argument("--prefix-max", action="store_true", help="report best profit with weight at most w")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_knapsack)

    p = sub.add_parser("bench", help="seeded benchmark suites, CSV output")
    p.add_argument("--suite", choices=("equiv", "scaling", "knapsack"), required=True)
    p.add_argument("--sizes", type=parse_sizes, default=None,
                   help="comma list; n values for equiv/knapsack, t values for scaling (2^k allowed)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--t", type=int, default=1024)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--gen", choices=generators.KINDS, default="uniform")
    p.add_argument("--backend", choices=BACKENDS, default="auto")
    p.add_argument("--csv", default=None)
    p.add_argument("--no-timing", action="store_true", help="write wall_ms as 0 for byte-stable output")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write a seeded instance")
    p.add_argument("--kind", choices=generators.KINDS, default="uniform")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--knapsack", action="store_true", help="emit 'weight profit' lines")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MalformedInputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (ContractViolation, DetsumError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
