"""All-targets subset sum by halver-driven divide and conquer.

Elements are bucketed by scale, ``X_i = X ∩ (t/2^i, t/2^(i-1)]``; a subset of
``X_i`` that sums to at most ``t`` has fewer than ``2^i`` elements, so each
bucket only needs ``Σ_{<=2^i}(X_i)``. That is computed by :func:`dnc_sums`,
which splits the bucket with a halver, recurses on both halves with a smaller
cardinality bound and convolves the two answers.

``halver="certified"`` (the default) only splits when the halver's reported
Δ provably satisfies ``Δ <= k / log2(k)``; otherwise the node is solved
directly from layered sums. ``halver="forced"`` always splits with a fixed
``b``. It is still sound (every reported sum is achievable) but completeness
is then not guaranteed; it exists to exercise the recursion on small inputs.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .bitmap import SumsetBitmap, ValueWindow, bool_convolve, witness_search
from .counters import WorkCounters, counting
from .errors import (
    ContractViolation,
    ElementRangeError,
    NotInAnswerError,
    WitnessModeOffError,
)
from .halver import build_halver, halver_target, predicted_delta
from .kx import RETAIN_TREE, ROOT_ONLY, BoolAlgebra, build_tree, layer_union, next_pow2, report_subset
from .oracle import Witness, bellman_dp

HALVER_MODES = ("certified", "forced")


@dataclass
class SolverConfig:
    backend: str = "auto"
    halver: str = "certified"
    forced_b: int = 4
    base_threshold: int = 8
    witness: bool = False

    def __post_init__(self):
        if self.halver not in HALVER_MODES:
            raise ValueError(f"unknown halver mode {self.halver!r}")
        # singleton canonical sets carry no balancing information
        if self.forced_b < 2:
            raise ValueError("forced_b must be at least 2")
        if self.base_threshold < 8:
            raise ValueError("base_threshold below 8 breaks the shrinking child bound")


@dataclass
class Instance:
    """Multiset of positive integers with a target cap; values above ``t`` are dropped."""

    elements: Counter
    t: int
    discarded: int = 0

    @classmethod
    def from_values(cls, values: Iterable[int], t: int) -> "Instance":
        if t < 0:
            raise ValueError("t must be non-negative")
        kept, dropped = Counter(), 0
        for v in values:
            v = int(v)
            if v < 1:
                raise ElementRangeError(f"elements must be positive, got {v}")
            if v > t:
                dropped += 1
            else:
                kept[v] += 1
        return cls(kept, t, dropped)

    @property
    def n(self) -> int:
        return sum(self.elements.values())

    def values(self) -> list[int]:
        return sorted(self.elements.elements())


@dataclass
class _Base:
    values: list
    root: object


@dataclass
class _Split:
    left: object
    right: object
    left_ans: SumsetBitmap
    right_ans: SumsetBitmap


@dataclass
class SolveReport:
    answer: SumsetBitmap
    algorithm: str
    instance: Instance
    counters: WorkCounters = field(default_factory=WorkCounters)
    buckets: list = field(default_factory=list)
    certified: bool = True
    # witness mode: per-bucket traces and the running prefix sumsets
    trace: list | None = None
    prefixes: list | None = None
    parts: list | None = None

    def __contains__(self, y: int) -> bool:
        return y in self.answer

    def targets(self) -> list[int]:
        return self.answer.values()


def _select_b(k: int, u: int, values: list[int]) -> int | None:
    """Smallest power-of-two ``b <= k`` whose predicted Δ meets ``k / log2 k``."""
    copies = max(Counter(values).values(), default=1)
    target = halver_target(k)
    b = 1
    while b <= k:
        if predicted_delta(k, b, u, len(values), copies) <= target:
            return b
        b *= 2
    return None


def child_bound(k: int) -> int:
    return math.ceil(k / 2 + k / math.log2(k))


class _DnC:
    def __init__(self, u: int, cap: int, config: SolverConfig, counters: WorkCounters):
        self.u = u
        self.cap = cap
        self.config = config
        self.counters = counters
        self.certified = True

    def solve(self, values: list[int], k: int, level: int):
        k = min(k, len(values))
        self.counters.recursion_depth = max(self.counters.recursion_depth, level)
        cfg = self.config
        b = None
        if k > cfg.base_threshold:
            if cfg.halver == "certified":
                b = _select_b(k, self.u, values)
            else:
                b = min(cfg.forced_b, k)
        if b is None or k <= b:
            return self._base(values, k)

        halver = build_halver(values, k, b, self.u, self.cap, backend=cfg.backend)
        self.counters.b_values.append(b)
        if halver.delta > halver_target(k):
            if cfg.halver == "certified":
                raise ContractViolation(f"halver delta {halver.delta} above k/log k for k={k}")
            self.certified = False
        k2 = child_bound(k)
        if k2 >= k:
            raise ContractViolation(f"child bound {k2} does not shrink k={k}")
        left = [values[j] for j in halver.left()]
        right = [values[j] for j in halver.right()]
        ans1, tr1 = self.solve(left, k2, level + 1)
        ans2, tr2 = self.solve(right, k2, level + 1)
        ans = bool_convolve(ans1, ans2, ValueWindow(0, self.cap), cfg.backend)
        trace = _Split(tr1, tr2, ans1, ans2) if cfg.witness else None
        return ans, trace

    def _base(self, values: list[int], k: int):
        mode = RETAIN_TREE if self.config.witness else ROOT_ONLY
        root = build_tree([(j, x, None) for j, x in enumerate(values)], k, next_pow2(self.u),
                          self.cap, BoolAlgebra(self.config.backend), mode)
        ans = layer_union(root, self.cap)
        return ans, (_Base(values, root) if self.config.witness else None)


def dnc_sums(X: Iterable[int], k: int, u: int | None = None, cap: int | None = None,
             config: SolverConfig | None = None) -> SumsetBitmap:
    """A set ``ANS`` over ``[0, cap]`` with ``Σ_{<=k}(X) ⊆ ANS ⊆ Σ(X)`` (below ``cap``).

    ``cap`` defaults to ``k * u``.
    """
    X = list(X)
    u = max(X, default=1) if u is None else u
    for x in X:
        if not 1 <= x <= u:
            raise ElementRangeError(f"element {x} outside [1, {u}]")
    cap = k * u if cap is None else cap
    config = config or SolverConfig()
    work = WorkCounters()
    with counting(work):
        ans, _ = _DnC(u, cap, config, work).solve(sorted(X), k, 0)
    return ans


def bucket_index(v: int, t: int) -> int:
    """The ``i >= 1`` with ``t / 2^i < v <= t / 2^(i-1)``."""
    i = 1
    while v << i <= t:
        i += 1
    return i


def all_targets(instance: Instance, config: SolverConfig | None = None) -> SolveReport:
    """Exact ``Σ(X) ∩ [0, t]``."""
    config = config or SolverConfig()
    t = instance.t
    work = WorkCounters()
    buckets: dict[int, list[int]] = {}
    for v in instance.values():
        buckets.setdefault(bucket_index(v, t), []).append(v)
    answer = SumsetBitmap(0, t, 1)
    certified = True
    trace, prefixes, parts = ([], [answer], []) if config.witness else (None, None, None)
    info = []
    with counting(work):
        for i in sorted(buckets):
            vals = buckets[i]
            u = -(-t // (1 << (i - 1)))
            dnc = _DnC(u, t, config, work)
            part, tr = dnc.solve(vals, 1 << i, 0)
            certified &= dnc.certified
            answer = bool_convolve(answer, part, ValueWindow(0, t), config.backend)
            info.append({"bucket": i, "n": len(vals), "u": u, "k": min(1 << i, len(vals))})
            if config.witness:
                trace.append(tr)
                parts.append(part)
                prefixes.append(answer)
    if not answer.bits & 1:
        raise ContractViolation("empty sum missing from the answer")
    return SolveReport(answer, "dnc", instance, work, info, certified, trace, prefixes, parts)


def decide(instance: Instance, config: SolverConfig | None = None) -> bool:
    return instance.t in all_targets(instance, config).answer


def _unwind(trace, y: int) -> list[int]:
    out = []
    stack = [(trace, y)]
    while stack:
        node, y = stack.pop()
        if isinstance(node, _Split):
            a, b = witness_search(node.left_ans, node.right_ans, y)
            stack.append((node.right, b))
            stack.append((node.left, a))
            continue
        layers = node.root.layers
        i = next(j for j in range(len(layers)) if y in layers[j])
        out.extend(node.values[e] for e in report_subset(node.root, i, y))
    return out


def reconstruct(report: SolveReport, y: int) -> Witness:
    """A validated sub-multiset of the input summing to ``y``."""
    if report.trace is None:
        raise WitnessModeOffError("solve with SolverConfig(witness=True) to reconstruct subsets")
    if y not in report.answer:
        raise NotInAnswerError(f"{y} is not an achievable target")
    chosen = []
    rest = y
    for j in range(len(report.trace), 0, -1):
        rest, part = witness_search(report.prefixes[j - 1], report.parts[j - 1], rest)
        chosen.extend(_unwind(report.trace[j - 1], part))
    if rest != 0:
        raise ContractViolation(f"reconstruction left {rest} unexplained")
    witness = Witness.from_values(chosen)
    witness.validate(report.instance.elements, y)
    return witness


def dp_targets(instance: Instance) -> SolveReport:
    return SolveReport(bellman_dp(instance.values(), instance.t), "dp", instance)


def max_fitting(values: list[int], t: int) -> int:
    """Largest number of elements whose smallest-possible sum stays within ``t``."""
    total = count = 0
    for v in sorted(values):
        if total + v > t:
            break
        total += v
        count += 1
    return count


def kx_targets(instance: Instance, backend: str = "auto", witness: bool = False) -> SolveReport:
    """``Σ(X) ∩ [0, t]`` straight from layered sums over the whole input."""
    t = instance.t
    values = instance.values()
    work = WorkCounters()
    k = max_fitting(values, t)
    with counting(work):
        root = build_tree([(j, x, None) for j, x in enumerate(values)], k, next_pow2(max(t, 1)), t,
                          BoolAlgebra(backend), RETAIN_TREE if witness else ROOT_ONLY)
        answer = layer_union(root, t)
    report = SolveReport(answer, "kx", instance, work)
    if witness:
        report.trace = [_Base(values, root)]
        report.parts = [answer]
        report.prefixes = [SumsetBitmap(0, t, 1), answer]
    return report
