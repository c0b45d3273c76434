"""All-capacities 0-1 knapsack on the subset-sum pipeline.

Items are ``(weight, profit)`` points. Every sumset of the subset-sum
algorithm becomes the p-max of a two-dimensional sumset, i.e. a max-plus
convolution of per-weight best-profit profiles. The dyadic layered engine,
canonical sets, halvers and the scale buckets are reused unchanged; only the
algebra differs.

The max-plus kernel is pluggable. A backend is any callable taking two
``int64`` profit arrays (with :data:`~detsum.profile.NEG` for ⊥) and
returning their full max-plus convolution; the default is the naive kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .bitmap import ValueWindow
from .counters import WorkCounters, counting, current
from .errors import ContractViolation, ElementRangeError, WindowMismatchError, WindowOverflowError
from .halver import canonicals_from_tree, halver_from_collection, halver_target
from .kx import RETAIN_TREE, ROOT_ONLY, DyadicNode, build_tree, next_pow2
from .profile import NEG, ParetoProfile
from .solver import SolverConfig, _select_b, bucket_index, child_bound

MaxPlusBackend = Callable[[np.ndarray, np.ndarray], np.ndarray]
MAX_PROFILE_WINDOW = 1 << 24


@dataclass(frozen=True)
class KnapsackItem:
    weight: int
    profit: int

    def __post_init__(self):
        if self.weight < 1 or self.profit < 1:
            raise ElementRangeError(f"weight and profit must be positive: {self}")


def _as_pairs(items) -> list[tuple[int, int]]:
    out = []
    for it in items:
        w, p = (it.weight, it.profit) if isinstance(it, KnapsackItem) else it
        KnapsackItem(int(w), int(p))
        out.append((int(w), int(p)))
    return out


def pmax(pairs: Iterable[tuple[int, int]], window: ValueWindow | None = None) -> ParetoProfile:
    """Best profit per weight; weights without a pair are ⊥."""
    pairs = list(pairs)
    if window is None:
        lo = min((w for w, _ in pairs), default=0)
        hi = max((w for w, _ in pairs), default=0)
        window = ValueWindow(lo, hi)
    vals = np.full(window.hi - window.lo + 1, NEG, dtype=np.int64)
    for w, p in pairs:
        if not window.lo <= w <= window.hi:
            raise WindowMismatchError(f"weight {w} outside [{window.lo}, {window.hi}]")
        j = w - window.lo
        if p > vals[j]:
            vals[j] = p
    return ParetoProfile(window.lo, vals)


def naive_maxplus(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Full max-plus convolution, one shifted maximum per finite entry of the sparser side."""
    if np.count_nonzero(f != NEG) > np.count_nonzero(g != NEG):
        f, g = g, f
    out = np.full(len(f) + len(g) - 1, NEG, dtype=np.int64)
    for j in np.flatnonzero(f != NEG):
        seg = out[j:j + len(g)]
        np.maximum(seg, g + f[j], out=seg)
    out[out < 0] = NEG
    return out


def maxplus_convolve(f: ParetoProfile, g: ParetoProfile, clip: ValueWindow,
                     backend: MaxPlusBackend | None = None) -> ParetoProfile:
    """``h[w] = max_{w1 + w2 = w} f[w1] + g[w2]`` on ``clip ∩ [f.lo + g.lo, f.hi + g.hi]``."""
    if clip.empty:
        raise ValueError("clip window is empty")
    lo = max(clip.lo, f.offset + g.offset)
    hi = min(clip.hi, f.hi + g.hi)
    if lo > hi:
        raise WindowMismatchError("sum window misses the clip window")
    if hi - lo + 1 > MAX_PROFILE_WINDOW:
        raise WindowOverflowError(f"profile window of {hi - lo + 1} weights exceeds cap")
    work = current()
    if work is not None:
        work.maxplus_calls += 1
        work.maxplus_work += len(f.values) + len(g.values)
        work.note_window(len(f.values) + len(g.values))
    base = f.offset + g.offset
    # entries beyond hi cannot contribute
    fv = f.values[:hi - base + 1]
    gv = g.values[:hi - base + 1]
    if backend is None:
        out = _clipped_naive(fv, gv, lo - base, hi - base)
    else:
        full = np.asarray(backend(fv, gv), dtype=np.int64)
        out = full[lo - base:hi - base + 1].copy()
        out[out < 0] = NEG
    return ParetoProfile(lo, out)


def _clipped_naive(f: np.ndarray, g: np.ndarray, lo: int, hi: int) -> np.ndarray:
    # positions relative to f.offset + g.offset
    if np.count_nonzero(f != NEG) > np.count_nonzero(g != NEG):
        f, g = g, f
    out = np.full(hi - lo + 1, NEG, dtype=np.int64)
    for j in np.flatnonzero(f != NEG):
        a = max(lo - j, 0)
        b = min(hi - j, len(g) - 1)
        if a > b:
            continue
        seg = out[j + a - lo:j + b - lo + 1]
        np.maximum(seg, g[a:b + 1] + f[j], out=seg)
    out[out < 0] = NEG
    return out


def profile_union(profiles: Sequence[ParetoProfile], window: ValueWindow) -> ParetoProfile:
    out = np.full(window.hi - window.lo + 1, NEG, dtype=np.int64)
    for p in profiles:
        a, b = max(p.offset, window.lo), min(p.hi, window.hi)
        if a > b:
            continue
        seg = out[a - window.lo:b - window.lo + 1]
        np.maximum(seg, p.values[a - p.offset:b - p.offset + 1], out=seg)
    return ParetoProfile(window.lo, out)


class MaxPlusAlgebra:
    """Layers are profiles; union is pointwise max.

    Breadcrumbs record, per weight, the first split ``i'`` reaching the best
    profit, so reported subsets attain the layer's profit exactly.
    """

    name = "maxplus"

    def __init__(self, backend: MaxPlusBackend | None = None):
        self.backend = backend

    def leaf_key(self, profit):
        return -profit

    def leaf_layers(self, weight: int, payloads: Sequence, k: int, cap: int) -> list:
        layers = [ParetoProfile.identity()]
        total = 0
        for i in range(1, min(len(payloads), k) + 1):
            if i * weight > cap:
                break
            total += payloads[i - 1]
            layers.append(ParetoProfile(i * weight, [total]))
        return layers

    def empty_layer(self):
        return ParetoProfile.identity()

    def combine(self, A: list, B: list, i: int, lo: int, hi: int, keep_crumbs: bool):
        out = np.full(hi - lo + 1, NEG, dtype=np.int64)
        crumb = np.full(hi - lo + 1, -1, dtype=np.int32) if keep_crumbs else None
        window = ValueWindow(lo, hi)
        for i1 in range(max(0, i - (len(B) - 1)), min(i, len(A) - 1) + 1):
            x, y = A[i1], B[i - i1]
            if x.offset + y.offset > hi:
                continue
            part = maxplus_convolve(x, y, window, self.backend)
            s = part.offset - lo
            seg = out[s:s + len(part.values)]
            better = part.values > seg
            if keep_crumbs:
                crumb[s:s + len(part.values)][better] = i1
            seg[better] = part.values[better]
        if (out == NEG).all():
            return None, None
        return ParetoProfile(lo, out), crumb

    def contains(self, layer: ParetoProfile, y: int) -> bool:
        return layer[y] is not None

    def resolve(self, crumb, layer: ParetoProfile, y: int) -> int:
        i1 = int(crumb[y - layer.offset])
        if i1 < 0:
            raise ContractViolation(f"no breadcrumb for weight {y}")
        return i1

    def split(self, A: ParetoProfile, B: ParetoProfile, y: int, C: ParetoProfile) -> tuple[int, int]:
        target = C[y]
        if target is None:
            raise ContractViolation(f"weight {y} is not in the combined profile")
        lo = max(A.offset, y - B.hi)
        hi = min(A.hi, y - B.offset)
        w1 = np.arange(lo, hi + 1)
        total = A.values[w1 - A.offset] + B.values[y - w1 - B.offset]
        hits = np.flatnonzero(total == target)
        if len(hits) == 0:
            raise ContractViolation(f"no max-plus witness for weight {y}")
        a = int(w1[hits[0]])
        return a, y - a

    def members(self, layer: ParetoProfile) -> list[int]:
        return sorted(layer.finite())


def knapsack_layered(items, k: int, u: int | None = None, cap: int | None = None,
                     mode: str = RETAIN_TREE, backend: MaxPlusBackend | None = None) -> DyadicNode:
    """Per-cardinality best-profit profiles for every dyadic weight interval.

    Item ids are positions in ``items``.
    """
    pairs = _as_pairs(items)
    u = max((w for w, _ in pairs), default=1) if u is None else u
    cap = k * u if cap is None else cap
    return build_tree([(j, w, p) for j, (w, p) in enumerate(pairs)], k, next_pow2(u), cap,
                      MaxPlusAlgebra(backend), mode)


@dataclass
class KnapsackReport:
    profile: ParetoProfile
    counters: WorkCounters = field(default_factory=WorkCounters)
    buckets: list = field(default_factory=list)
    certified: bool = True


class _KnapsackDnC:
    def __init__(self, u: int, cap: int, config: SolverConfig, backend, counters: WorkCounters):
        self.u, self.cap, self.config, self.backend = u, cap, config, backend
        self.counters = counters
        self.certified = True

    def solve(self, pairs: list[tuple[int, int]], k: int, level: int) -> ParetoProfile:
        k = min(k, len(pairs))
        self.counters.recursion_depth = max(self.counters.recursion_depth, level)
        cfg = self.config
        b = None
        if k > cfg.base_threshold:
            if cfg.halver == "certified":
                b = _select_b(k, self.u, [w for w, _ in pairs])
            else:
                b = min(cfg.forced_b, k)
        algebra = MaxPlusAlgebra(self.backend)
        elements = [(j, w, p) for j, (w, p) in enumerate(pairs)]
        window = ValueWindow(0, self.cap)
        if b is None or k <= b:
            root = build_tree(elements, k, next_pow2(self.u), self.cap, algebra, ROOT_ONLY)
            return profile_union(root.layers.layers, window)

        root = build_tree(elements, b, next_pow2(self.u), self.cap, algebra, RETAIN_TREE)
        halver = halver_from_collection(canonicals_from_tree(root, b, len(pairs), algebra), k)
        self.counters.b_values.append(b)
        if halver.delta > halver_target(k):
            if cfg.halver == "certified":
                raise ContractViolation(f"halver delta {halver.delta} above k/log k for k={k}")
            self.certified = False
        k2 = child_bound(k)
        left = self.solve([pairs[j] for j in halver.left()], k2, level + 1)
        right = self.solve([pairs[j] for j in halver.right()], k2, level + 1)
        return maxplus_convolve(left, right, window, self.backend)


def knapsack_dnc(items, k: int, u: int | None = None, cap: int | None = None,
                 config: SolverConfig | None = None,
                 backend: MaxPlusBackend | None = None) -> ParetoProfile:
    """Profile ``ANS`` over ``[0, cap]`` with ``opt_{<=k}(w) <= ANS(w) <= opt(w)`` per weight."""
    pairs = _as_pairs(items)
    u = max((w for w, _ in pairs), default=1) if u is None else u
    for w, _ in pairs:
        if not 1 <= w <= u:
            raise ElementRangeError(f"weight {w} outside [1, {u}]")
    cap = k * u if cap is None else cap
    work = WorkCounters()
    with counting(work):
        return _KnapsackDnC(u, cap, config or SolverConfig(), backend, work).solve(pairs, k, 0)


def knapsack_all_capacities(items, t: int, backend: MaxPlusBackend | str | None = None,
                            config: SolverConfig | None = None) -> KnapsackReport:
    """Exact ``f[0..t]``: best profit of an item set of total weight exactly ``w``."""
    if backend == "naive":
        backend = None
    elif isinstance(backend, str):
        raise ValueError(f"unknown max-plus backend {backend!r}")
    config = config or SolverConfig()
    pairs = [(w, p) for w, p in _as_pairs(items) if w <= t]
    buckets: dict[int, list] = {}
    for w, p in pairs:
        buckets.setdefault(bucket_index(w, t), []).append((w, p))
    work = WorkCounters()
    f = ParetoProfile.empty(0, t)
    f.values[0] = 0
    info = []
    certified = True
    with counting(work):
        for i in sorted(buckets):
            group = buckets[i]
            u = -(-t // (1 << (i - 1)))
            dnc = _KnapsackDnC(u, t, config, backend, work)
            part = dnc.solve(group, 1 << i, 0)
            certified &= dnc.certified
            f = maxplus_convolve(f, part, ValueWindow(0, t), backend)
            info.append({"bucket": i, "n": len(group), "u": u, "k": min(1 << i, len(group))})
    if f[0] != 0:
        raise ContractViolation("empty item set missing from the profile")
    return KnapsackReport(f, work, info, certified)


def reduction_work_bound(t: int, C: float, c: float) -> float:
    """``C * t * log2(t)^c``, the budget for total max-plus input length."""
    return C * t * math.log2(max(t, 2)) ** c
