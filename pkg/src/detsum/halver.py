"""Canonical subsets and halvers built from them.

Every dyadic interval ``I`` and every present ``(i, y)`` with ``1 <= i <= b``
contributes one canonical set ``S_I[i, y]``, read off the layered tree. Any
subset ``S`` has a same-size, same-sum replacement that is a disjoint union of
canonical sets, one per interval of the greedy dyadic cover of ``S`` (split an
interval while it holds more than ``b`` points of ``S``). Two-coloring the
canonical sets therefore balances every replacement up to
``cover_count * per_set_discrepancy / 2``.

Multisets need one extra step: a leaf value with more than ``b`` copies
cannot be split by value, so copies of such a value get their own dyadic
tree over copy indices. Copies of one value are interchangeable, which keeps
the cover argument intact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .discrepancy import Partition, SetSystem, discrepancy_bound, two_color
from .kx import RETAIN_TREE, BoolAlgebra, DyadicNode, build_tree, next_pow2, report_subset


@dataclass
class CanonicalCollection:
    system: SetSystem
    keys: list
    index: dict
    b: int
    # number of tree levels at which the greedy cover may split an interval
    depth: int

    @property
    def m(self) -> int:
        return self.system.m

    def sets(self) -> list:
        return self.system.sets


def cover_count(k: int, b: int, depth: int) -> int:
    """Upper bound on the non-empty intervals in the greedy cover of a ``k``-subset.

    Split intervals on one level are disjoint and hold more than ``b`` points
    each, so there are at most ``k // (b + 1)`` of them per level; every output
    interval is the root or a child of a split interval.
    """
    if k <= 0:
        return 0
    if k <= b:
        return 1
    return min(k, 1 + 2 * depth * (k // (b + 1)))


def canonicals_from_tree(root: DyadicNode, b: int, n_ground: int, algebra) -> CanonicalCollection:
    keys, sets = [], []
    index = {}

    def add(key, members):
        index[key] = len(sets)
        keys.append(key)
        sets.append(list(members))

    max_copies = 0
    for node in root.nodes():
        if node.count == 0:
            continue
        for i in range(1, min(b, len(node.layers) - 1) + 1):
            for y in algebra.members(node.layers[i]):
                members = report_subset(node, i, y, algebra)
                for lo, hi in node.chain_intervals():
                    add((lo, hi, i, y), members)
        if node.is_leaf and node.count > b:
            max_copies = max(max_copies, node.count)
            ids = node.leaf_ids
            span = next_pow2(node.count)
            length = 1
            while length <= span:
                for start in range(0, node.count, length):
                    real = min(node.count, start + length) - start
                    for i in range(1, min(b, real) + 1):
                        add(("copies", node.a, node.a + 1, start, length, i), ids[start:start + i])
                length *= 2
    depth = root.top_length.bit_length() - 1
    if max_copies:
        depth += next_pow2(max_copies).bit_length() - 1
    system = SetSystem(n_ground, sets, b_max=max((len(s) for s in sets), default=0))
    return CanonicalCollection(system, keys, index, b, depth)


def generate_canonicals(X: Sequence[int], b: int, u: int | None = None, cap: int | None = None,
                        backend: str = "auto") -> CanonicalCollection:
    """Canonical subsets of the multiset ``X``; element ids are positions in ``X``."""
    if b < 1:
        raise ValueError("b must be at least 1")
    X = list(X)
    u = max(X, default=1) if u is None else u
    cap = b * u if cap is None else cap
    algebra = BoolAlgebra(backend)
    root = build_tree([(j, x, None) for j, x in enumerate(X)], b, next_pow2(u), cap,
                      algebra, RETAIN_TREE)
    return canonicals_from_tree(root, b, len(X), algebra)


@dataclass
class Halver:
    partition: Partition
    delta: float
    k: int
    b: int
    m: int
    n_cover: int
    # largest |imbalance| over the canonical sets, and its a-priori bound
    discrepancy: int
    discrepancy_bound: float

    def left(self) -> list[int]:
        return self.partition.left()

    def right(self) -> list[int]:
        return self.partition.right()


def halver_from_collection(collection: CanonicalCollection, k: int,
                           delta_mode: str = "bound") -> Halver:
    if delta_mode not in ("bound", "measured"):
        raise ValueError(f"unknown delta mode {delta_mode!r}")
    system = collection.system
    part = two_color(system)
    measured = part.max_discrepancy(system.sets)
    bound = discrepancy_bound(system.b_max, system.m) if system.m else 0.0
    n_cover = cover_count(k, collection.b, collection.depth)
    per_set = bound if delta_mode == "bound" else measured
    delta = min(k / 2, n_cover * per_set / 2)
    return Halver(part, delta, k, collection.b, system.m, n_cover, measured, bound)


def build_halver(X: Sequence[int], k: int, b: int, u: int | None = None, cap: int | None = None,
                 delta_mode: str = "bound", backend: str = "auto") -> Halver:
    """A ``(k, delta)``-halver of the multiset ``X`` from canonical sets of size ``<= b``.

    ``delta_mode="bound"`` reports the worst-case guarantee of the coloring;
    ``"measured"`` uses the discrepancy actually achieved on the canonical
    sets, which is equally rigorous for this particular partition.
    """
    if b > k:
        raise ValueError(f"b={b} must not exceed k={k}")
    if not X:
        return Halver(Partition(np.zeros(0, dtype=np.int8)), 0.0, k, b, 0, 0, 0, 0.0)
    collection = generate_canonicals(X, b, u, cap, backend)
    return halver_from_collection(collection, k, delta_mode)


def predicted_delta(k: int, b: int, u: int, n: int, max_copies: int = 1) -> float:
    """Δ the bound mode would report, using an upper bound on the canonical count.

    Lets the solver pick ``b`` without building collections that cannot qualify.
    """
    levels = next_pow2(u).bit_length() - 1
    depth = levels + (next_pow2(max_copies).bit_length() - 1 if max_copies > b else 0)
    m_upper = n * (depth + 1) * b * (b * u + 1) + 2 * n * b
    return min(k / 2, cover_count(k, b, depth) * discrepancy_bound(b, m_upper) / 2)


def halver_target(k: int) -> float:
    return k / math.log2(k)
