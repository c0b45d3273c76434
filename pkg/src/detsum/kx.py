"""Layered sums over dyadic intervals with subset reporting.

For every dyadic interval ``I = (a, a + l]`` of ``(0, u]`` that contains input
elements we keep the per-cardinality sets ``Σ_i(X ∩ I)`` for ``i <= k``. A
node's layer ``i`` is the union over ``i' + i'' = i`` of the sumsets of its
children's layers ``i'`` and ``i''``. Nodes whose elements all fall in one
half are skipped (the child is reused directly), so the stored tree has
``O(n)`` nodes even when ``u`` is large.

The engine is generic over an *algebra* describing what a layer is. The
Boolean algebra below gives plain sumsets; the knapsack module plugs in a
max-plus algebra over profit profiles.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .bitmap import SumsetBitmap, ValueWindow, bool_convolve, union_into, witness_search
from .errors import ContractViolation, ElementRangeError, NotAMemberError

RETAIN_TREE = "retain-tree"
ROOT_ONLY = "root-only"


def next_pow2(x: int) -> int:
    return 1 if x <= 1 else 1 << (x - 1).bit_length()


@dataclass
class LayeredSums:
    """Layers ``0..len(layers)-1``; every higher cardinality up to ``k`` is empty."""

    k: int
    layers: list

    def __len__(self) -> int:
        return len(self.layers)

    def __getitem__(self, i: int):
        return self.layers[i]

    def present(self, i: int) -> bool:
        return 0 <= i < len(self.layers)


@dataclass
class DyadicNode:
    a: int
    length: int
    count: int
    layers: LayeredSums
    left: "DyadicNode | None" = None
    right: "DyadicNode | None" = None
    # per cardinality, algebra-specific record of which split produced each value
    crumbs: list | None = None
    # leaf only: element ids in the order they are taken
    leaf_ids: list = field(default_factory=list)
    leaf_weight: int = 0
    # largest enclosing dyadic interval length that has the same elements
    top_length: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.length == 1

    @property
    def interval(self) -> tuple[int, int]:
        return self.a, self.a + self.length

    def chain_intervals(self) -> list[tuple[int, int]]:
        """All dyadic intervals ``(lo, hi]`` whose element set equals this node's."""
        out = []
        length = self.length
        while length <= max(self.top_length, self.length):
            lo = (self.a // length) * length
            out.append((lo, lo + length))
            length *= 2
        return out

    def nodes(self):
        """Pre-order walk of the retained tree."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if node.right is not None:
                stack.append(node.right)
            if node.left is not None:
                stack.append(node.left)


class BoolAlgebra:
    """Layers are :class:`SumsetBitmap` sets; union is OR."""

    name = "bool"

    def __init__(self, backend: str = "auto"):
        self.backend = backend

    def leaf_key(self, payload):
        return 0

    def leaf_layers(self, weight: int, payloads: Sequence, k: int, cap: int) -> list:
        layers = [SumsetBitmap.singleton_zero()]
        for i in range(1, min(len(payloads), k) + 1):
            y = i * weight
            if y > cap:
                break
            layers.append(SumsetBitmap(y, 0, 1))
        return layers

    def empty_layer(self):
        return SumsetBitmap.singleton_zero()

    def combine(self, A: list, B: list, i: int, lo: int, hi: int, keep_crumbs: bool):
        out = SumsetBitmap(lo, hi - lo, 0)
        crumbs = []
        window = ValueWindow(lo, hi)
        for i1 in range(max(0, i - (len(B) - 1)), min(i, len(A) - 1) + 1):
            x, y = A[i1], B[i - i1]
            if x.offset + y.offset > hi:
                continue
            part = bool_convolve(x, y, window, self.backend)
            if keep_crumbs:
                new = (part.bits << (part.offset - lo)) & ~out.bits
                if new:
                    crumbs.append((i1, new))
            union_into(out, part)
        return (out if out.bits else None), crumbs

    def contains(self, layer: SumsetBitmap, y: int) -> bool:
        return y in layer

    def resolve(self, crumbs, layer: SumsetBitmap, y: int) -> int:
        p = y - layer.offset
        for i1, mask in crumbs:
            if (mask >> p) & 1:
                return i1
        raise ContractViolation(f"no breadcrumb for value {y}")

    def split(self, A, B, y: int, C) -> tuple[int, int]:
        return witness_search(A, B, y)

    def members(self, layer: SumsetBitmap) -> list[int]:
        return layer.values()


def build_tree(elements: Sequence[tuple[int, int, object]], k: int, u: int, cap: int,
               algebra, mode: str = RETAIN_TREE) -> DyadicNode:
    """Build the dyadic tree over ``(0, u]`` for ``(id, weight, payload)`` elements.

    ``u`` must be a power of two and every weight must lie in ``[1, u]``.
    Layers are clipped to values ``<= cap``.
    """
    if u & (u - 1):
        raise ValueError("u must be a power of two")
    if mode not in (RETAIN_TREE, ROOT_ONLY):
        raise ValueError(f"unknown memory mode {mode!r}")
    for _id, w, _p in elements:
        if not 1 <= w <= u:
            raise ElementRangeError(f"element {w} outside [1, {u}]")
    items = sorted(elements, key=lambda e: (e[1], algebra.leaf_key(e[2]), e[0]))
    weights = [e[1] for e in items]
    keep = mode == RETAIN_TREE

    def build(lo: int, hi: int, a: int, length: int) -> DyadicNode:
        if length == 1:
            ids = [items[j][0] for j in range(lo, hi)]
            payloads = [items[j][2] for j in range(lo, hi)]
            layers = algebra.leaf_layers(a + 1, payloads, k, cap)
            return DyadicNode(a, 1, hi - lo, LayeredSums(k, layers),
                              leaf_ids=ids, leaf_weight=a + 1, top_length=1)
        half = length // 2
        mid = bisect_right(weights, a + half, lo, hi)
        if mid == lo:
            return build(lo, hi, a + half, half)
        if mid == hi:
            return build(lo, hi, a, half)
        left = build(lo, mid, a, half)
        right = build(mid, hi, a + half, half)
        left.top_length = half
        right.top_length = half
        A, B = left.layers.layers, right.layers.layers
        layers = [A[0]]
        crumbs = [[]] if keep else None
        for i in range(1, min(k, len(A) + len(B) - 2) + 1):
            lo_i = i * (a + 1)
            if lo_i > cap:
                break
            hi_i = min(i * (a + length), cap)
            layer, crumb = algebra.combine(A, B, i, lo_i, hi_i, keep)
            if layer is None:
                break
            layers.append(layer)
            if keep:
                crumbs.append(crumb)
        node = DyadicNode(a, length, hi - lo, LayeredSums(k, layers), crumbs=crumbs)
        if keep:
            node.left, node.right = left, right
        return node

    if not items:
        root = DyadicNode(0, u, 0, LayeredSums(k, [algebra.empty_layer()]))
    else:
        root = build(0, len(items), 0, u)
    root.top_length = u
    return root


def layered_sums(X: Iterable[int], k: int, u: int | None = None, cap: int | None = None,
                 mode: str = RETAIN_TREE, backend: str = "auto") -> DyadicNode:
    """Compute ``Σ_i(X) ∩ [0, cap]`` for ``i = 0..k`` over the multiset ``X``.

    Element ids are positions in ``X``. ``u`` defaults to ``max(X)`` and is
    padded to a power of two internally.
    """
    X = list(X)
    if k < 0:
        raise ValueError("k must be non-negative")
    if u is None:
        u = max(X, default=1)
    for x in X:
        if not 1 <= x <= u:
            raise ElementRangeError(f"element {x} outside [1, {u}]")
    if cap is None:
        cap = k * u
    return build_tree([(j, x, None) for j, x in enumerate(X)], k, next_pow2(u), cap,
                      BoolAlgebra(backend), mode)


def report_subset(root: DyadicNode, i: int, y: int, algebra=None) -> list:
    """Element ids of one sub-multiset of cardinality ``i`` and sum ``y``."""
    algebra = algebra if algebra is not None else BoolAlgebra()
    if not root.layers.present(i) or not algebra.contains(root.layers[i], y):
        raise NotAMemberError(f"({i}, {y}) is not a layered sum")
    out = []
    stack = [(root, i, y)]
    while stack:
        node, i, y = stack.pop()
        if i == 0:
            continue
        if node.is_leaf:
            out.extend(node.leaf_ids[:i])
            continue
        if node.crumbs is None:
            raise ContractViolation("tree was built root-only; no breadcrumbs retained")
        i1 = algebra.resolve(node.crumbs[i], node.layers[i], y)
        A = node.left.layers[i1]
        B = node.right.layers[i - i1]
        ya, yb = algebra.split(A, B, y, node.layers[i])
        stack.append((node.right, i - i1, yb))
        stack.append((node.left, i1, ya))
    return out


def layer_union(root: DyadicNode, cap: int) -> SumsetBitmap:
    """``Σ_{<=k}`` of the root as one bitmap over ``[0, cap]``."""
    out = SumsetBitmap(0, cap, 0)
    for layer in root.layers.layers:
        if layer.hi <= cap:
            union_into(out, layer)
        else:
            union_into(out, layer.restricted(ValueWindow(layer.offset, cap)))
    return out
