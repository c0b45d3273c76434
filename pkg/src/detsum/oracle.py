"""Slow, obviously-correct baselines used to arbitrate every optimized path.

Nothing here calls into the optimized modules; results are only wrapped in
the shared container types at the end.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .bitmap import SumsetBitmap
from .errors import ContractViolation, NoWitnessError, SizeLimitError
from .profile import NEG, ParetoProfile

EXHAUSTIVE_LIMIT = 24


@dataclass(frozen=True)
class Witness:
    """A sub-multiset given as sorted ``(value, count)`` pairs."""

    occurrences: tuple

    @classmethod
    def from_values(cls, values: Iterable[int]) -> "Witness":
        return cls(tuple(sorted(Counter(values).items())))

    @property
    def total(self) -> int:
        return sum(v * c for v, c in self.occurrences)

    @property
    def size(self) -> int:
        return sum(c for _, c in self.occurrences)

    def values(self) -> list[int]:
        return [v for v, c in self.occurrences for _ in range(c)]

    def validate(self, multiset: Counter, target: int) -> None:
        for v, c in self.occurrences:
            if c < 1 or c > multiset.get(v, 0):
                raise ContractViolation(f"witness uses {v} x{c}, available {multiset.get(v, 0)}")
        if self.total != target:
            raise ContractViolation(f"witness sums to {self.total}, expected {target}")


def bellman_dp(values: Iterable[int], t: int) -> SumsetBitmap:
    """Σ(X) ∩ [0, t] by the textbook shift-or recurrence."""
    if t < 0:
        raise ValueError("t must be non-negative")
    mask = (1 << (t + 1)) - 1
    reach = 1
    for v in values:
        if v <= t:
            reach = (reach | (reach << v)) & mask
    return SumsetBitmap(0, t, reach)


def bellman_witness(values: Iterable[int], t: int, y: int) -> Witness:
    """One sub-multiset summing to ``y`` by backtracking the prefix reach sets."""
    values = [v for v in values if v <= t]
    if not 0 <= y <= t:
        raise NoWitnessError(f"{y} is outside [0, {t}]")
    mask = (1 << (t + 1)) - 1
    reach = [1]
    for v in values:
        reach.append((reach[-1] | (reach[-1] << v)) & mask)
    if not (reach[-1] >> y) & 1:
        raise NoWitnessError(f"{y} is not a subset sum")
    chosen = []
    for j in range(len(values), 0, -1):
        if not (reach[j - 1] >> y) & 1:
            y -= values[j - 1]
            chosen.append(values[j - 1])
    return Witness.from_values(chosen)


def exhaustive_sums(values: Iterable[int], cap: int | None = None) -> set[tuple[int, int]]:
    """Every ``(cardinality, sum)`` realized by one of the 2^n subsets."""
    values = list(values)
    if len(values) > EXHAUSTIVE_LIMIT:
        raise SizeLimitError(f"exhaustive enumeration limited to {EXHAUSTIVE_LIMIT} elements")
    sizes, sums = subset_table(values)
    if cap is not None:
        keep = sums <= cap
        sizes, sums = sizes[keep], sums[keep]
    return set(zip(sizes.tolist(), sums.tolist()))


def subset_table(values: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Cardinality and sum of subset ``mask`` at index ``mask``, for all masks."""
    sizes = np.zeros(1, dtype=np.int64)
    sums = np.zeros(1, dtype=np.int64)
    for v in values:
        sizes = np.concatenate([sizes, sizes + 1])
        sums = np.concatenate([sums, sums + v])
    return sizes, sums


def dp_knapsack(items: Iterable[tuple[int, int]], cap: int) -> ParetoProfile:
    """f[w] = max profit of an item set of total weight exactly w, for w in [0, cap]."""
    f = np.full(cap + 1, NEG, dtype=np.int64)
    f[0] = 0
    for w, p in items:
        if w < 1 or p < 1:
            raise ValueError("weights and profits must be positive")
        if w > cap:
            continue
        cand = f[:cap + 1 - w] + p
        f[w:] = np.maximum(f[w:], cand)
    f[f < 0] = NEG
    return ParetoProfile(0, f)


def knapsack_witness(items: Iterable[tuple[int, int]], cap: int, w: int) -> list[int]:
    """Indices of an item set of weight exactly ``w`` with the optimal profit."""
    items = list(items)
    table = np.full((len(items) + 1, cap + 1), NEG, dtype=np.int64)
    table[0, 0] = 0
    for j, (wt, p) in enumerate(items, 1):
        table[j] = table[j - 1]
        if wt <= cap:
            table[j, wt:] = np.maximum(table[j - 1, wt:], table[j - 1, :cap + 1 - wt] + p)
    table[table < 0] = NEG
    if not 0 <= w <= cap or table[-1, w] == NEG:
        raise NoWitnessError(f"weight {w} is not achievable")
    chosen = []
    for j in range(len(items), 0, -1):
        if table[j, w] != table[j - 1, w]:
            chosen.append(j - 1)
            w -= items[j - 1][0]
    return chosen[::-1]


def dp_knapsack_bounded(items: Iterable[tuple[int, int]], cap: int, k: int) -> ParetoProfile:
    """Like :func:`dp_knapsack` but only item sets of at most ``k`` items count."""
    items = list(items)
    # g[j][w]: best profit using exactly j items
    g = np.full((k + 1, cap + 1), NEG, dtype=np.int64)
    g[0, 0] = 0
    for w, p in items:
        if w > cap:
            continue
        for j in range(k, 0, -1):
            g[j, w:] = np.maximum(g[j, w:], g[j - 1, :cap + 1 - w] + p)
    f = g.max(axis=0)
    f[f < 0] = NEG
    return ParetoProfile(0, f)


def layered_oracle(values: list[int], k: int, cap: int | None = None) -> list[set[int]]:
    """``[Σ_0, ..., Σ_k]`` by exhaustive enumeration."""
    pairs = exhaustive_sums(values, cap)
    layers = [set() for _ in range(k + 1)]
    for i, y in pairs:
        if i <= k:
            layers[i].add(y)
    return layers
