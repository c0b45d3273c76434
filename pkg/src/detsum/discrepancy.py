"""Deterministic low-discrepancy two-coloring by conditional expectations.

The potential is ``Φ = Σ_S 2 cosh(λ d_S)`` where ``d_S`` is the signed
imbalance of the already-colored part of ``S``. Coloring element ``e`` LEFT
instead of RIGHT changes Φ by ``4 sinh(λ) Σ_{S ∋ e} sinh(λ d_S)``, so the
greedy choice only needs the sign of that sum. With
``λ = sqrt(2 ln(2m) / b)`` the final potential is at most
``2m exp(λ² b / 2)``, which forces ``|d_S| <= sqrt(2 b ln(2m))`` for every set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DiscrepancyBoundError, MalformedInputError

LEFT = 0
RIGHT = 1


@dataclass
class SetSystem:
    """Subsets of ``range(n_ground)`` given as lists of element ids."""

    n_ground: int
    sets: list
    b_max: int | None = None
    _incidence: list | None = field(default=None, repr=False)

    def __post_init__(self):
        sizes = [len(s) for s in self.sets]
        largest = max(sizes, default=0)
        if self.b_max is None:
            self.b_max = largest
        elif largest > self.b_max:
            raise MalformedInputError(f"a set has {largest} elements, above b_max={self.b_max}")
        for s in self.sets:
            if len(set(s)) != len(s):
                raise MalformedInputError("a set lists the same element twice")
            for e in s:
                if not 0 <= e < self.n_ground:
                    raise MalformedInputError(f"element id {e} not in ground set")

    @property
    def m(self) -> int:
        return len(self.sets)

    @property
    def incidence(self) -> list:
        """For each element, the ids of the sets containing it."""
        if self._incidence is None:
            inc = [[] for _ in range(self.n_ground)]
            for j, s in enumerate(self.sets):
                for e in s:
                    inc[e].append(j)
            self._incidence = inc
        return self._incidence

    @property
    def total_incidence(self) -> int:
        return sum(len(s) for s in self.sets)


@dataclass
class Partition:
    side: np.ndarray  # LEFT / RIGHT per element
    updates: int = 0

    def left(self) -> list[int]:
        return np.flatnonzero(self.side == LEFT).tolist()

    def right(self) -> list[int]:
        return np.flatnonzero(self.side == RIGHT).tolist()

    def imbalance(self, s: Sequence[int]) -> int:
        """``|S ∩ LEFT| - |S ∩ RIGHT|``."""
        if len(s) == 0:
            return 0
        n_right = int(self.side[np.asarray(s)].sum())
        return len(s) - 2 * n_right

    def max_discrepancy(self, sets) -> int:
        return max((abs(self.imbalance(s)) for s in sets), default=0)


def discrepancy_bound(b_max: int, m: int) -> float:
    """``sqrt(2 b ln(2m))`` with ``b`` and ``m`` clamped to at least 1."""
    return math.sqrt(2 * max(b_max, 1) * math.log(2 * max(m, 1)))


def _sinh_sum(x: np.ndarray) -> float:
    big = np.abs(x).max(initial=0.0)
    if big < 700.0:
        return float(np.sinh(x).sum())
    # sinh(v) ~ sign(v) e^{|v|}/2 once |v| is large; only the sign matters
    return float((np.sign(x) * np.exp(np.abs(x) - big)).sum())


def two_color(system: SetSystem, check: bool = True) -> Partition:
    """Color elements in id order, each to the side that does not raise Φ.

    Ties go LEFT. With ``check`` the discrepancy bound is re-verified and a
    violation raises :class:`DiscrepancyBoundError`.
    """
    m = max(system.m, 1)
    b = max(system.b_max, 1)
    lam = math.sqrt(2 * math.log(2 * m) / b)
    d = np.zeros(system.m, dtype=np.int64)
    side = np.zeros(system.n_ground, dtype=np.int8)
    updates = 0
    for e, inc in enumerate(system.incidence):
        if not inc:
            continue
        idx = np.asarray(inc)
        if _sinh_sum(lam * d[idx]) <= 0.0:
            d[idx] += 1
        else:
            d[idx] -= 1
            side[e] = RIGHT
        updates += len(inc)
    part = Partition(side, updates)
    if check and system.m:
        worst = int(np.abs(d).max())
        bound = discrepancy_bound(system.b_max, system.m)
        if worst > bound:
            raise DiscrepancyBoundError(f"discrepancy {worst} exceeds bound {bound:.3f}")
    return part
