"""Per-weight best-profit arrays with an "unachievable" sentinel."""

from __future__ import annotations

import numpy as np

# ⊥; adding any two sentinels still fits in int64, and every real profit is >= 0
NEG = -(1 << 62)


class ParetoProfile:
    """Best profit for each weight in ``[offset, offset + len(values) - 1]``.

    Unachievable weights hold :data:`NEG`. Weights outside the window are
    treated as unachievable.
    """

    __slots__ = ("offset", "values")

    def __init__(self, offset: int, values):
        values = np.asarray(values, dtype=np.int64)
        if values.ndim != 1 or len(values) == 0:
            raise ValueError("profile needs a non-empty 1-d window")
        values = values.copy()
        values[values < 0] = NEG
        self.offset = int(offset)
        self.values = values

    @classmethod
    def empty(cls, offset: int, length: int) -> "ParetoProfile":
        return cls(offset, np.full(length + 1, NEG, dtype=np.int64))

    @classmethod
    def identity(cls) -> "ParetoProfile":
        return cls(0, [0])

    @classmethod
    def from_list(cls, entries, offset: int = 0) -> "ParetoProfile":
        """Build from a list where ``None`` marks an unachievable weight."""
        return cls(offset, [NEG if e is None else e for e in entries])

    @property
    def length(self) -> int:
        return len(self.values) - 1

    @property
    def hi(self) -> int:
        return self.offset + self.length

    def __getitem__(self, w: int):
        p = w - self.offset
        if 0 <= p < len(self.values) and self.values[p] != NEG:
            return int(self.values[p])
        return None

    def __bool__(self) -> bool:
        return bool((self.values != NEG).any())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParetoProfile):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"ParetoProfile(offset={self.offset}, {self.to_list()})"

    def finite(self) -> dict[int, int]:
        idx = np.flatnonzero(self.values != NEG)
        return {self.offset + int(j): int(self.values[j]) for j in idx}

    def to_list(self) -> list:
        return [None if v == NEG else int(v) for v in self.values]

    def prefix_max(self) -> "ParetoProfile":
        """Conventional "capacity at most w" view of an exact-weight profile."""
        return ParetoProfile(self.offset, np.maximum.accumulate(self.values))
