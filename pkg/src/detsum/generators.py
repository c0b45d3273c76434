"""Seeded instance generators for tests and benchmarks.

Every generator takes an explicit seed and uses its own ``random.Random``,
so the same arguments always produce the same instance.
"""

from __future__ import annotations

import random

KINDS = ("uniform", "dense", "clustered", "dups")


def uniform(n: int, t: int, seed: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.randint(1, max(t, 1)) for _ in range(n)]


def dense(n: int, t: int, seed: int, u: int = 32) -> list[int]:
    """All values at most a small ``u``."""
    rng = random.Random(seed)
    return [rng.randint(1, max(min(u, t), 1)) for _ in range(n)]


def clustered(n: int, t: int, seed: int, spread: int = 2) -> list[int]:
    """Values within ``spread`` of the scale boundaries ``t / 2^i``."""
    rng = random.Random(seed)
    levels = max(t.bit_length(), 1)
    out = []
    for _ in range(n):
        center = t >> rng.randint(0, levels - 1)
        out.append(min(max(center + rng.randint(-spread, spread), 1), max(t, 1)))
    return out


def dups(n: int, t: int, seed: int, distinct: int = 4) -> list[int]:
    """A few distinct values, each repeated many times."""
    rng = random.Random(seed)
    pool = [rng.randint(1, max(t, 1)) for _ in range(distinct)]
    # keep one small value so repeated copies actually fit under t
    pool[0] = rng.randint(1, max(t // max(n, 1), 1))
    return [rng.choice(pool) for _ in range(n)]


def generate(kind: str, n: int, t: int, seed: int) -> list[int]:
    try:
        gen = {"uniform": uniform, "dense": dense, "clustered": clustered, "dups": dups}[kind]
    except KeyError:
        raise ValueError(f"unknown generator {kind!r}; choose from {', '.join(KINDS)}") from None
    return gen(n, t, seed)


def knapsack_items(kind: str, n: int, t: int, seed: int,
                   max_profit: int = 10**6) -> list[tuple[int, int]]:
    """``(weight, profit)`` items with weights drawn like :func:`generate`."""
    weights = generate(kind, n, t, seed)
    rng = random.Random(seed ^ 0x5EED)
    return [(w, rng.randint(1, max_profit)) for w in weights]
