"""Shared brute-force checks for tests."""

import numpy as np

from detsum.discrepancy import LEFT


def subset_stats(X, side):
    """Size, sum and LEFT count of every sub-multiset of ``X`` (by position)."""
    sizes = np.zeros(1, dtype=np.int64)
    sums = np.zeros(1, dtype=np.int64)
    lefts = np.zeros(1, dtype=np.int64)
    for v, s in zip(X, side):
        sizes = np.concatenate([sizes, sizes + 1])
        sums = np.concatenate([sums, sums + v])
        lefts = np.concatenate([lefts, lefts + (1 if s == LEFT else 0)])
    return sizes, sums, lefts


def halver_violations(X, side, k, delta):
    """(cardinality, sum) classes with ``|S| <= k`` having no subset split within ``delta``."""
    sizes, sums, lefts = subset_stats(X, side)
    keep = sizes <= k
    sizes, sums, lefts = sizes[keep], sums[keep], lefts[keep]
    worst = np.maximum(lefts, sizes - lefts)
    ok = worst <= sizes / 2 + delta + 1e-9
    every = set(zip(sizes.tolist(), sums.tolist()))
    good = set(zip(sizes[ok].tolist(), sums[ok].tolist()))
    return every - good
