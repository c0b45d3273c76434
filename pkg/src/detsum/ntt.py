"""Exact convolution of non-negative integer vectors by a number-theoretic transform.

All arithmetic is done modulo the prime ``998244353 = 119 * 2**23 + 1`` in
``uint64`` numpy arrays. Residues stay below ``2**30`` so every product fits in
64 bits. The forward transform is decimation-in-frequency (natural order in,
bit-reversed order out) and the inverse is decimation-in-time (bit-reversed
in, natural out), which avoids an explicit bit-reversal permutation.

Results are exact as long as every output coefficient is below the modulus;
for 0-1 inputs a coefficient is at most ``min(len(a), len(b))``, and the
transform length is limited to ``2**23``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import WindowOverflowError

MOD = 998244353
PRIMITIVE_ROOT = 3
MAX_LOG_LENGTH = 23
MAX_LENGTH = 1 << MAX_LOG_LENGTH


@lru_cache(maxsize=64)
def _twiddles(length: int, inverse: bool) -> np.ndarray:
    root = pow(PRIMITIVE_ROOT, (MOD - 1) // length, MOD)
    if inverse:
        root = pow(root, MOD - 2, MOD)
    half = length // 2
    out = np.empty(half, dtype=np.uint64)
    # powers by repeated doubling of a prefix keeps this vectorized
    out[0] = 1
    filled = 1
    step = root
    while filled < half:
        take = min(filled, half - filled)
        out[filled:filled + take] = out[:take] * np.uint64(step) % np.uint64(MOD)
        filled += take
        step = step * step % MOD
    return out


def _reduce(x: np.ndarray, scratch: np.ndarray) -> None:
    # x < 2*MOD; unsigned wraparound makes x - MOD huge exactly when x < MOD
    np.subtract(x, np.uint64(MOD), out=scratch)
    np.minimum(x, scratch, out=x)


def forward(x: np.ndarray) -> np.ndarray:
    """DIF transform of a copy of ``x``; the result is in bit-reversed order."""
    n = x.shape[0]
    x = x.astype(np.uint64, copy=True)
    if n < 2:
        return x
    mod = np.uint64(MOD)
    # scratch buffers are reused across stages to avoid fresh page faults
    s_buf = np.empty(n // 2, dtype=np.uint64)
    d_buf = np.empty(n // 2, dtype=np.uint64)
    length = n
    while length >= 2:
        half = length // 2
        w = _twiddles(length, False)
        rows = x.reshape(-1, length)
        shape = (n // length, half)
        u, v = rows[:, :half], rows[:, half:]
        s, d = s_buf.reshape(shape), d_buf.reshape(shape)
        np.add(u, mod, out=d)
        np.subtract(d, v, out=d)
        np.add(u, v, out=u)
        _reduce(u, s)
        np.multiply(d, w, out=d)
        np.remainder(d, mod, out=v)
        length = half
    return x


def inverse(x: np.ndarray) -> np.ndarray:
    """DIT inverse of a bit-reversed-order spectrum, in natural order."""
    n = x.shape[0]
    x = x.astype(np.uint64, copy=True)
    mod = np.uint64(MOD)
    if n >= 2:
        s_buf = np.empty(n // 2, dtype=np.uint64)
        d_buf = np.empty(n // 2, dtype=np.uint64)
    length = 2
    while length <= n:
        half = length // 2
        w = _twiddles(length, True)
        rows = x.reshape(-1, length)
        shape = (n // length, half)
        u, v = rows[:, :half], rows[:, half:]
        s, t = s_buf.reshape(shape), d_buf.reshape(shape)
        np.multiply(v, w, out=t)
        np.remainder(t, mod, out=t)
        np.add(u, mod, out=v)
        np.subtract(v, t, out=v)
        _reduce(v, s)
        np.add(u, t, out=u)
        _reduce(u, s)
        length *= 2
    np.multiply(x, np.uint64(pow(n, MOD - 2, MOD)), out=x)
    np.remainder(x, mod, out=x)
    return x


def convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact linear convolution of two non-negative integer vectors.

    Returns an ``int64`` array of length ``len(a) + len(b) - 1``.
    """
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return np.zeros(0, dtype=np.int64)
    out_len = la + lb - 1
    n = 1 << max(0, (out_len - 1).bit_length())
    if n > MAX_LENGTH:
        raise WindowOverflowError(f"transform length {n} exceeds {MAX_LENGTH}")
    fa = np.zeros(n, dtype=np.uint64)
    fa[:la] = a
    fb = np.zeros(n, dtype=np.uint64)
    fb[:lb] = b
    prod = forward(fa)
    np.multiply(prod, forward(fb), out=prod)
    np.remainder(prod, np.uint64(MOD), out=prod)
    return inverse(prod)[:out_len].astype(np.int64)


def convolve_prefix(a: np.ndarray, b: np.ndarray, limit: int) -> np.ndarray:
    """The first ``limit`` entries of ``convolve(a, b)`` (fewer if it is shorter).

    When ``limit`` sits just above a power of two ``h`` the low halves are
    convolved with a length-``2h`` transform and the short tails are added
    separately, instead of doubling the transform length.
    """
    a = np.asarray(a[:limit], dtype=np.int64)
    b = np.asarray(b[:limit], dtype=np.int64)
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return np.zeros(0, dtype=np.int64)
    out_len = min(la + lb - 1, limit)
    if min(la, lb) <= 64:
        return np.convolve(a, b)[:out_len]
    h = 1 << max(0, (out_len - 1).bit_length() - 1)
    if la + lb - 1 <= 2 * h or out_len - h > h // 4:
        return convolve(a, b)[:out_len]
    out = np.zeros(out_len, dtype=np.int64)
    low = convolve(a[:h], b[:h])[:out_len]
    out[:len(low)] = low
    rest = out_len - h
    for x, y in ((a, b), (b, a)):
        if len(x) > h:
            cross = convolve_prefix(x[h:], y, rest)
            out[h:h + len(cross)] += cross
    return out
