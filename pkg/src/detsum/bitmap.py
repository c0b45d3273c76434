"""Windowed bitset sumsets and clipped Boolean convolution.

A :class:`SumsetBitmap` stores an integer set as a Python ``int`` whose bit
``p`` encodes membership of ``offset + p``. Python integers give us word
parallel shift/OR for free, and the NTT backend takes over once windows are
large and dense.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import ntt
from .counters import current
from .errors import (
    ContractViolation,
    NoWitnessError,
    WindowMismatchError,
    WindowOverflowError,
)

BACKENDS = ("auto", "naive", "ntt")
DEFAULT_CROSSOVER = 4096
DEFAULT_MAX_WINDOW = 1 << 26

# crossover policy knobs; every backend returns identical bits
_config = {"crossover": DEFAULT_CROSSOVER, "max_window": DEFAULT_MAX_WINDOW, "debug": True}


def configure(*, crossover: int | None = None, max_window: int | None = None,
              debug: bool | None = None) -> dict:
    """Update the module-wide convolution settings and return the old ones."""
    old = dict(_config)
    if crossover is not None:
        _config["crossover"] = int(crossover)
    if max_window is not None:
        _config["max_window"] = int(max_window)
    if debug is not None:
        _config["debug"] = bool(debug)
    return old


@dataclass(frozen=True)
class ValueWindow:
    """Inclusive integer range ``[lo, hi]``; ``lo == hi + 1`` is the empty window."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi + 1:
            raise ValueError(f"invalid window [{self.lo}, {self.hi}]")

    @property
    def empty(self) -> bool:
        return self.lo > self.hi


class SumsetBitmap:
    """Integer set over the value window ``[offset, offset + length]``."""

    __slots__ = ("offset", "length", "bits", "_rev")

    def __init__(self, offset: int, length: int, bits: int = 0):
        if offset < 0 or length < 0:
            raise ValueError(f"bad window offset={offset} length={length}")
        if bits < 0 or bits.bit_length() > length + 1:
            raise WindowMismatchError("set bits outside the declared window")
        self.offset = offset
        self.length = length
        self.bits = bits
        self._rev = None

    @classmethod
    def from_values(cls, values: Iterable[int], offset: int | None = None,
                    length: int | None = None) -> "SumsetBitmap":
        values = sorted(set(values))
        if offset is None:
            offset = values[0] if values else 0
        if length is None:
            length = (values[-1] - offset) if values else 0
        bits = 0
        for v in values:
            if not offset <= v <= offset + length:
                raise WindowMismatchError(f"value {v} outside [{offset}, {offset + length}]")
            bits |= 1 << (v - offset)
        return cls(offset, length, bits)

    @classmethod
    def singleton_zero(cls) -> "SumsetBitmap":
        return cls(0, 0, 1)

    @property
    def hi(self) -> int:
        return self.offset + self.length

    @property
    def window(self) -> ValueWindow:
        return ValueWindow(self.offset, self.hi)

    def __contains__(self, value: int) -> bool:
        p = value - self.offset
        return 0 <= p <= self.length and (self.bits >> p) & 1 == 1

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, SumsetBitmap):
            return NotImplemented
        return (self.offset, self.length, self.bits) == (other.offset, other.length, other.bits)

    def __hash__(self):
        return hash((self.offset, self.length, self.bits))

    def __repr__(self) -> str:
        vals = self.values()
        shown = vals if len(vals) <= 12 else vals[:12] + ["..."]
        return f"SumsetBitmap([{self.offset}, {self.hi}], {shown})"

    def values(self) -> list[int]:
        off = self.offset
        return [off + p for p in bit_positions(self.bits)]

    def same_set(self, other: "SumsetBitmap") -> bool:
        """Set equality ignoring the declared windows."""
        return self.values() == other.values()

    def restricted(self, window: ValueWindow) -> "SumsetBitmap":
        """The members inside ``window``, re-windowed to exactly ``window``."""
        if window.empty:
            raise WindowMismatchError("cannot restrict to an empty window")
        return SumsetBitmap(window.lo, window.hi - window.lo,
                            _slice_bits(self.bits, self.offset, window.lo, window.hi))

    def reversed_bits(self) -> int:
        # bit r of the result is bit (length - r) of self; cached until mutated
        if self._rev is None:
            if self.bits:
                s = format(self.bits, "b").rjust(self.length + 1, "0")
                self._rev = int(s[::-1], 2)
            else:
                self._rev = 0
        return self._rev

    # serialization: little-endian u64 offset, u64 length, then packed words
    def to_bytes(self) -> bytes:
        nwords = (self.length + 1 + 63) // 64
        return struct.pack("<QQ", self.offset, self.length) + self.bits.to_bytes(8 * nwords, "little")

    @classmethod
    def from_bytes(cls, data: bytes) -> "SumsetBitmap":
        offset, length = struct.unpack_from("<QQ", data)
        nwords = (length + 1 + 63) // 64
        body = data[16:16 + 8 * nwords]
        if len(body) != 8 * nwords:
            raise ValueError("truncated bitmap serialization")
        return cls(offset, length, int.from_bytes(body, "little"))

    def checksum(self) -> str:
        """Stable 64-bit digest of the serialized bitmap, as 16 hex digits."""
        return hashlib.blake2b(self.to_bytes(), digest_size=8).hexdigest()


def bit_positions(x: int) -> list[int]:
    """Ascending positions of the set bits of a non-negative int."""
    if x == 0:
        return []
    if x.bit_count() <= 32:
        out = []
        while x:
            low = x & -x
            out.append(low.bit_length() - 1)
            x ^= low
        return out
    return np.flatnonzero(_int_to_bit_array(x, x.bit_length())).tolist()


def _int_to_bit_array(x: int, nbits: int) -> np.ndarray:
    """The low ``nbits`` bits of ``x``; higher bits are dropped."""
    x &= (1 << nbits) - 1
    raw = x.to_bytes((nbits + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:nbits]


def _bit_array_to_int(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(arr.astype(np.uint8), bitorder="little").tobytes(), "little")


def _slice_bits(bits: int, offset: int, lo: int, hi: int) -> int:
    """Bits of the values in ``[lo, hi]``, re-based so bit 0 means ``lo``."""
    if hi < lo:
        return 0
    shift = lo - offset
    x = bits >> shift if shift >= 0 else bits << -shift
    return x & ((1 << (hi - lo + 1)) - 1)


def _naive_product(a: int, b: int, limit: int) -> int:
    """OR of ``b << p`` over set bits ``p`` of ``a``, keeping bits ``< limit``."""
    b &= (1 << limit) - 1
    out = 0
    for p in bit_positions(a):
        if p >= limit:
            break
        out |= b << p
    return out & ((1 << limit) - 1)


def _ntt_product(a: int, b: int, limit: int) -> int:
    la = min(a.bit_length(), limit)
    lb = min(b.bit_length(), limit)
    counts = ntt.convolve_prefix(_int_to_bit_array(a, la), _int_to_bit_array(b, lb), limit)
    return _bit_array_to_int(counts > 0)


def _choose_backend(sparse_pop: int, dense_len: int, out_len: int) -> str:
    if out_len <= _config["crossover"]:
        return "naive"
    if out_len > ntt.MAX_LENGTH // 2:
        return "naive"
    n = 1 << max(0, (out_len - 1).bit_length())
    # rough relative costs measured on CPython + numpy, in 64-bit word operations
    naive_cost = sparse_pop * (dense_len // 64 + 16)
    ntt_cost = 3 * n * n.bit_length() // 4 + 20000
    return "naive" if naive_cost <= ntt_cost else "ntt"


def bool_convolve(A: SumsetBitmap, B: SumsetBitmap, clip: ValueWindow,
                  backend: str = "auto") -> SumsetBitmap:
    """Clipped sumset ``(A + B) ∩ clip``.

    The result window is ``[max(clip.lo, A.offset + B.offset),
    min(clip.hi, A.hi + B.hi)]``; it must be non-empty.
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if clip.empty:
        raise ValueError("clip window is empty")
    lo = max(clip.lo, A.offset + B.offset)
    hi = min(clip.hi, A.hi + B.hi)
    if lo > hi:
        raise WindowMismatchError(
            f"sum window [{A.offset + B.offset}, {A.hi + B.hi}] misses clip [{clip.lo}, {clip.hi}]")
    length = hi - lo
    if length + 1 > _config["max_window"]:
        raise WindowOverflowError(f"result window of {length + 1} values exceeds cap {_config['max_window']}")
    work = current()
    if work is not None:
        work.conv_calls += 1
        work.conv_work += A.length + B.length + 2
        work.note_window(A.length + B.length + 2)

    base = A.offset + B.offset
    limit = hi - base + 1  # keep product bits [0, limit)
    a, b = A.bits, B.bits
    if a == 0 or b == 0:
        return SumsetBitmap(lo, length, 0)
    pa, pb = a.bit_count(), b.bit_count()
    if pa > pb:
        a, b, pa, pb = b, a, pb, pa
    if pa == 1:
        prod = (b << (a.bit_length() - 1)) & ((1 << limit) - 1)
    else:
        chosen = backend
        if chosen == "auto":
            chosen = _choose_backend(pa, min(b.bit_length(), limit), limit)
        if chosen == "ntt":
            prod = _ntt_product(a, b, limit)
        else:
            prod = _naive_product(a, b, limit)
    return SumsetBitmap(lo, length, prod >> (lo - base))


def union_into(dst: SumsetBitmap, src: SumsetBitmap) -> SumsetBitmap:
    """In-place ``dst |= src``; the source window must lie inside the destination's."""
    if src.offset < dst.offset or src.hi > dst.hi:
        raise WindowMismatchError(
            f"source window [{src.offset}, {src.hi}] exceeds destination [{dst.offset}, {dst.hi}]")
    if src.bits:
        dst.bits |= src.bits << (src.offset - dst.offset)
        dst._rev = None
    return dst


def witness_search(A: SumsetBitmap, B: SumsetBitmap, z: int) -> tuple[int, int]:
    """Return ``(a, b)`` with ``a ∈ A``, ``b ∈ B``, ``a + b == z`` and ``a`` minimal.

    All candidates ``a`` are found at once by intersecting ``A`` with the
    reflected set ``z - B``; the lowest surviving bit is the answer.
    """
    work = current()
    if work is not None:
        work.witness_queries += 1
    rev = B.reversed_bits()
    # bit r of rev is value B.hi - r, so z - (B.hi - r) = r + (z - B.hi)
    shift = z - B.hi - A.offset
    reflected = rev << shift if shift >= 0 else rev >> -shift
    hits = A.bits & reflected
    if not hits:
        raise NoWitnessError(f"{z} is not in A + B")
    a = A.offset + (hits & -hits).bit_length() - 1
    b = z - a
    if _config["debug"] and (a not in A or b not in B):
        raise ContractViolation(f"bad witness ({a}, {b}) for {z}")
    return a, b
