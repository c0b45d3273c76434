"""Work counters collected while an algorithm runs.

Counters are installed with :func:`counting` and picked up implicitly by the
convolution kernels, so callers do not need to thread them through every
signature::

    with counting() as work:
        all_targets(instance)
    print(work.conv_work)
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, field


@dataclass
class WorkCounters:
    conv_calls: int = 0
    # sum of operand window lengths over all convolution calls
    conv_work: int = 0
    maxplus_calls: int = 0
    maxplus_work: int = 0
    max_window: int = 0
    witness_queries: int = 0
    recursion_depth: int = 0
    b_values: list = field(default_factory=list)

    def note_window(self, length: int) -> None:
        if length > self.max_window:
            self.max_window = length

    @property
    def peak_bytes(self) -> int:
        # two operands plus one result window of the widest convolution seen
        return 3 * ((self.max_window + 7) // 8)


_current: contextvars.ContextVar[WorkCounters | None] = contextvars.ContextVar(
    "detsum_counters", default=None
)


def current() -> WorkCounters | None:
    return _current.get()


@contextlib.contextmanager
def counting(counters: WorkCounters | None = None):
    counters = counters if counters is not None else WorkCounters()
    token = _current.set(counters)
    try:
        yield counters
    finally:
        _current.reset(token)
