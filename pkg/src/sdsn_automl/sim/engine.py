"""Deterministic event loop.

Simulation time is an integer count of microseconds since start. Events are
ordered by ``(time, sequence)`` where the sequence number is the insertion
order, so two runs that schedule the same events in the same order produce
the same trace.
"""

from __future__ import annotations

import heapq
import itertools
from typing import Any, Callable, NamedTuple

US_PER_S = 1_000_000


def to_us(seconds_: float) -> int:
    """Seconds -> integer microseconds (rounded to nearest)."""
    return int(round(seconds_ * US_PER_S))


def seconds(us: int) -> float:
    return us / US_PER_S


class EngineState(NamedTuple):
    now: int
    processed: int
    pending: int


class Engine:
    def __init__(self, trace: bool = False):
        self.now = 0
        self.processed = 0
        self._queue: list = []
        self._seq = itertools.count()
        # (time, seq, handler name) for every executed event when enabled
        self.trace: list[tuple[int, int, str]] | None = [] if trace else None

    def schedule(self, t: int, fn: Callable[..., Any], *args: Any) -> None:
        if t < self.now:
            raise ValueError(f"cannot schedule at {t} us, clock is already at {self.now} us")
        heapq.heappush(self._queue, (t, next(self._seq), fn, args))

    def schedule_in(self, delay: int, fn: Callable[..., Any], *args: Any) -> None:
        self.schedule(self.now + delay, fn, *args)

    def peek(self) -> int | None:
        return self._queue[0][0] if self._queue else None

    def run_until(self, t: int) -> EngineState:
        """Process every event with timestamp <= ``t`` then advance the clock to ``t``."""
        if t < self.now:
            raise ValueError(f"run_until({t}) is in the past (now={self.now})")
        queue = self._queue
        pop = heapq.heappop
        trace = self.trace
        n = 0
        while queue and queue[0][0] <= t:
            when, seq, fn, args = pop(queue)
            self.now = when
            if trace is not None:
                trace.append((when, seq, getattr(fn, "__qualname__", repr(fn))))
            fn(*args)
            n += 1
        self.now = t
        self.processed += n
        return EngineState(self.now, self.processed, len(queue))
