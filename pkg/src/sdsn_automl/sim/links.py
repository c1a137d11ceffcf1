"""Capacity-limited FIFO links.

Each direction of a physical link is a single deterministic server of
``capacity_pps`` packets per second behind a finite queue. A packet that
arrives at time t waits for the residual backlog, is served for 1/capacity
seconds and then propagates. Time inside a link is tracked in "scaled" units
(microseconds x capacity) so that service times of 1e6/capacity microseconds
accumulate without rounding drift; delivery times are rounded up to whole
microseconds.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

_SERVICE = 1_000_000  # one packet's service time in scaled units


@dataclass(frozen=True)
class LinkParams:
    propagation_delay_us: int
    capacity_pps: int
    queue_capacity: int

    def __post_init__(self):
        if self.capacity_pps <= 0:
            raise ValueError(f"capacity_pps must be > 0, got {self.capacity_pps}")
        if self.queue_capacity < 1:
            raise ValueError(f"queue_capacity must be >= 1, got {self.queue_capacity}")
        if self.propagation_delay_us < 0:
            raise ValueError("propagation_delay_us must be >= 0")

    @property
    def service_time_us(self) -> float:
        return 1e6 / self.capacity_pps


class Link:
    """One direction of a link (``src`` -> ``dst``)."""

    __slots__ = ("src", "dst", "params", "_cap", "_prop", "_qcap", "_busy",
                 "_in_flight", "enqueued", "dropped", "delivered")

    def __init__(self, src: str, dst: str, params: LinkParams):
        self.src = src
        self.dst = dst
        self.params = params
        self._cap = params.capacity_pps
        self._prop = params.propagation_delay_us
        self._qcap = params.queue_capacity
        self._busy = 0  # scaled time at which the server finishes its backlog
        self._in_flight: deque[int] = deque()  # delivery times, non-decreasing
        self.enqueued = 0
        self.dropped = 0
        self.delivered = 0

    def occupancy(self, t: int) -> int:
        """Packets waiting or in service at time ``t``.

        Every packet whose service ends after t belongs to the busy period
        containing t, so they are spaced exactly one service time apart.
        """
        backlog = self._busy - t * self._cap
        if backlog <= 0:
            return 0
        return -(-backlog // _SERVICE)

    def queueing_delay_us(self, t: int) -> float:
        return max(0, self._busy - t * self._cap) / self._cap

    def enqueue(self, t: int) -> int | None:
        """Offer a packet at time ``t``; return its delivery time at the far
        end, or None if the queue is full and the packet is dropped."""
        self.enqueued += 1
        self._settle(t)
        now = t * self._cap
        busy = self._busy
        if busy - now > (self._qcap - 1) * _SERVICE:
            # full: ceil(backlog / service) >= queue_capacity
            self.dropped += 1
            return None
        busy = (busy if busy > now else now) + _SERVICE
        self._busy = busy
        at = -(-busy // self._cap) + self._prop
        self._in_flight.append(at)
        return at

    def _settle(self, t: int) -> None:
        q = self._in_flight
        while q and q[0] <= t:
            q.popleft()
            self.delivered += 1

    def in_flight(self, t: int) -> int:
        self._settle(t)
        return len(self._in_flight)

    def counters(self, t: int) -> dict[str, int]:
        self._settle(t)
        return {
            "enqueued": self.enqueued,
            "delivered": self.delivered,
            "dropped": self.dropped,
            "in_flight": len(self._in_flight),
        }
