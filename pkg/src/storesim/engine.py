"""Deterministic discrete-event core.

A single priority queue of events ordered by (fire_at, seq), an integer
nanosecond clock, and the FIFO service-queue abstraction every modeled
component (network, storage, manager, client) is built on.  Integer time
plus the monotone insertion sequence makes runs bit-reproducible: two
events at the same instant always fire in the order they were scheduled.
"""

from __future__ import annotations

import heapq
from collections import deque
from typing import Any, Callable

from .errors import (
    ConservationError,
    EventBudgetExceeded,
    ScheduleInPastError,
)

# Virtual time: non-negative nanoseconds since simulation start.
VirtualTime = int

DEFAULT_EVENT_BUDGET = 10**9


class SimEvent:
    """Timestamped unit of work.

    target is either a callable invoked as target(payload), or a key
    previously registered with Simulator.register().
    """

    __slots__ = ("fire_at", "seq", "target", "payload")

    def __init__(self, fire_at: VirtualTime, target, payload: Any = None):
        self.fire_at = fire_at
        self.seq = -1  # assigned by the simulator on schedule()
        self.target = target
        self.payload = payload

    def __lt__(self, other: "SimEvent") -> bool:
        return (self.fire_at, self.seq) < (other.fire_at, other.seq)

    def __repr__(self) -> str:
        return f"SimEvent(fire_at={self.fire_at}, seq={self.seq}, target={self.target!r})"


class Simulator:
    """Event loop with a virtual clock and drain-time conservation checks."""

    def __init__(self, event_budget: int = DEFAULT_EVENT_BUDGET):
        self.now: VirtualTime = 0
        self.event_budget = event_budget
        self.events_processed = 0
        self.handlers: dict[Any, Callable[[Any], None]] = {}
        self.services: list[Service] = []
        self._heap: list[tuple[int, int, Callable[[Any], None], Any]] = []
        self._seq = 0
        # Service conservation counters (see run_until_idle).
        self._submitted = 0
        self._completed = 0

    def register(self, key, handler: Callable[[Any], None]) -> None:
        """Bind an entity identifier (e.g. (host, kind)) to a handler."""
        self.handlers[key] = handler

    def schedule(self, event: SimEvent) -> None:
        """Queue event; pop order respects (fire_at, seq)."""
        if event.fire_at < self.now:
            raise ScheduleInPastError(
                f"event at t={event.fire_at} scheduled while clock is {self.now}"
            )
        target = event.target
        fn = target if callable(target) else self.handlers[target]
        event.seq = self._seq
        self._push(event.fire_at, fn, event.payload)

    def at(self, t: VirtualTime, fn: Callable[[Any], None], payload: Any = None) -> None:
        if t < self.now:
            raise ScheduleInPastError(f"event at t={t} scheduled while clock is {self.now}")
        self._push(t, fn, payload)

    def after(self, dt: int, fn: Callable[[Any], None], payload: Any = None) -> None:
        self.at(self.now + dt, fn, payload)

    def _push(self, t, fn, payload) -> None:
        heapq.heappush(self._heap, (t, self._seq, fn, payload))
        self._seq += 1

    def run_until_idle(self) -> VirtualTime:
        """Process events until the queue drains; returns the final clock.

        Raises EventBudgetExceeded when the event budget is consumed
        (turns runaway-model bugs into a diagnostic instead of a hang) and
        ConservationError if any service still holds unserviced work at
        drain time.
        """
        heap = self._heap
        pop = heapq.heappop
        budget = self.event_budget
        n = self.events_processed
        try:
            while heap:
                t, _, fn, payload = pop(heap)
                self.now = t
                n += 1
                if n > budget:
                    raise EventBudgetExceeded(
                        f"event budget {budget} exhausted at t={t} "
                        f"({len(heap)} events still queued)"
                    )
                fn(payload)
        finally:
            self.events_processed = n
        if self._submitted != self._completed:
            raise ConservationError(
                f"{self._submitted - self._completed} requests submitted but never serviced"
            )
        for svc in self.services:
            if svc.in_service is not None or svc.pending:
                raise ConservationError(f"service {svc.name} not idle at drain time")
        return self.now


class Service:
    """FIFO queue that services one request at a time.

    service_ns(req) yields the integer service duration; on_complete(req,
    sim) runs when service finishes and may submit follow-up work to any
    service, including this one.
    """

    __slots__ = ("sim", "name", "service_ns", "on_complete", "pending", "in_service", "busy_until")

    def __init__(self, sim: Simulator, name: str, service_ns, on_complete):
        self.sim = sim
        self.name = name
        self.service_ns = service_ns
        self.on_complete = on_complete
        self.pending: deque = deque()
        self.in_service = None
        self.busy_until: VirtualTime = 0
        sim.services.append(self)

    def submit(self, req) -> None:
        self.sim._submitted += 1
        if self.in_service is None and not self.pending:
            self._begin(req)
        else:
            self.pending.append(req)

    def _begin(self, req) -> None:
        self.in_service = req
        end = self.sim.now + self.service_ns(req)
        self.busy_until = end
        self.sim.at(end, self._finish, req)

    def _finish(self, req) -> None:
        sim = self.sim
        sim._completed += 1
        self.in_service = None
        self.on_complete(req, sim)
        # on_complete may have restarted this service via a reentrant submit
        if self.pending and self.in_service is None:
            self._begin(self.pending.popleft())
