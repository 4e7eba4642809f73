"""Multi-link device layer: shared queues served by independently contending links.

A device owns one FIFO per destination. Any link may serve any queue
(maximum opportunism); packets are popped when committed to a transmission,
so a packet can never ride two links at once. Failed subframes return to the
head of their queue in their original order. One configured link degenerates
to single-link operation with no behavioral difference.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SimulationError
from .phy import LinkConfig

MODE_SLO = "SLO"
MODE_MLO_STR = "MLO_STR"


@dataclass(frozen=True, slots=True)
class MldConfig:
    """Link set and operating mode for one multi-link association."""

    links: tuple[LinkConfig, ...]
    mode: str = MODE_SLO

    def __post_init__(self) -> None:
        if self.mode not in (MODE_SLO, MODE_MLO_STR):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not self.links:
            raise ConfigError("at least one link is required")
        if self.mode == MODE_SLO and len(self.links) != 1:
            raise ConfigError("single-link mode requires exactly one link")
        ids = [lk.link_id for lk in self.links]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate link ids")


class InFlightSet:
    """Packet ids currently committed to an in-progress transmission.

    Guards the anti-duplication invariant: committing an id twice is an
    internal error, not a recoverable condition.
    """

    __slots__ = ("_ids",)

    def __init__(self) -> None:
        self._ids: set[int] = set()

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, pid: int) -> bool:
        return pid in self._ids

    def commit(self, pids: list[int]) -> None:
        for pid in pids:
            if pid in self._ids:
                raise SimulationError(f"packet {pid} committed to two transmissions")
            self._ids.add(pid)

    def release(self, pids: list[int]) -> None:
        for pid in pids:
            self._ids.discard(pid)


def select_destination(
    queues: dict[int, deque], enqueued_at: np.ndarray
) -> int | None:
    """Destination whose head-of-line packet has waited longest.

    Ties break toward the lowest destination id. Returns None when every
    queue is empty (e.g. all traffic is in flight on another link).
    """
    best: int | None = None
    best_t = 0.0
    for dest in sorted(queues):
        q = queues[dest]
        if not q:
            continue
        t = enqueued_at[q[0]]
        if best is None or t < best_t:
            best, best_t = dest, t
    return best


def allocate_txop(
    queue: deque,
    mpdu_bits: np.ndarray,
    bit_budget: int,
    max_mpdus: int,
    inflight: InFlightSet,
) -> list[int]:
    """Pop head-of-line packets for one aggregate and mark them in flight.

    Takes subframes while they fit the airtime bit budget and the subframe
    cap; always takes at least one so a single oversized packet cannot
    stall the queue forever.
    """
    taken: list[int] = []
    used = 0
    while queue and len(taken) < max_mpdus:
        bits = int(mpdu_bits[queue[0]])
        if taken and used + bits > bit_budget:
            break
        taken.append(queue.popleft())
        used += bits
    inflight.commit(taken)
    return taken


def release_inflight(
    queue: deque, sent: list[int], delivered: list[bool], inflight: InFlightSet
) -> list[int]:
    """Resolve one completed aggregate: clear marks, requeue the failures.

    Failed packets go back to the queue head preserving their original
    relative order, ahead of anything that arrived meanwhile. Returns the
    failed ids (their retry accounting is the caller's job).
    """
    if len(sent) != len(delivered):
        raise SimulationError("outcome bitmap size mismatch")
    inflight.release(sent)
    failed = [pid for pid, ok in zip(sent, delivered) if not ok]
    for pid in reversed(failed):
        queue.appendleft(pid)
    return failed
