"""Per-flow state and the pure freshness/laxity/utility/priority calculus.

All quantities are integer slot counts except freshness, utility and
priority. The age of a flow decomposes at every slot into

    age = processing time (1) + previous actuation duration + latency

for flows that currently hold a sensed, unserved sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .config import SimConfig


class Mode(Enum):
    INACTIVE = "inactive"
    ACTIVE = "active"
    OUT_OF_SERVICE = "out_of_service"


@dataclass
class FlowState:
    """One sensor-actuator pair.

    ``arrival`` is None while the next sample has not been sensed yet
    (the actuator is still busy); it may be <= 0 for samples sensed
    before the horizon started. ``rel_deadline`` is mutable: the grace
    mechanism extends it one slot at a time.
    """

    id: int
    sample_index: int = 1           # k, index of the current sample
    arrival: int | None = None      # a, slot the current sample was sensed
    actuation_prev: int = 0         # c, actuation duration of sample k-1
    rel_deadline: int | None = None  # d, relative deadline of sample k
    age: int = 1                    # h, slots since the last processed sample was sensed
    dropped: bool = False

    def copy(self) -> "FlowState":
        return replace(self)


def latency(flow: FlowState, t: int) -> int:
    """Slots the current sample has waited unserved; 0 before sensing."""
    if flow.arrival is None:
        return 0
    return t - 1 - flow.arrival


def freshness(lat: int) -> float:
    """1 / (latency + processing time); maximal for a just-sensed sample."""
    if lat < 0:
        raise ValueError(f"latency must be >= 0, got {lat}")
    return 1.0 / (lat + 1)


def absolute_deadline(flow: FlowState) -> int:
    if flow.arrival is None or flow.rel_deadline is None:
        raise ValueError(f"flow {flow.id} has no sensed sample")
    return flow.arrival + flow.rel_deadline


def laxity(flow: FlowState, t: int) -> int:
    """Slots left until the absolute deadline, after the unit processing
    time is accounted for. Negative once the deadline is missed."""
    return absolute_deadline(flow) - t


def classify_mode(flow: FlowState, t: int) -> Mode:
    if flow.dropped:
        return Mode.OUT_OF_SERVICE
    if flow.arrival is None:
        return Mode.INACTIVE
    if flow.age < flow.actuation_prev + 1:
        return Mode.INACTIVE
    if flow.age >= 1 + flow.actuation_prev + flow.rel_deadline:
        return Mode.OUT_OF_SERVICE
    return Mode.ACTIVE


def utility(flow: FlowState, t: int, cfg: SimConfig) -> float:
    """k * F^beta * X^gamma; zero forever once the deadline is missed."""
    if flow.dropped:
        return 0.0
    if flow.arrival is None:
        return 0.0
    if laxity(flow, t) < 0:
        return 0.0
    f = freshness(latency(flow, t))
    return cfg.k_const * f ** cfg.beta


def priority(flow: FlowState, t: int, cfg: SimConfig) -> float:
    """Reciprocal utility, infinite when the sample would expire if
    unserved this slot (zero laxity)."""
    lx = laxity(flow, t)
    if lx < 0:
        raise ValueError(f"flow {flow.id} is out of service at slot {t}")
    if lx == 0:
        return math.inf
    return (latency(flow, t) + 1) ** cfg.beta / cfg.k_const


def age_step(flow: FlowState, served_ok: bool, next_actuation: int | None = None) -> FlowState:
    """Post-decision age evolution, applied once per flow per slot.

    On successful service the sample index advances, the age resets to
    the unit processing time, and the new actuation duration becomes the
    flow's useful-age component; arrival and deadline stay pending until
    the next sample is sensed. Otherwise the age grows by one slot.
    """
    if served_ok:
        if next_actuation is None:
            raise ValueError("next_actuation is required when serving")
        flow.sample_index += 1
        flow.age = 1
        flow.actuation_prev = next_actuation
        flow.arrival = None
        flow.rel_deadline = None
    else:
        flow.age += 1
    return flow
