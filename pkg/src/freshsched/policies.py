"""Scheduling policies over a read-only snapshot of the active flows.

A decision is a flow id, or None for idle. Every policy is a pure
function of the snapshot (plus one uniform variate for the random
policy, which the deterministic policies ignore). Ties are broken by
lowest flow id so runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class FlowView:
    """Per-flow values a policy may condition on."""

    id: int
    latency: int
    utility: float
    priority: float     # math.inf marks the hard critical
    laxity: int
    deadline: int       # absolute deadline a + d
    arrival: int


@dataclass(frozen=True)
class ActiveSnapshot:
    """Active, non-dropped flows at one slot, ordered by flow id."""

    t: int
    flows: tuple[FlowView, ...]
    hard_critical: int | None   # id, present only on channel-ON slots with a critical


def hlf_d(snapshot: ActiveSnapshot, u: float = 0.0) -> int | None:
    """Deadline-aware highest latency first: the hard critical if one
    exists, else the active flow with the highest latency."""
    if snapshot.hard_critical is not None:
        return snapshot.hard_critical
    if not snapshot.flows:
        return None
    return max(snapshot.flows, key=lambda f: (f.latency, -f.id)).id


def hlf(snapshot: ActiveSnapshot, u: float = 0.0) -> int | None:
    """Highest latency first, blind to deadlines and criticality."""
    if not snapshot.flows:
        return None
    return max(snapshot.flows, key=lambda f: (f.latency, -f.id)).id


def edf(snapshot: ActiveSnapshot, u: float = 0.0) -> int | None:
    """Earliest (absolute) deadline first; ties by earlier arrival, then id."""
    if not snapshot.flows:
        return None
    return min(snapshot.flows, key=lambda f: (f.deadline, f.arrival, f.id)).id


def llf(snapshot: ActiveSnapshot, u: float = 0.0) -> int | None:
    """Least laxity first; ties by lowest id."""
    if not snapshot.flows:
        return None
    return min(snapshot.flows, key=lambda f: (f.laxity, f.id)).id


def random_policy(snapshot: ActiveSnapshot, u: float = 0.0) -> int | None:
    """Uniform choice over the active flows, driven by a dedicated
    pre-drawn stream."""
    if not snapshot.flows:
        return None
    idx = int(u * len(snapshot.flows))
    if idx == len(snapshot.flows):  # u == 1.0 edge
        idx -= 1
    return snapshot.flows[idx].id


POLICIES = {
    "hlf-d": hlf_d,
    "hlf": hlf,
    "edf": edf,
    "llf": llf,
    "random": random_policy,
}

# integer codes shared with the compiled kernel
POLICY_CODES = {"hlf-d": 0, "hlf": 1, "edf": 2, "llf": 3, "random": 4}


def get_policy(name: str):
    try:
        return POLICIES[name]
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; choose from {sorted(POLICIES)}") from None
