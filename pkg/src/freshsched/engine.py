"""Per-slot closed-loop simulation.

Each slot runs the same fixed sequence:

1. flows whose age reached actuation+1 sense a new sample (arrival and
   deadline become fixed),
2. modes are classified,
3. conflict avoidance graces criticals so at most one hard critical
   remains (none on channel-OFF slots),
4. the policy decides over the active snapshot,
5. on a channel-ON slot the decision is served,
6. an unserved hard critical is dropped (the flow stays in the system
   as a zero-utility dummy that keeps aging),
7. every unserved flow ages one slot.

The stepping functions are exposed separately from run_horizon so the
brute-force oracle can branch over decisions through the exact same
mechanics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .config import SimConfig
from .model import FlowState, Mode, classify_mode, latency, laxity, utility, priority, age_step
from .policies import ActiveSnapshot, FlowView
from .randomness import RandomnessPlan, make_plan


@dataclass(frozen=True)
class FlowSample:
    """Per-flow audit values at one slot (post-grace, pre-decision)."""

    id: int
    mode: Mode
    age: int
    latency: int
    laxity: int | None      # None before the first sample is sensed
    utility: float
    priority: float | None  # None unless active; math.inf for the hard critical


@dataclass
class SlotRecord:
    t: int
    channel_on: bool
    active_ids: list[int]
    critical_ids: list[int]         # zero-laxity actives before conflict avoidance
    hard_critical: int | None
    graced_ids: list[int]
    decision: int | None
    served_ok: bool
    dropped_id: int | None
    service_delta: int | None       # latency at service + 1, for jitter
    flows: list[FlowSample] = field(default_factory=list)


@dataclass
class Trace:
    config: SimConfig
    replication: int
    policy_name: str
    records: list[SlotRecord]
    final_flows: list[FlowState]
    plan_fingerprint: tuple


class SimState:
    """Mutable world state between slots."""

    __slots__ = ("t", "flows", "cfg", "plan")

    def __init__(self, cfg: SimConfig, plan: RandomnessPlan):
        self.cfg = cfg
        self.plan = plan
        self.t = 1
        self.flows = [_initial_flow(i, plan) for i in range(plan.flows)]

    def clone(self) -> "SimState":
        other = SimState.__new__(SimState)
        other.cfg = self.cfg
        other.plan = self.plan
        other.t = self.t
        other.flows = [f.copy() for f in self.flows]
        return other


def _initial_flow(i: int, plan: RandomnessPlan) -> FlowState:
    c0 = int(plan.c_table[i, 0])
    h0 = int(plan.initial_age[i])
    flow = FlowState(id=i, sample_index=1, actuation_prev=c0, age=h0)
    if h0 >= c0 + 1:
        # active start, arrival back-dated so that age = 1 + c + latency
        flow.arrival = c0 + 1 - h0
        flow.rel_deadline = int(plan.d_table[i, 1])
    return flow


@dataclass
class SlotContext:
    """Everything known after conflict avoidance, before the decision."""

    t: int
    channel_on: bool
    snapshot: ActiveSnapshot
    critical_ids: list[int]
    hard_critical: int | None
    graced_ids: list[int]
    flow_samples: list[FlowSample]


def apply_conflict_avoidance(
    flows: list[FlowState], channel_on: bool, t: int
) -> tuple[int | None, list[int]]:
    """Grace criticals so at most one hard critical survives the slot.

    On channel-OFF slots every critical's deadline is extended by one
    slot. On channel-ON slots the critical with the highest utility
    (lowest latency; ties to the lowest id) keeps its hard deadline and
    the rest are graced.
    """
    criticals = [
        f for f in flows
        if not f.dropped and f.arrival is not None
        and classify_mode(f, t) is Mode.ACTIVE and laxity(f, t) == 0
    ]
    if not criticals:
        return None, []
    if not channel_on:
        for f in criticals:
            f.rel_deadline += 1
        return None, [f.id for f in criticals]
    hard = min(criticals, key=lambda f: (latency(f, t), f.id))
    graced = []
    for f in criticals:
        if f.id != hard.id:
            f.rel_deadline += 1
            graced.append(f.id)
    return hard.id, graced


def begin_slot(state: SimState) -> SlotContext:
    """Activation, classification and conflict avoidance for slot t.

    Mutates the state (sensing fixes arrivals/deadlines; grace extends
    deadlines) and returns the policy-facing context.
    """
    t = state.t
    cfg = state.cfg
    plan = state.plan
    channel_on = bool(plan.channel_on[t - 1])

    for f in state.flows:
        if not f.dropped and f.arrival is None and f.age >= f.actuation_prev + 1:
            f.arrival = t - 1
            f.rel_deadline = int(plan.d_table[f.id, f.sample_index])

    critical_ids = [
        f.id for f in state.flows
        if not f.dropped and f.arrival is not None
        and classify_mode(f, t) is Mode.ACTIVE and laxity(f, t) == 0
    ]
    hard, graced = apply_conflict_avoidance(state.flows, channel_on, t)

    views = []
    samples = []
    for f in state.flows:
        mode = classify_mode(f, t)
        lat = latency(f, t) if f.arrival is not None else 0
        lax = laxity(f, t) if f.arrival is not None else None
        util = utility(f, t, cfg)
        pri = priority(f, t, cfg) if mode is Mode.ACTIVE else None
        samples.append(FlowSample(f.id, mode, f.age, lat, lax, util, pri))
        if mode is Mode.ACTIVE:
            views.append(FlowView(f.id, lat, util, pri, lax, f.arrival + f.rel_deadline, f.arrival))

    snapshot = ActiveSnapshot(t=t, flows=tuple(views), hard_critical=hard)
    return SlotContext(t, channel_on, snapshot, critical_ids, hard, graced, samples)


def finish_slot(state: SimState, ctx: SlotContext, decision: int | None) -> SlotRecord:
    """Apply a decision: service, drop, and age evolution. Advances t."""
    active_ids = [v.id for v in ctx.snapshot.flows]
    if decision is not None and decision not in set(active_ids):
        raise ValueError(
            f"policy scheduled flow {decision} at slot {ctx.t}, which is not active"
        )

    served_ok = ctx.channel_on and decision is not None
    dropped_id = None
    delta = None

    if ctx.channel_on and ctx.hard_critical is not None and ctx.hard_critical != decision:
        hard_flow = state.flows[ctx.hard_critical]
        hard_flow.dropped = True
        dropped_id = hard_flow.id

    for f in state.flows:
        if served_ok and f.id == decision:
            delta = latency(f, ctx.t) + 1
            next_c = int(state.plan.c_table[f.id, f.sample_index])
            age_step(f, True, next_c)
        else:
            age_step(f, False)

    state.t = ctx.t + 1
    return SlotRecord(
        t=ctx.t,
        channel_on=ctx.channel_on,
        active_ids=active_ids,
        critical_ids=ctx.critical_ids,
        hard_critical=ctx.hard_critical,
        graced_ids=ctx.graced_ids,
        decision=decision,
        served_ok=served_ok,
        dropped_id=dropped_id,
        service_delta=delta,
        flows=ctx.flow_samples,
    )


def run_horizon(
    cfg: SimConfig,
    policy_name: str,
    replication: int = 0,
    plan: RandomnessPlan | None = None,
    horizon: int | None = None,
) -> Trace:
    """Run one full replication and return its audit trace."""
    from .policies import get_policy

    policy = get_policy(policy_name)
    if plan is None:
        plan = make_plan(cfg, replication, horizon)
    t_end = cfg.horizon if horizon is None else horizon
    if t_end > plan.horizon:
        raise ValueError(f"plan covers {plan.horizon} slots, horizon {t_end} requested")

    state = SimState(cfg, plan)
    records = []
    for _ in range(t_end):
        ctx = begin_slot(state)
        decision = policy(ctx.snapshot, float(plan.policy_u[ctx.t - 1]))
        records.append(finish_slot(state, ctx, decision))
    return Trace(
        config=cfg,
        replication=replication,
        policy_name=policy_name,
        records=records,
        final_flows=state.flows,
        plan_fingerprint=plan.fingerprint(),
    )


def write_trace_jsonl(trace: Trace, path) -> None:
    """One JSON object per slot; infinite priorities are encoded as null
    (see README for the schema)."""
    with open(path, "w") as fh:
        for rec in trace.records:
            fh.write(json.dumps(_record_to_json(rec), separators=(",", ":")) + "\n")


def _record_to_json(rec: SlotRecord) -> dict:
    return {
        "t": rec.t,
        "channel_on": rec.channel_on,
        "active": rec.active_ids,
        "criticals": rec.critical_ids,
        "hard_critical": rec.hard_critical,
        "graced": rec.graced_ids,
        "decision": rec.decision,
        "served_ok": rec.served_ok,
        "dropped": rec.dropped_id,
        "service_delta": rec.service_delta,
        "flows": [
            {
                "id": s.id,
                "mode": s.mode.value,
                "age": s.age,
                "latency": s.latency,
                "laxity": s.laxity,
                "utility": s.utility,
                "priority": None if s.priority is None or math.isinf(s.priority) else s.priority,
                "critical": s.priority is not None and math.isinf(s.priority),
            }
            for s in rec.flows
        ],
    }
