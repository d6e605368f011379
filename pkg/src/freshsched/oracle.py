"""Brute-force verification of greedy optimality at desk scale.

``enumerate_max`` walks every admissible decision sequence (including
idling) of a small explicit instance through the exact engine slot
mechanics and compares the best attainable total utility with the
total the greedy deadline-aware policy achieves on the same instance.
Totals are exact rationals when the utility exponents and constants are
1, so equality checks carry no floating-point slack.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import SimConfig
from .engine import SimState, Trace, begin_slot, finish_slot
from .model import Mode
from .policies import hlf_d
from .randomness import RandomnessPlan

MAX_FLOWS = 4
MAX_HORIZON = 8
MAX_LEAVES = 500_000


class OracleSizeError(ValueError):
    pass


@dataclass
class SmallInstance:
    """Fully explicit desk-scale scenario: no randomness left."""

    flows: int
    horizon: int
    channel_on: np.ndarray   # uint8 (horizon,)
    c_table: np.ndarray      # int64 (flows, horizon + 2)
    d_table: np.ndarray      # int64 (flows, horizon + 2)
    initial_age: np.ndarray  # int64 (flows,)

    def to_plan(self) -> RandomnessPlan:
        return RandomnessPlan(
            seed=0,
            replication=0,
            horizon=self.horizon,
            channel_on=np.asarray(self.channel_on, dtype=np.uint8),
            c_table=np.asarray(self.c_table, dtype=np.int64),
            d_table=np.asarray(self.d_table, dtype=np.int64),
            initial_age=np.asarray(self.initial_age, dtype=np.int64),
            policy_u=np.zeros(self.horizon),
        )

    def to_json(self) -> dict:
        return {
            "flows": self.flows,
            "horizon": self.horizon,
            "channel_on": np.asarray(self.channel_on).astype(int).tolist(),
            "c_table": np.asarray(self.c_table).astype(int).tolist(),
            "d_table": np.asarray(self.d_table).astype(int).tolist(),
            "initial_age": np.asarray(self.initial_age).astype(int).tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SmallInstance":
        return cls(
            flows=data["flows"],
            horizon=data["horizon"],
            channel_on=np.asarray(data["channel_on"], dtype=np.uint8),
            c_table=np.asarray(data["c_table"], dtype=np.int64),
            d_table=np.asarray(data["d_table"], dtype=np.int64),
            initial_age=np.asarray(data["initial_age"], dtype=np.int64),
        )


@dataclass
class OracleVerdict:
    max_total: Fraction | float
    hlf_d_total: Fraction | float
    hlf_d_schedule: list
    optimal_schedules: list        # capped sample of maximizing decision sequences
    optimal_count: int
    counterexample: dict | None    # replayable witness when greedy < max

    @property
    def greedy_optimal(self) -> bool:
        return self.counterexample is None


def _instance_config(instance: SmallInstance, base: SimConfig | None) -> SimConfig:
    if base is None:
        base = SimConfig()
    return base.with_(flows=instance.flows, horizon=instance.horizon, replications=1)


def _slot_utilities(ctx, exact: bool, cfg: SimConfig):
    if exact:
        return sum(
            (Fraction(1, s.latency + 1) for s in ctx.flow_samples if s.mode is Mode.ACTIVE),
            Fraction(0),
        )
    return sum(s.utility for s in ctx.flow_samples if s.mode is Mode.ACTIVE)


def run_schedule(instance: SmallInstance, schedule, cfg: SimConfig | None = None):
    """Replay an explicit decision sequence through the engine; returns
    the total active-set utility (exact when exponents/constants are 1)."""
    cfg = _instance_config(instance, cfg)
    exact = cfg.beta == 1.0 and cfg.gamma == 1.0 and cfg.k_const == 1.0
    state = SimState(cfg, instance.to_plan())
    total = Fraction(0) if exact else 0.0
    for t in range(instance.horizon):
        ctx = begin_slot(state)
        total += _slot_utilities(ctx, exact, cfg)
        finish_slot(state, ctx, schedule[t])
    return total


def greedy_schedule(instance: SmallInstance, cfg: SimConfig | None = None):
    """The deadline-aware highest-latency-first schedule and its total."""
    cfg = _instance_config(instance, cfg)
    exact = cfg.beta == 1.0 and cfg.gamma == 1.0 and cfg.k_const == 1.0
    state = SimState(cfg, instance.to_plan())
    total = Fraction(0) if exact else 0.0
    schedule = []
    for t in range(instance.horizon):
        ctx = begin_slot(state)
        total += _slot_utilities(ctx, exact, cfg)
        decision = hlf_d(ctx.snapshot)
        schedule.append(decision)
        finish_slot(state, ctx, decision)
    return schedule, total


def enumerate_max(
    instance: SmallInstance,
    cfg: SimConfig | None = None,
    include_idle: bool = True,
    max_kept_schedules: int = 8,
    tol: float = 1e-12,
) -> OracleVerdict:
    """Exhaustively search all admissible decision sequences.

    Depth-first over the decision tree, cloning engine state at each
    branch; the per-slot mechanics (sensing, grace, drops, aging) are
    the engine's own, not a reimplementation.
    """
    if instance.flows > MAX_FLOWS or instance.horizon > MAX_HORIZON:
        raise OracleSizeError(
            f"instance {instance.flows} flows x {instance.horizon} slots exceeds "
            f"the enumeration bounds ({MAX_FLOWS} x {MAX_HORIZON})"
        )
    leaves = (instance.flows + 1) ** instance.horizon
    if leaves > MAX_LEAVES:
        raise OracleSizeError(
            f"{leaves} decision sequences exceed the {MAX_LEAVES} enumeration budget"
        )

    cfg = _instance_config(instance, cfg)
    exact = cfg.beta == 1.0 and cfg.gamma == 1.0 and cfg.k_const == 1.0
    horizon = instance.horizon

    best = [None]
    best_schedules = []
    optimal_count = [0]

    def consider(total, schedule):
        if best[0] is None or total > best[0]:
            best[0] = total
            best_schedules.clear()
            best_schedules.append(list(schedule))
            optimal_count[0] = 1
        elif total == best[0] or (not exact and abs(total - best[0]) <= tol):
            optimal_count[0] += 1
            if len(best_schedules) < max_kept_schedules:
                best_schedules.append(list(schedule))

    schedule = []

    def recurse(state, acc):
        if state.t > horizon:
            consider(acc, schedule)
            return
        ctx = begin_slot(state)
        acc = acc + _slot_utilities(ctx, exact, cfg)
        choices = [f.id for f in ctx.snapshot.flows]
        if include_idle or not choices:
            choices = choices + [None]
        for decision in choices:
            nxt = state.clone()
            finish_slot(nxt, ctx, decision)
            schedule.append(decision)
            recurse(nxt, acc)
            schedule.pop()

    recurse(SimState(cfg, instance.to_plan()), Fraction(0) if exact else 0.0)

    hlf_d_sched, hlf_d_total = greedy_schedule(instance, cfg)
    max_total = best[0]
    if exact:
        suboptimal = hlf_d_total < max_total
    else:
        suboptimal = hlf_d_total < max_total - tol

    counterexample = None
    if suboptimal:
        counterexample = {
            "instance": instance.to_json(),
            "include_idle": include_idle,
            "hlf_d_total": str(hlf_d_total),
            "max_total": str(max_total),
            "hlf_d_schedule": hlf_d_sched,
            "optimal_schedule": best_schedules[0],
        }
    return OracleVerdict(
        max_total=max_total,
        hlf_d_total=hlf_d_total,
        hlf_d_schedule=hlf_d_sched,
        optimal_schedules=best_schedules,
        optimal_count=optimal_count[0],
        counterexample=counterexample,
    )


def random_instance(rng: np.random.Generator, flows: int, horizon: int,
                    c_range=(1, 4), d_range=(1, 5),
                    channel_bits=None) -> SmallInstance:
    """Draw a desk-scale instance; ranges default small so sensing,
    criticality, grace, drops and re-activation all occur within the
    short horizon."""
    k = horizon + 2
    c_table = rng.integers(c_range[0], c_range[1] + 1, size=(flows, k), dtype=np.int64)
    d_table = rng.integers(d_range[0], d_range[1] + 1, size=(flows, k), dtype=np.int64)
    initial_age = rng.integers(1, c_table[:, 0] + d_table[:, 1] + 1, dtype=np.int64)
    if channel_bits is None:
        channel_bits = (rng.random(horizon) < 0.8).astype(np.uint8)
    else:
        channel_bits = np.asarray(channel_bits, dtype=np.uint8)
    return SmallInstance(flows, horizon, channel_bits, c_table, d_table, initial_age)


def write_witness(counterexample: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(counterexample, fh, indent=2)


def replay_witness(path, cfg: SimConfig | None = None) -> OracleVerdict:
    """Re-run a persisted counterexample; the verdict must reproduce."""
    with open(path) as fh:
        data = json.load(fh)
    instance = SmallInstance.from_json(data["instance"])
    return enumerate_max(instance, cfg, include_idle=data.get("include_idle", True))


# ---------------------------------------------------------------------------
# Dominance checks over traces


def check_order_preservation(trace: Trace):
    """Utility-order preservation for unserved non-critical pairs.

    Returns (violations, pairs_scanned). A violation is a pair whose
    utility ordering at slot t inverts at t+1 although neither flow was
    served; with utilities monotone in latency this reduces to latency
    order preservation and is expected to be empty.
    """
    violations = []
    pairs = 0
    for prev, nxt in zip(trace.records, trace.records[1:]):
        nxt_lat = {s.id: s.latency for s in nxt.flows if s.mode is Mode.ACTIVE}
        cand = [
            s for s in prev.flows
            if s.mode is Mode.ACTIVE
            and s.laxity is not None and s.laxity > 0
            and not (prev.served_ok and prev.decision == s.id)
            and s.id in nxt_lat
        ]
        for x in range(len(cand)):
            for y in range(x + 1, len(cand)):
                i, j = cand[x], cand[y]
                if i.latency < j.latency:
                    i, j = j, i
                pairs += 1
                # U_i <= U_j since L_i >= L_j; require the same at t+1
                if nxt_lat[i.id] < nxt_lat[j.id]:
                    violations.append((prev.t, i.id, j.id))
    return violations, pairs


def check_paired_dominance(trace_greedy: Trace, trace_other: Trace):
    """Per-slot active-count and critical-utility comparisons between a
    greedy trace and any other policy's trace under one randomness plan.

    Returns a list of (t, kind) violations, kind in {"count", "critical"}.
    """
    if trace_greedy.plan_fingerprint != trace_other.plan_fingerprint:
        raise ValueError("traces come from different randomness plans")
    violations = []
    for rec_g, rec_o in zip(trace_greedy.records, trace_other.records):
        count_g = sum(1 for s in rec_g.flows if s.mode is Mode.ACTIVE)
        count_o = sum(1 for s in rec_o.flows if s.mode is Mode.ACTIVE)
        if count_g < count_o:
            violations.append((rec_g.t, "count"))
        if rec_g.hard_critical is not None and rec_o.hard_critical is not None:
            lat_g = rec_g.flows[rec_g.hard_critical].latency
            lat_o = rec_o.flows[rec_o.hard_critical].latency
            # U(critical under other) <= U(critical under greedy)
            # is latency(other) >= latency(greedy)
            if lat_o < lat_g:
                violations.append((rec_g.t, "critical"))
    return violations


def check_paired_dominance_arrays(count_greedy, critlat_greedy, count_other, critlat_other):
    """Array form of check_paired_dominance over kernel per-slot outputs.

    Returns (count_violations, critical_violations, both_critical_slots).
    """
    count_greedy = np.asarray(count_greedy)
    count_other = np.asarray(count_other)
    critlat_greedy = np.asarray(critlat_greedy)
    critlat_other = np.asarray(critlat_other)
    if count_greedy.shape != count_other.shape:
        raise ValueError("traces have different horizons")
    count_v = int(np.sum(count_greedy < count_other))
    both = (critlat_greedy >= 0) & (critlat_other >= 0)
    crit_v = int(np.sum(both & (critlat_other < critlat_greedy)))
    return count_v, crit_v, int(both.sum())
