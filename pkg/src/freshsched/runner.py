"""Experiment fast path: replication grids through the metrics kernel.

For a horizon grid the randomness plan of each replication is drawn
once at the largest horizon and every shorter run uses its prefix, so
policies AND grid points share common random numbers. Replications are
deterministic per (seed, replication) regardless of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .config import SimConfig
from .metrics import MetricsReport, ReplicationMetrics, aggregate
from .policies import POLICY_CODES
from .randomness import RandomnessPlan, make_plan


@dataclass
class ReplicationRun:
    """Kernel output of one (policy, horizon, replication) run."""

    metrics: ReplicationMetrics
    invariant_violations: int
    active_count: np.ndarray    # per-slot non-dummy active counts
    crit_latency: np.ndarray    # per-slot hard-critical latency, -1 when absent


def run_replication(
    cfg: SimConfig,
    policy: str,
    plan: RandomnessPlan,
    horizon: int | None = None,
    kernel=None,
) -> ReplicationRun:
    t = plan.horizon if horizon is None else horizon
    if t > plan.horizon:
        raise ValueError(f"plan covers {plan.horizon} slots, horizon {t} requested")
    simulate = _kernel.simulate_metrics if kernel is None else kernel
    active_count = np.empty(t, dtype=np.int64)
    crit_latency = np.empty(t, dtype=np.int64)
    (
        sum_util, sum_age, sum_lat, drops, served,
        sum_delta, sum_delta_sq, violations, censored_sum, censored_n,
    ) = simulate(
        POLICY_CODES[policy],
        t,
        plan.channel_on,
        plan.c_table,
        plan.d_table,
        plan.initial_age,
        plan.policy_u,
        cfg.beta,
        cfg.k_const,
        active_count,
        crit_latency,
    )
    tm = t * cfg.flows
    if served > 0:
        mean_delta = sum_delta / served
        var = sum_delta_sq / served - mean_delta * mean_delta
        jitter = math.sqrt(max(var, 0.0))
    else:
        jitter = 0.0
    metrics = ReplicationMetrics(
        exwsuoi=cfg.weight * sum_util / tm,
        avg_aoi=sum_age / tm,
        avg_latency=sum_lat / tm,
        rms_jitter=jitter,
        drop_count=int(drops),
        samples_served=int(served),
        censored_delay_mean=censored_sum / censored_n if censored_n else 0.0,
    )
    return ReplicationRun(metrics, int(violations), active_count, crit_latency)


@dataclass
class ExperimentResult:
    reports: dict         # (policy, T) -> MetricsReport
    invariant_violations: int
    per_rep: dict = field(default_factory=dict)  # (policy, T) -> list[ReplicationMetrics]


def run_experiment(
    cfg: SimConfig,
    policies: list[str],
    t_grid: list[int],
    replications: int | None = None,
    kernel=None,
) -> ExperimentResult:
    """Simulate every (policy, T, replication) cell under common random
    numbers and aggregate per-cell Monte Carlo summaries."""
    if not t_grid or sorted(t_grid) != list(t_grid):
        raise ValueError("t_grid must be nonempty and ascending")
    if not policies:
        raise ValueError("need at least one policy")
    n = cfg.replications if replications is None else replications
    t_max = t_grid[-1]

    per_rep: dict = {(p, t): [] for p in policies for t in t_grid}
    violations = 0
    for rep in range(n):
        plan = make_plan(cfg, rep, horizon=t_max)
        for policy in policies:
            for t in t_grid:
                run = run_replication(cfg, policy, plan, horizon=t, kernel=kernel)
                per_rep[(policy, t)].append(run.metrics)
                violations += run.invariant_violations

    reports = {
        (policy, t): aggregate(policy, t, reps)
        for (policy, t), reps in per_rep.items()
    }
    return ExperimentResult(reports=reports, invariant_violations=violations, per_rep=per_rep)
