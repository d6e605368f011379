"""Per-slot timing of the scheduling loop.

The loop does a constant number of passes over the flows per slot, so
per-slot wall time should scale linearly in the flow count. The slot
length of the modeled TDMA frame (10 ms) is a semantic label only;
nothing here sleeps.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import _kernel
from .config import SimConfig
from .policies import POLICY_CODES
from .randomness import make_plan


@dataclass(frozen=True)
class BenchRow:
    policy: str
    flows: int
    slots: int
    seconds_per_slot: float
    linear_ratio: float     # measured / linear extrapolation from the smallest M


def _time_once(cfg: SimConfig, policy: str, slots: int, kernel) -> float:
    plan = make_plan(cfg, 0, horizon=slots)
    start = time.perf_counter()
    kernel(
        POLICY_CODES[policy], slots,
        plan.channel_on, plan.c_table, plan.d_table,
        plan.initial_age, plan.policy_u,
        cfg.beta, cfg.k_const,
    )
    return time.perf_counter() - start


def run_bench(
    flow_grid: list[int],
    policies: list[str],
    slots: int = 2000,
    repeats: int = 3,
    seed: int = 12345,
    kernel=None,
) -> list[BenchRow]:
    """Time each (policy, M) cell; ratios are relative to a linear
    extrapolation from the smallest M in the grid."""
    if sorted(flow_grid) != list(flow_grid) or not flow_grid:
        raise ValueError("flow grid must be nonempty and ascending")
    kernel = _kernel.simulate_metrics if kernel is None else kernel
    rows = []
    for policy in policies:
        base_per_slot = None
        for m in flow_grid:
            cfg = SimConfig(flows=m, horizon=slots, seed=seed)
            best = min(_time_once(cfg, policy, slots, kernel) for _ in range(repeats))
            per_slot = best / slots
            if base_per_slot is None:
                base_per_slot = per_slot
                ratio = 1.0
            else:
                ratio = per_slot / (base_per_slot * m / flow_grid[0])
            rows.append(BenchRow(policy, m, slots, per_slot, ratio))
    return rows


def compare_kernels(flows: int = 64, slots: int = 2000, repeats: int = 3,
                    policy: str = "hlf-d", seed: int = 12345) -> dict:
    """Time the selected backend against the pure-Python fallback."""
    cfg = SimConfig(flows=flows, horizon=slots, seed=seed)
    out = {"backend": _kernel.BACKEND}
    out["selected_s_per_slot"] = min(
        _time_once(cfg, policy, slots, _kernel.simulate_metrics) for _ in range(repeats)
    ) / slots
    out["pure_s_per_slot"] = min(
        _time_once(cfg, policy, slots, _kernel.simulate_metrics_pure) for _ in range(repeats)
    ) / slots
    out["speedup"] = out["pure_s_per_slot"] / out["selected_s_per_slot"]
    return out
