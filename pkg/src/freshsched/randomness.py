"""Pre-drawn randomness shared by every policy of one replication.

All stochastic inputs of a run (channel bits, per-sample actuation
durations and relative deadlines, initial ages, and the stream feeding
the random policy) are fixed up front by (seed, replication). Sample
draws are indexed by (flow, sample index), so a given sample sees the
same actuation duration and deadline no matter which policy is running
or when the sample is sensed. This is what makes paired policy
comparisons under common random numbers meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SimConfig


@dataclass
class RandomnessPlan:
    seed: int
    replication: int
    horizon: int
    channel_on: np.ndarray      # uint8, shape (horizon,)
    c_table: np.ndarray         # int64, shape (M, horizon + 2); column k holds c_i(k)
    d_table: np.ndarray         # int64, shape (M, horizon + 2); column k holds d_i(k), k >= 1
    initial_age: np.ndarray     # int64, shape (M,)
    policy_u: np.ndarray        # float64, shape (horizon,), dedicated to the random policy

    @property
    def flows(self) -> int:
        return self.c_table.shape[0]

    def fingerprint(self) -> tuple:
        return (self.seed, self.replication, self.horizon, self.flows)


def make_plan(cfg: SimConfig, replication: int, horizon: int | None = None) -> RandomnessPlan:
    """Draw one replication's full randomness plan.

    Philox is counter-based, so the plan is a pure function of
    (cfg.seed, replication) and the array shapes.
    """
    t = cfg.horizon if horizon is None else horizon
    m = cfg.flows
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(replication, 0)))
    )
    channel_on = (rng.random(t) < cfg.channel_on_prob).astype(np.uint8)
    c_table = rng.integers(cfg.actuation_lo, cfg.actuation_hi + 1, size=(m, t + 2), dtype=np.int64)
    d_table = rng.integers(cfg.rel_deadline_lo, cfg.rel_deadline_hi + 1, size=(m, t + 2), dtype=np.int64)
    # initial age is uniform on {1 .. c_i(0) + d_i(1)}, strictly below the
    # out-of-service threshold 1 + c_i(0) + d_i(1)
    initial_age = rng.integers(1, c_table[:, 0] + d_table[:, 1] + 1, dtype=np.int64)

    policy_rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(replication, 1)))
    )
    policy_u = policy_rng.random(t)

    return RandomnessPlan(
        seed=cfg.seed,
        replication=replication,
        horizon=t,
        channel_on=channel_on,
        c_table=c_table,
        d_table=d_table,
        initial_age=initial_age,
        policy_u=policy_u,
    )
