from fractions import Fraction

import numpy as np
import pytest

from conftest import make_instance
from freshsched.config import SimConfig
from freshsched.engine import run_horizon
from freshsched.oracle import (
    MAX_FLOWS,
    MAX_HORIZON,
    OracleSizeError,
    check_order_preservation,
    check_paired_dominance,
    check_paired_dominance_arrays,
    enumerate_max,
    greedy_schedule,
    random_instance,
    replay_witness,
    run_schedule,
    write_witness,
)
from freshsched.randomness import make_plan


def test_refuses_oversized_instances():
    big = make_instance(
        flows=MAX_FLOWS + 1, horizon=2, channel_on=[1, 1],
        c=1, d=2, initial_age=[1] * (MAX_FLOWS + 1),
    )
    with pytest.raises(OracleSizeError, match="exceeds"):
        enumerate_max(big)
    long = make_instance(
        flows=1, horizon=MAX_HORIZON + 1, channel_on=[1] * (MAX_HORIZON + 1),
        c=1, d=2, initial_age=[1],
    )
    with pytest.raises(OracleSizeError):
        enumerate_max(long)


def test_single_flow_degenerate_case():
    # the flow starts critical (latency 0, laxity 0): serving it is
    # maximizing, idling would drop it for the same first-slot utility
    inst = make_instance(
        flows=1, horizon=2, channel_on=[1, 1], c=1, d=1, initial_age=[2],
    )
    verdict = enumerate_max(inst)
    assert verdict.greedy_optimal
    assert verdict.hlf_d_total == verdict.max_total
    assert verdict.hlf_d_schedule[0] == 0
    assert isinstance(verdict.max_total, Fraction)


def test_exact_arithmetic_when_exponents_are_one():
    rng = np.random.default_rng(1)
    inst = random_instance(rng, 2, 3)
    verdict = enumerate_max(inst)
    assert isinstance(verdict.max_total, Fraction)
    assert isinstance(verdict.hlf_d_total, Fraction)
    assert verdict.hlf_d_total <= verdict.max_total


def test_replaying_schedules_reproduces_totals():
    # the oracle must reuse the engine mechanics: replaying any schedule
    # it produced gives back the exact same total
    rng = np.random.default_rng(2)
    for _ in range(10):
        inst = random_instance(rng, int(rng.integers(1, 4)), int(rng.integers(2, 6)))
        verdict = enumerate_max(inst)
        assert run_schedule(inst, verdict.hlf_d_schedule) == verdict.hlf_d_total
        for sched in verdict.optimal_schedules:
            assert run_schedule(inst, sched) == verdict.max_total


def test_greedy_schedule_matches_engine_policy():
    rng = np.random.default_rng(3)
    inst = random_instance(rng, 3, 6)
    sched, total = greedy_schedule(inst)
    cfg = SimConfig(flows=3, horizon=6, replications=1)
    trace = run_horizon(cfg, "hlf-d", plan=inst.to_plan())
    assert sched == [rec.decision for rec in trace.records]


def test_dropping_an_early_critical_costs_utility():
    # flow 0 is critical at slot 1; a deadline-blind schedule serves
    # flow 1 instead, flow 0 is dropped, and the total strictly suffers
    inst = make_instance(
        flows=2, horizon=4, channel_on=[1, 1, 1, 1],
        c=[[1] * 6, [1] * 6], d=[[1, 1, 3, 3, 3, 3], [5] * 6],
        initial_age=[2, 3],
    )
    greedy_sched, greedy_total = greedy_schedule(inst)
    assert greedy_sched[0] == 0
    cfg = SimConfig(flows=2, horizon=4, replications=1)
    blind_trace = run_horizon(cfg, "hlf", plan=inst.to_plan())
    blind = [rec.decision for rec in blind_trace.records]
    assert blind[0] == 1
    assert run_schedule(inst, blind) < greedy_total


def test_witness_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    counterexample = None
    for _ in range(60):
        inst = random_instance(rng, int(rng.integers(1, 4)), int(rng.integers(2, 7)))
        verdict = enumerate_max(inst)
        if not verdict.greedy_optimal:
            counterexample = verdict.counterexample
            break
    assert counterexample is not None, "expected at least one gap instance in 60 draws"
    path = tmp_path / "witness.json"
    write_witness(counterexample, path)
    replayed = replay_witness(path)
    assert not replayed.greedy_optimal
    assert str(replayed.max_total) == counterexample["max_total"]
    assert str(replayed.hlf_d_total) == counterexample["hlf_d_total"]


def test_work_conserving_enumeration_is_a_subset():
    rng = np.random.default_rng(11)
    for _ in range(5):
        inst = random_instance(rng, 2, 4)
        full = enumerate_max(inst, include_idle=True)
        wc = enumerate_max(inst, include_idle=False)
        assert wc.max_total <= full.max_total


# trace dominance checks --------------------------------------------------------------


def test_order_preservation_holds_on_simulated_traces():
    cfg = SimConfig(flows=16, horizon=200, replications=1)
    total_pairs = 0
    for policy in ("hlf-d", "hlf", "edf", "llf", "random"):
        for rep in range(3):
            trace = run_horizon(cfg, policy, replication=rep)
            violations, pairs = check_order_preservation(trace)
            assert violations == []
            total_pairs += pairs
    assert total_pairs > 10_000


def test_paired_dominance_identical_traces_have_no_violations(tiny_cfg):
    plan = make_plan(tiny_cfg, 0)
    a = run_horizon(tiny_cfg, "hlf-d", plan=plan)
    b = run_horizon(tiny_cfg, "hlf-d", plan=plan)
    assert check_paired_dominance(a, b) == []


def test_paired_dominance_rejects_mismatched_plans(tiny_cfg):
    a = run_horizon(tiny_cfg, "hlf-d", replication=0)
    b = run_horizon(tiny_cfg, "random", replication=1)
    with pytest.raises(ValueError, match="different randomness plans"):
        check_paired_dominance(a, b)


def test_paired_dominance_array_form():
    count_g = np.array([3, 3, 2, 4])
    count_o = np.array([3, 4, 2, 2])      # slot 2: other has more actives
    crit_g = np.array([-1, 2, 5, -1])
    crit_o = np.array([4, 1, -1, 3])      # slot 2: other critical fresher
    count_v, crit_v, both = check_paired_dominance_arrays(count_g, crit_g, count_o, crit_o)
    assert count_v == 1
    assert crit_v == 1
    assert both == 1


def test_paired_dominance_array_form_rejects_shape_mismatch():
    with pytest.raises(ValueError, match="horizons"):
        check_paired_dominance_arrays([1, 2], [0, 0], [1], [0])
