import math

import pytest

from freshsched.config import SimConfig
from freshsched.engine import FlowSample, SlotRecord, Trace, run_horizon
from freshsched.metrics import (
    CSV_HEADER,
    ReplicationMetrics,
    aggregate,
    average_aoi,
    average_latency,
    censored_delay_mean,
    objective_value,
    report_csv_rows,
    rms_jitter,
    trace_metrics,
    write_reports_csv,
)
from freshsched.model import Mode


def sample(fid=0, mode=Mode.ACTIVE, age=1, lat=0, lax=5, util=1.0):
    return FlowSample(id=fid, mode=mode, age=age, latency=lat, laxity=lax,
                      utility=util, priority=None)


def record(t, flows, delta=None, served=False, dropped=None):
    return SlotRecord(
        t=t, channel_on=True, active_ids=[], critical_ids=[],
        hard_critical=None, graced_ids=[], decision=None,
        served_ok=served, dropped_id=dropped, service_delta=delta, flows=flows,
    )


def trace(records, flows=1):
    cfg = SimConfig(flows=flows, horizon=len(records), replications=1)
    return Trace(config=cfg, replication=0, policy_name="hlf-d",
                 records=records, final_flows=[], plan_fingerprint=(0, 0, 0, flows)), cfg


# objective ---------------------------------------------------------------


def test_objective_constant_unit_utility():
    tr, cfg = trace([record(t, [sample(util=1.0)]) for t in range(1, 6)])
    assert objective_value(tr, cfg) == pytest.approx(1.0)


def test_objective_zero_after_drop():
    utils = [0.5, 0.25, 0.0, 0.0]
    recs = [
        record(t + 1, [sample(util=u, mode=Mode.ACTIVE if u else Mode.OUT_OF_SERVICE)])
        for t, u in enumerate(utils)
    ]
    tr, cfg = trace(recs)
    assert objective_value(tr, cfg) == pytest.approx((0.5 + 0.25) / 4)


def test_objective_ignores_inactive_flows():
    recs = [record(1, [sample(util=1.0), sample(fid=1, mode=Mode.INACTIVE, util=0.7)])]
    tr, cfg = trace(recs, flows=2)
    assert objective_value(tr, cfg) == pytest.approx(0.5)


def test_objective_scales_with_weight():
    tr, cfg = trace([record(1, [sample(util=0.5)])])
    assert objective_value(tr, cfg.with_(weight=2.0)) == pytest.approx(1.0)


# age and latency -----------------------------------------------------------


def test_average_aoi_never_served():
    recs = [record(t, [sample(age=t + 1)]) for t in range(1, 4)]  # h = 2, 3, 4
    tr, cfg = trace(recs)
    assert average_aoi(tr, cfg) == pytest.approx(3.0)


def test_average_aoi_served_every_slot():
    tr, cfg = trace([record(t, [sample(age=1)]) for t in range(1, 6)])
    assert average_aoi(tr, cfg) == pytest.approx(1.0)


def test_average_latency_growing():
    recs = [record(t, [sample(lat=t - 1)]) for t in range(1, 4)]  # L = 0, 1, 2
    tr, cfg = trace(recs)
    assert average_latency(tr, cfg) == pytest.approx(1.0)


def test_latency_never_exceeds_age_on_real_traces():
    cfg = SimConfig(flows=4, horizon=60, actuation_hi=5, rel_deadline_hi=6, replications=1)
    for policy in ("hlf-d", "random"):
        tr = run_horizon(cfg, policy)
        assert average_latency(tr, cfg) <= average_aoi(tr, cfg)


def test_objective_normalization_on_real_traces():
    cfg = SimConfig(flows=4, horizon=60, actuation_hi=5, rel_deadline_hi=6, replications=1)
    for policy in ("hlf-d", "hlf", "edf", "llf", "random"):
        value = objective_value(run_horizon(cfg, policy), cfg)
        assert 0.0 <= value <= cfg.weight * cfg.k_const


# jitter ---------------------------------------------------------------------


def test_jitter_two_samples():
    recs = [record(1, [], delta=2, served=True), record(2, [], delta=4, served=True)]
    tr, _ = trace(recs)
    assert rms_jitter(tr) == pytest.approx(1.0)


def test_jitter_equal_deltas_is_zero():
    recs = [record(t, [], delta=3, served=True) for t in range(1, 5)]
    tr, _ = trace(recs)
    assert rms_jitter(tr) == 0.0


def test_jitter_three_samples():
    recs = [record(t, [], delta=d, served=True) for t, d in enumerate((1, 1, 4), 1)]
    tr, _ = trace(recs)
    assert rms_jitter(tr) == pytest.approx(math.sqrt(2))


def test_jitter_no_served_samples_is_zero():
    tr, _ = trace([record(1, [sample()])])
    assert rms_jitter(tr) == 0.0


def test_censored_delay_separate_from_jitter():
    # one sample still waiting at the end contributes to the censored
    # diagnostic, not to jitter
    recs = [
        record(1, [sample(lat=0)], delta=2, served=True),
        record(2, [sample(lat=3)]),
    ]
    tr, cfg = trace(recs)
    assert rms_jitter(tr) == 0.0
    assert censored_delay_mean(tr) == pytest.approx(4.0)
    m = trace_metrics(tr, cfg)
    assert m.samples_served == 1 and m.censored_delay_mean == pytest.approx(4.0)


# aggregation -----------------------------------------------------------------


def rep(x):
    return ReplicationMetrics(exwsuoi=x, avg_aoi=x, avg_latency=x,
                              rms_jitter=x, drop_count=0, samples_served=1)


def test_aggregate_single_replication():
    report = aggregate("hlf-d", 100, [rep(0.5)])
    assert report.exwsuoi.mean == 0.5
    assert report.exwsuoi.ci_half_width == 0.0


def test_aggregate_identical_replications():
    report = aggregate("hlf-d", 100, [rep(0.5)] * 10)
    assert report.exwsuoi.mean == pytest.approx(0.5)
    assert report.exwsuoi.ci_half_width == pytest.approx(0.0)


def test_aggregate_two_values():
    report = aggregate("edf", 100, [rep(1.0), rep(3.0)])
    assert report.exwsuoi.mean == pytest.approx(2.0)
    # s = sqrt(2), half-width = 1.96 * sqrt(2) / sqrt(2) = 1.96
    assert report.exwsuoi.ci_half_width == pytest.approx(1.96)
    assert report.exwsuoi.values == (1.0, 3.0)


def test_aggregate_requires_replications():
    with pytest.raises(ValueError):
        aggregate("hlf-d", 100, [])


# CSV -------------------------------------------------------------------------


def test_csv_rows_schema():
    report = aggregate("llf", 300, [rep(1.0), rep(3.0)])
    rows = report_csv_rows(report)
    assert rows[0] == "llf,300,exwsuoi,2,1.96,2"
    assert len(rows) == 6
    assert {r.split(",")[2] for r in rows} == {
        "exwsuoi", "avg_aoi", "avg_latency", "rms_jitter", "drop_count", "samples_served",
    }


def test_write_reports_csv(tmp_path):
    path = tmp_path / "metrics.csv"
    write_reports_csv([aggregate("hlf-d", 100, [rep(0.5)])], path)
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 7
