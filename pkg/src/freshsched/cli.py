"""Command line experiment runner.

Subcommands:
  simulate  policy-comparison grids under common random numbers, CSV out
  verify    brute-force greedy-optimality check on random small instances
  replay    re-run a persisted counterexample witness
  bench     per-slot timing across flow counts and kernels
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import _kernel
from .bench import compare_kernels, run_bench
from .config import SimConfig, emit_config, parse_config
from .engine import run_horizon, write_trace_jsonl
from .metrics import METRIC_NAMES, write_reports_csv
from .oracle import (
    MAX_FLOWS,
    MAX_HORIZON,
    OracleSizeError,
    enumerate_max,
    random_instance,
    replay_witness,
    write_witness,
)
from .policies import POLICIES
from .randomness import make_plan
from .runner import run_experiment

DEFAULT_POLICIES = ["hlf-d", "hlf", "edf", "llf"]
FIG_T_GRID = list(range(100, 1001, 100))
PRESETS = {"fig4", "fig5", "fig6", "custom"}


def _parse_grid(text: str) -> list[int]:
    if ":" in text:
        lo, hi, step = (int(x) for x in text.split(":"))
        return list(range(lo, hi + 1, step))
    return [int(x) for x in text.split(",")]


def _build_config(args) -> SimConfig:
    if args.config:
        cfg = parse_config(Path(args.config).read_text())
    else:
        cfg = SimConfig()
    overrides = {}
    for arg_name, field in [
        ("M", "flows"), ("p", "channel_on_prob"), ("seed", "seed"),
        ("reps", "replications"), ("alpha", "weight"), ("beta", "beta"),
        ("gamma", "gamma"),
    ]:
        value = getattr(args, arg_name, None)
        if value is not None:
            overrides[field] = value
    return cfg.with_(**overrides) if overrides else cfg


def cmd_simulate(args) -> int:
    try:
        cfg = _build_config(args)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    policies = args.policy.split(",") if args.policy else list(DEFAULT_POLICIES)
    for p in policies:
        if p not in POLICIES:
            print(f"unknown policy {p!r}", file=sys.stderr)
            return 2
    t_grid = _parse_grid(args.T) if args.T else list(FIG_T_GRID)
    if args.preset != "custom" and not args.T:
        t_grid = list(FIG_T_GRID)

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"output directory not writable: {exc}", file=sys.stderr)
        return 2

    cfg = cfg.with_(horizon=t_grid[-1])
    result = run_experiment(cfg, policies, t_grid, cfg.replications)

    (out / "config.txt").write_text(emit_config(cfg))
    reports = [result.reports[(p, t)] for p in policies for t in t_grid]
    write_reports_csv(reports, out / "metrics.csv")

    if args.preset == "fig4":
        _write_metric_csv(out / "fig4_exwsuoi.csv", result, policies, t_grid, "exwsuoi")
    elif args.preset == "fig5":
        for name in ("avg_aoi", "avg_latency", "rms_jitter"):
            _write_metric_csv(out / f"fig5_{name}.csv", result, policies, t_grid, name)
    elif args.preset == "fig6":
        _write_means_over_t(out / "fig6_means_over_T.csv", result, policies, t_grid)

    if args.traces:
        for p in policies:
            for t in t_grid:
                trace = run_horizon(cfg, p, 0, plan=make_plan(cfg, 0, horizon=t_grid[-1]), horizon=t)
                write_trace_jsonl(trace, out / f"trace_{p}_T{t}_rep0.jsonl")

    if result.invariant_violations:
        print(f"WARNING: {result.invariant_violations} structural invariant violations", file=sys.stderr)
    print(f"wrote {out / 'metrics.csv'} ({len(policies)} policies x {len(t_grid)} horizons x {cfg.replications} reps)")
    return 0


def _write_metric_csv(path, result, policies, t_grid, metric) -> None:
    with open(path, "w") as fh:
        fh.write("policy,T,mean,ci_half_width\n")
        for p in policies:
            for t in t_grid:
                s = getattr(result.reports[(p, t)], metric)
                fh.write(f"{p},{t},{s.mean:.12g},{s.ci_half_width:.12g}\n")


def _write_means_over_t(path, result, policies, t_grid) -> None:
    with open(path, "w") as fh:
        fh.write("policy,metric,mean_over_T\n")
        for p in policies:
            for metric in METRIC_NAMES:
                grid_mean = sum(getattr(result.reports[(p, t)], metric).mean for t in t_grid) / len(t_grid)
                fh.write(f"{p},{metric},{grid_mean:.12g}\n")


def cmd_verify(args) -> int:
    if args.max_flows > MAX_FLOWS or args.max_horizon > MAX_HORIZON:
        print(
            f"bounds {args.max_flows} flows x {args.max_horizon} slots exceed the "
            f"oracle limits ({MAX_FLOWS} x {MAX_HORIZON})",
            file=sys.stderr,
        )
        return 2
    if args.count == 0:
        print("verify: count=0, nothing checked (pass)")
        return 0

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    failures = 0
    for n in range(args.count):
        flows = int(rng.integers(1, args.max_flows + 1))
        horizon = int(rng.integers(2, args.max_horizon + 1))
        inst = random_instance(rng, flows, horizon)
        try:
            verdict = enumerate_max(inst, include_idle=not args.work_conserving)
        except OracleSizeError as exc:
            print(f"instance {n}: {exc}", file=sys.stderr)
            return 2
        if not verdict.greedy_optimal:
            failures += 1
            path = out / f"witness_{n:05d}.json"
            write_witness(verdict.counterexample, path)
            if failures <= 5:
                print(
                    f"instance {n}: greedy {verdict.hlf_d_total} < max {verdict.max_total} "
                    f"-> {path}"
                )
    print(f"verify: {args.count - failures}/{args.count} instances greedy-optimal "
          f"({'idle allowed' if not args.work_conserving else 'work-conserving rivals only'})")
    return 1 if failures else 0


def cmd_replay(args) -> int:
    verdict = replay_witness(args.witness)
    print(f"greedy total: {verdict.hlf_d_total}")
    print(f"max total:    {verdict.max_total}")
    print(f"greedy optimal: {verdict.greedy_optimal}")
    return 0 if verdict.greedy_optimal else 1


def cmd_bench(args) -> int:
    flow_grid = [int(x) for x in args.M.split(",")]
    policies = args.policy.split(",") if args.policy else list(DEFAULT_POLICIES)
    rows = run_bench(flow_grid, policies, slots=args.slots, repeats=args.repeats, seed=args.seed or 12345)
    print(f"kernel backend: {_kernel.BACKEND}")
    print("policy,flows,us_per_slot,linear_ratio")
    for r in rows:
        print(f"{r.policy},{r.flows},{r.seconds_per_slot * 1e6:.3f},{r.linear_ratio:.3f}")
    if args.compare_kernels:
        cmp = compare_kernels(slots=args.slots)
        print(
            f"kernel comparison (M=64): selected={cmp['selected_s_per_slot']*1e6:.3f} us/slot, "
            f"pure={cmp['pure_s_per_slot']*1e6:.3f} us/slot, speedup={cmp['speedup']:.1f}x"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freshsched", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run policy-comparison experiments")
    sim.add_argument("--preset", choices=sorted(PRESETS), default="custom")
    sim.add_argument("--policy", help="comma-separated policy names (default: hlf-d,hlf,edf,llf)")
    sim.add_argument("--T", help="horizon grid, 'lo:hi:step' or comma list (default 100:1000:100)")
    sim.add_argument("--M", type=int, help="number of flows")
    sim.add_argument("--p", type=float, help="channel ON probability")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--reps", type=int, help="replications per cell")
    sim.add_argument("--alpha", type=float)
    sim.add_argument("--beta", type=float)
    sim.add_argument("--gamma", type=float)
    sim.add_argument("--config", help="flat key = value config file")
    sim.add_argument("--out", default="results")
    sim.add_argument("--traces", action="store_true", help="export replication-0 traces as JSONL")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="brute-force greedy optimality check")
    ver.add_argument("--max-flows", type=int, default=3)
    ver.add_argument("--max-horizon", type=int, default=6)
    ver.add_argument("--count", type=int, default=1000)
    ver.add_argument("--seed", type=int, default=12345)
    ver.add_argument("--work-conserving", action="store_true",
                     help="enumerate work-conserving rivals only (no idling)")
    ver.add_argument("--out", default="witnesses")
    ver.set_defaults(func=cmd_verify)

    rep = sub.add_parser("replay", help="re-run a persisted witness file")
    rep.add_argument("witness")
    rep.set_defaults(func=cmd_replay)

    ben = sub.add_parser("bench", help="per-slot timing")
    ben.add_argument("--M", default="16,256,1024")
    ben.add_argument("--slots", type=int, default=2000)
    ben.add_argument("--repeats", type=int, default=3)
    ben.add_argument("--seed", type=int)
    ben.add_argument("--policy", help="comma-separated policy names")
    ben.add_argument("--compare-kernels", action="store_true")
    ben.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
