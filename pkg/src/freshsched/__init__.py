"""Deadline-aware age-of-information scheduling simulator.

Discrete-time simulation of a symmetric wireless sensor-actuator
network sharing one unreliable TDMA channel, with a deadline-aware
highest-latency-first greedy policy, classical baselines, a
freshness/utility metrics pipeline, and a brute-force optimality
oracle for desk-scale instances.
"""

from ._kernel import BACKEND as kernel_backend
from .config import SimConfig, emit_config, parse_config
from .engine import Trace, run_horizon, write_trace_jsonl
from .metrics import MetricsReport, ReplicationMetrics, trace_metrics
from .oracle import SmallInstance, enumerate_max
from .policies import POLICIES
from .randomness import RandomnessPlan, make_plan
from .runner import run_experiment, run_replication

__version__ = "0.1.0"
__all__ = [
    "SimConfig", "emit_config", "parse_config",
    "Trace", "run_horizon", "write_trace_jsonl",
    "MetricsReport", "ReplicationMetrics", "trace_metrics",
    "SmallInstance", "enumerate_max",
    "POLICIES", "RandomnessPlan", "make_plan",
    "run_experiment", "run_replication",
    "kernel_backend",
]
