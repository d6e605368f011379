"""Shared fixtures and small-instance builders for the test suite."""

import numpy as np
import pytest

from freshsched.config import SimConfig
from freshsched.oracle import SmallInstance


def make_instance(flows, horizon, channel_on, c, d, initial_age):
    """Explicit SmallInstance from python lists.

    ``c`` and ``d`` may be scalars (constant per flow and sample) or
    (flows, horizon + 2) nested lists.
    """
    k = horizon + 2
    c_table = np.full((flows, k), c, dtype=np.int64) if np.isscalar(c) else np.asarray(c, dtype=np.int64)
    d_table = np.full((flows, k), d, dtype=np.int64) if np.isscalar(d) else np.asarray(d, dtype=np.int64)
    return SmallInstance(
        flows=flows,
        horizon=horizon,
        channel_on=np.asarray(channel_on, dtype=np.uint8),
        c_table=c_table,
        d_table=d_table,
        initial_age=np.asarray(initial_age, dtype=np.int64),
    )


@pytest.fixture
def default_cfg():
    return SimConfig()


@pytest.fixture
def tiny_cfg():
    """Desk-scale parameters that keep samples short-lived."""
    return SimConfig(flows=3, horizon=30, actuation_hi=4, rel_deadline_hi=5, replications=3)
