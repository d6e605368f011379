"""Kernel selection: compiled extension when available, pure Python otherwise."""

try:
    from ._simloop import simulate_metrics
    BACKEND = "cython"
except ImportError:  # source checkout without a built extension
    from ._pure import simulate_metrics
    BACKEND = "python"

from ._pure import simulate_metrics as simulate_metrics_pure, PENDING

__all__ = ["simulate_metrics", "simulate_metrics_pure", "BACKEND", "PENDING"]
