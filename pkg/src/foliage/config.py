"""Numerical thresholds shared across the package."""

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Thresholds:
    # eigenvalues below kernel_tol * max(1, largest eigenvalue) count as zero
    kernel_tol: float = 1e-8
    # operator identities: residual relative to max(1, size of the terms)
    identity_tol: float = 1e-10
    # harmonic dimensions are compared between K and K + stability_step
    stability_step: int = 2
    # relative residual below which a class is declared trivial
    class_tol: float = 1e-8
    # structural zero tests (anticommutators, bidegree leakage)
    structure_tol: float = 1e-9


DEFAULTS = Thresholds()


def worker_count() -> int:
    """Thread count from ``FOLIAGE_THREADS``, defaulting to the number of logical cores."""
    default = os.cpu_count() or 1
    raw = os.environ.get("FOLIAGE_THREADS")
    if raw is None:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default
