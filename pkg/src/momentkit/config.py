"""Tolerances and heuristic thresholds used by approximate code paths.

Exact rational computations never consult these settings.  Floating-point
verdicts, the determinacy heuristics and the perturbation-interval bisection
do; every threshold is pinned here so test suites can assert against fixed
values.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from fractions import Fraction

ENV_PRECISION = "MOMENTKIT_PRECISION"


@dataclass(frozen=True)
class Settings:
    #: relative tolerance for floating-point positivity verdicts
    float_tolerance: float = 1e-9
    #: full principal-minor PSD scans run for matrix orders up to this cap
    psd_order_cap: int = 8
    #: recurrence coefficients are cross-checked against determinant ratios
    #: up to this depth (cheap at low orders, expensive beyond)
    coeff_validation_depth: int = 8
    #: Weyl radius below this value counts as a collapsed (point) circle
    radius_threshold: float = 1e-8
    #: partial Carleman sums growing at least this fraction of N look divergent
    growth_ratio: float = 0.9
    #: depth at which the growth heuristic is evaluated
    growth_depth: int = 50
    #: log-log slope of partial sums above this counts as divergence
    slope_cutoff: float = 0.2
    #: Carleman summands below this value by ``decay_depth`` look convergent
    decay_threshold: float = 1e-3
    decay_depth: int = 20
    #: resolution of perturbation-interval bisection (exact rational)
    bisection_tol: Fraction = Fraction(1, 10**9)

    def with_tolerance(self, tol: float) -> "Settings":
        return replace(self, float_tolerance=tol)


DEFAULT = Settings()


def from_env() -> Settings:
    """Settings with ``MOMENTKIT_PRECISION`` applied, when set.

    The variable holds a relative float tolerance such as ``1e-12``.
    """
    raw = os.environ.get(ENV_PRECISION)
    if not raw:
        return DEFAULT
    try:
        tol = float(raw)
    except ValueError:
        raise ValueError(f"{ENV_PRECISION} must be a float, got {raw!r}")
    if not tol > 0:
        raise ValueError(f"{ENV_PRECISION} must be positive, got {raw!r}")
    return DEFAULT.with_tolerance(tol)
