"""Weyl circles, auxiliary partial-sum functions and determinacy diagnostics.

Conventions: the package fixes the resolvent form w(lam) = integral of
d(sigma)/(u - lam), which maps the upper half-plane to itself.  The
constant-parameter transform below follows the same orientation; a single
``conjugate`` flag adapts it to sources that use the mirrored convention.

Determinacy from finitely many moments is never decidable outright, so the
diagnostics report partial sums and radii with a heuristic verdict; only
finite-rank sequences (finitely many points of increase) earn a certified
verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .config import DEFAULT, Settings
from .errors import (
    DegenerateCircle,
    InsufficientTerms,
    NotPositiveDefinite,
    PoleError,
    PrecisionLoss,
    RealLambda,
)
from .measures import DiscreteMeasure, stieltjes_transform
from .orthopoly import RecurrenceCoefficients, evaluate_polys, recurrence_coefficients
from .sequence_core import MomentSequence, hamburger_test
from .rational import all_exact


@dataclass(frozen=True)
class WeylCircle:
    """The circle traced by the truncated continued-fraction tails at lam."""

    lam: complex
    order: int
    center: complex
    radius: float

    def contains(self, w: complex, slack: float = 0.0) -> bool:
        return abs(complex(w) - self.center) <= self.radius + slack


def _check_lambda(lam) -> complex:
    lam = complex(lam)
    if lam.imag == 0:
        raise RealLambda("lambda must have nonzero imaginary part")
    return lam


def weyl_circle(
    coeffs: RecurrenceCoefficients, lam, n: int, dps: Optional[int] = None
) -> WeylCircle:
    """Center and radius of the order-n circle at lam.

    center = -(Q_n conj(P_{n-1}) - Q_{n-1} conj(P_n))
             / (P_n conj(P_{n-1}) - P_{n-1} conj(P_n)),
    radius = 1 / (|lam - conj(lam)| * sum_{k<n} |P_k(lam)|^2).
    """
    lam = _check_lambda(lam)
    if n < 1:
        raise ValueError("circle order must be at least 1")
    polys = evaluate_polys(coeffs, lam, n, dps=dps)
    ps = [complex(p) for p, _ in polys]
    qs = [complex(q) for _, q in polys]
    denom = ps[n] * ps[n - 1].conjugate() - ps[n - 1] * ps[n].conjugate()
    if denom == 0:
        raise DegenerateCircle(f"circle denominator vanished at order {n}")
    center = -(qs[n] * ps[n - 1].conjugate() - qs[n - 1] * ps[n].conjugate()) / denom
    square_sum = sum(abs(p) ** 2 for p in ps[:n])
    radius = 1.0 / (abs(lam - lam.conjugate()) * square_sum)
    return WeylCircle(lam, n, center, radius)


def circle_parametrization(
    coeffs: RecurrenceCoefficients, lam, tau: float, n: int, dps: Optional[int] = None
) -> complex:
    """w_n(lam, tau) = -(Q_n - tau Q_{n-1}) / (P_n - tau P_{n-1}).

    Real tau sweeps the circumference of the order-n circle; tau = +/-inf
    gives the limit point -Q_{n-1}/P_{n-1}.
    """
    lam = _check_lambda(lam)
    if n < 1:
        raise ValueError("order must be at least 1")
    polys = evaluate_polys(coeffs, lam, n, dps=dps)
    ps = [complex(p) for p, _ in polys]
    qs = [complex(q) for _, q in polys]
    if math.isinf(tau):
        num, den = qs[n - 1], ps[n - 1]
    else:
        num = qs[n] - tau * qs[n - 1]
        den = ps[n] - tau * ps[n - 1]
    if den == 0:
        raise PoleError(f"parametrization pole at tau={tau}")
    return -num / den


def circle_equation_residual(
    coeffs: RecurrenceCoefficients, lam, w: complex, n: int
) -> float:
    """Defect of w in the circle equation at order n.

    Zero (within precision) exactly on the circle; positive inside,
    negative outside, with the sign convention anchored to the half-plane
    containing the disks.
    """
    lam = _check_lambda(lam)
    w = complex(w)
    polys = evaluate_polys(coeffs, lam, n)
    total = w.imag / lam.imag
    for k in range(n):
        p, q = polys[k]
        total -= abs(w * complex(p) + complex(q)) ** 2
    return total


def stieltjes_point(measure: DiscreteMeasure, lam) -> complex:
    """Transform of an atomic measure; lies in every disk of its sequence."""
    return stieltjes_transform(measure, _check_lambda(lam))


@dataclass(frozen=True)
class NevanlinnaQuad:
    """Values of the four partial sums A_n, B_n, C_n, D_n at a point."""

    order: int
    z: complex
    a: complex
    b: complex
    c: complex
    d: complex

    @property
    def determinant(self) -> complex:
        """a*d - b*c; tends to 1 as the order grows in the limit-circle case."""
        return self.a * self.d - self.b * self.c


def nevanlinna_partial(
    coeffs: RecurrenceCoefficients, z, n: int
) -> NevanlinnaQuad:
    """Partial sums built from the polynomial values at 0 and z:

    A_n = z sum Q_k(0) Q_k(z)        B_n = -1 + z sum Q_k(0) P_k(z)
    C_n = 1 + z sum P_k(0) Q_k(z)    D_n = z sum P_k(0) P_k(z)

    with k running over 0 .. n-1.
    """
    if n < 1:
        raise ValueError("order must be at least 1")
    z = complex(z)
    at_zero = evaluate_polys(coeffs, 0.0, n - 1)
    at_z = evaluate_polys(coeffs, z, n - 1)
    a = b = c = d = 0j
    for k in range(n):
        p0, q0 = (complex(v) for v in at_zero[k])
        pz, qz = (complex(v) for v in at_z[k])
        a += q0 * qz
        b += q0 * pz
        c += p0 * qz
        d += p0 * pz
    return NevanlinnaQuad(n, z, z * a, -1 + z * b, 1 + z * c, z * d)


def nevanlinna_transform(
    quad: NevanlinnaQuad, phi: float, conjugate: bool = False
) -> complex:
    """-(A phi - C) / (B phi - D) for a real constant phi (or +/-inf).

    phi = inf returns the limit -A/B.  ``conjugate`` flips to the mirrored
    half-plane convention.
    """
    if math.isinf(phi):
        num, den = quad.a, quad.b
    else:
        num = quad.a * phi - quad.c
        den = quad.b * phi - quad.d
    if den == 0:
        raise PoleError(f"transform pole at phi={phi}")
    value = -num / den
    return value.conjugate() if conjugate else value


# ---------------------------------------------------------------------------
# determinacy diagnostics

DETERMINATE_CERTIFIED = "determinate_certified"
LIKELY_DETERMINATE = "likely_determinate"
LIKELY_INDETERMINATE = "likely_indeterminate"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DeterminacyReport:
    verdict: str
    rank: Optional[int]
    carleman_b_partial: Tuple[float, ...]
    carleman_s_partial: Tuple[float, ...]
    carleman_s_summands: Tuple[float, ...]
    radius_sequence: Tuple[float, ...]
    details: dict = field(default_factory=dict)


def _log_scalar(t) -> Optional[float]:
    from fractions import Fraction

    if isinstance(t, Fraction):
        if t <= 0:
            return None
        return math.log(t.numerator) - math.log(t.denominator)
    t = float(t)
    if not (t > 0 and math.isfinite(t)):
        return None
    return math.log(t)


def determinacy_diagnostics(
    seq: MomentSequence,
    coeffs: Optional[RecurrenceCoefficients] = None,
    probe: complex = 1j,
    n_max: int = 20,
    *,
    settings: Settings = DEFAULT,
) -> DeterminacyReport:
    """Partial Carleman sums, circle radii at a probe point, and a verdict.

    Finite-rank sequences certify as determinate.  Otherwise the verdict is
    heuristic: collapsed radii or visibly divergent Carleman sums suggest a
    determinate problem, rapid summand decay an indeterminate one.
    """
    probe = _check_lambda(probe)
    details: dict = {
        "probe": str(probe),
        "thresholds": {
            "radius": settings.radius_threshold,
            "growth_ratio": settings.growth_ratio,
            "slope_cutoff": settings.slope_cutoff,
            "decay_threshold": settings.decay_threshold,
            "decay_depth": settings.decay_depth,
        },
    }
    available = n_max * 2 + 1 if seq.generator is not None else len(seq)

    # finite-rank certification (exact arithmetic only)
    rank = None
    m_detect = min(8, n_max, (available - 1) // 2)
    if m_detect >= 1:
        try:
            verdict = hamburger_test(seq, m_detect, settings=settings)
        except (InsufficientTerms, OverflowError, PrecisionLoss):
            verdict = None
        if (
            verdict is not None
            and verdict.exact
            and verdict.kind == "positive_semidefinite"
            and verdict.leading_rank_consistent
        ):
            rank = verdict.rank

    # Carleman sum over even-moment roots: s_{2n}^{-1/(2n)}
    summands = []
    for n in range(1, n_max + 1):
        try:
            term = seq.term(2 * n)
        except (InsufficientTerms, OverflowError):
            break
        log_term = _log_scalar(term)
        if log_term is None:
            break
        summands.append(math.exp(-log_term / (2 * n)))
    s_partial = []
    acc = 0.0
    for s in summands:
        acc += s
        s_partial.append(acc)

    # recurrence-coefficient sums and probe radii
    if coeffs is None:
        depth_c = min(n_max, 12, (available - 3) // 2)
        if depth_c >= 0:
            try:
                coeffs = recurrence_coefficients(
                    seq,
                    depth_c,
                    allow_rank_deficient=True,
                    validate=False,
                    settings=settings,
                )
            except (InsufficientTerms, NotPositiveDefinite, PrecisionLoss, OverflowError):
                coeffs = None
    b_partial = []
    radii = []
    if coeffs is not None:
        acc = 0.0
        for k in range(1, len(coeffs.b2)):
            if coeffs.b2[k] <= 0:
                break
            acc += 1.0 / coeffs.b_value(k)
            b_partial.append(acc)
        for order in range(1, min(coeffs.poly_depth, n_max, 12) + 1):
            try:
                radii.append(weyl_circle(coeffs, probe, order).radius)
            except (DegenerateCircle, OverflowError, ZeroDivisionError):
                break

    verdict_name, reason = _classify(
        rank, radii, s_partial, summands, settings
    )
    details["reason"] = reason
    if s_partial:
        details["s_growth_fraction"] = s_partial[-1] / len(s_partial)
        details["s_partial_slope"] = _loglog_slope(s_partial)
    return DeterminacyReport(
        verdict=verdict_name,
        rank=rank,
        carleman_b_partial=tuple(b_partial),
        carleman_s_partial=tuple(s_partial),
        carleman_s_summands=tuple(summands),
        radius_sequence=tuple(radii),
        details=details,
    )


def _loglog_slope(partial) -> Optional[float]:
    n = len(partial)
    if n < 8 or partial[n // 2 - 1] <= 0 or partial[-1] <= 0:
        return None
    return (math.log(partial[-1]) - math.log(partial[n // 2 - 1])) / (
        math.log(n) - math.log(n // 2)
    )


def _classify(rank, radii, s_partial, summands, settings: Settings):
    if rank is not None:
        return DETERMINATE_CERTIFIED, f"finite rank {rank}"
    if radii and radii[-1] < settings.radius_threshold:
        return LIKELY_DETERMINATE, "probe radius collapsed"
    if s_partial and s_partial[-1] / len(s_partial) >= settings.growth_ratio:
        return LIKELY_DETERMINATE, "Carleman partial sums grow linearly"
    slope = _loglog_slope(s_partial)
    if slope is not None and slope >= settings.slope_cutoff:
        return LIKELY_DETERMINATE, "Carleman partial sums keep growing"
    if (
        len(summands) >= settings.decay_depth
        and summands[settings.decay_depth - 1] < settings.decay_threshold
    ):
        return LIKELY_INDETERMINATE, "Carleman summands decay geometrically"
    return INCONCLUSIVE, "no heuristic fired"
