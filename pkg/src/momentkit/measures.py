"""Finitely atomic measures and the pushforward/transform identities.

Atomic measures are the ground-truth oracle for everything else in the
package: their moments, Stieltjes transforms and pushforwards are exactly
computable, so every integral identity can be checked to zero residual in
rational arithmetic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

from .errors import ParseError, RealLambda
from .polyq import Poly
from .rational import Scalar, all_exact, is_exact, parse_scalar
from .sequence_core import MomentSequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Sum of weighted point masses, positions strictly increasing.

    Construction normalizes: positions are sorted, coincident positions
    merge by adding weights, zero weights are dropped (with a log note),
    negative weights are rejected.
    """

    atoms: Tuple[Tuple[Scalar, Scalar], ...]

    def __post_init__(self):
        merged = {}
        for pos, wt in self.atoms:
            pos = parse_scalar(pos) if not isinstance(pos, (Fraction, float)) else pos
            wt = parse_scalar(wt) if not isinstance(wt, (Fraction, float)) else wt
            if wt < 0:
                raise ParseError(f"negative weight {wt} at position {pos}")
            merged[pos] = merged.get(pos, 0) + wt
        cleaned = []
        for pos in sorted(merged):
            wt = merged[pos]
            if wt == 0:
                logger.info("dropping zero-weight atom at %s", pos)
                continue
            cleaned.append((pos, wt))
        object.__setattr__(self, "atoms", tuple(cleaned))

    @classmethod
    def of(cls, pairs: Sequence) -> "DiscreteMeasure":
        return cls(tuple((parse_scalar(p), parse_scalar(w)) for p, w in pairs))

    @classmethod
    def point(cls, position, weight=1) -> "DiscreteMeasure":
        return cls.of([(position, weight)])

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def positions(self) -> Tuple[Scalar, ...]:
        return tuple(p for p, _ in self.atoms)

    @property
    def weights(self) -> Tuple[Scalar, ...]:
        return tuple(w for _, w in self.atoms)

    @property
    def mass(self) -> Scalar:
        return sum(self.weights, start=Fraction(0)) if self.atoms else Fraction(0)

    @property
    def is_exact(self) -> bool:
        return all_exact(self.positions) and all_exact(self.weights)

    def moment(self, k: int) -> Scalar:
        return sum((w * x**k for x, w in self.atoms), start=Fraction(0))


class MeasureGenerator:
    """Term generator backed by an atomic measure."""

    kind = "measure"

    def __init__(self, measure: DiscreteMeasure):
        self.measure = measure

    def term(self, k: int) -> Scalar:
        return self.measure.moment(k)

    def params(self) -> dict:
        return {"atoms": [[p, w] for p, w in self.measure.atoms]}


def moments(measure: DiscreteMeasure, count: int) -> MomentSequence:
    """First ``count`` power moments, exact for rational atoms."""
    if count < 1:
        raise ValueError("count must be at least 1")
    terms = tuple(measure.moment(k) for k in range(count))
    return MomentSequence(terms, MeasureGenerator(measure))


def pushforward(measure: DiscreteMeasure, d: int, l0: int) -> DiscreteMeasure:
    """Image measure under u -> u^d with density u^{l0} (l0 even).

    Atom x with weight w maps to atom x^d with weight w * x^{l0};
    coincident images merge, a zero-weight image (atom at 0 with l0 > 0)
    is dropped.  Moments satisfy moments(result)[k] == moments(measure)[k*d + l0].
    """
    if d < 1:
        raise ValueError("power d must be >= 1")
    if l0 < 0 or l0 % 2 != 0:
        raise ValueError("density exponent l0 must be an even nonnegative integer")
    mapped = tuple((x**d, w * x**l0) for x, w in measure.atoms)
    return DiscreteMeasure(mapped)


def stieltjes_transform(measure: DiscreteMeasure, lam: complex) -> complex:
    """sum of w / (x - lam); requires Im(lam) != 0."""
    lam = complex(lam)
    if lam.imag == 0:
        raise RealLambda("stieltjes transform needs Im(lambda) != 0")
    return sum(complex(w) / (complex(x) - lam) for x, w in measure.atoms)


def shifted_transform_identity(
    measure: DiscreteMeasure, l: int, lam: complex
) -> Tuple[complex, complex, float]:
    """Both sides of the even-shift transform identity and their residual.

    lhs integrates against the shifted measure (pushforward with d=1,
    density u^l); rhs is C + lam^l * transform(measure), with
    C = sum_{i<l} lam^i s_{l-1-i} built from the original moments.
    """
    if l < 0 or l % 2 != 0:
        raise ValueError("shift l must be an even nonnegative integer")
    lam = complex(lam)
    if lam.imag == 0:
        raise RealLambda("shifted transform identity needs Im(lambda) != 0")
    lhs = stieltjes_transform(pushforward(measure, 1, l), lam)
    constant = sum(
        lam**i * complex(measure.moment(l - 1 - i)) for i in range(l)
    )
    rhs = constant + lam**l * stieltjes_transform(measure, lam)
    return lhs, rhs, abs(lhs - rhs)


def integral_identity_check(
    measure: DiscreteMeasure,
    d: int,
    l0: int,
    f: Union[Poly, Sequence],
) -> Tuple[Scalar, Scalar, Scalar]:
    """Check integral of f(u^d) u^{l0} dmu against integral of f dmu~.

    Returns (lhs, rhs, residual); the residual is exactly zero in rational
    arithmetic because both sides are finite sums over atoms.
    """
    poly = f if isinstance(f, Poly) else Poly(f)
    lhs = sum(
        (w * poly(x**d) * x**l0 for x, w in measure.atoms), start=Fraction(0)
    )
    pushed = pushforward(measure, d, l0)
    rhs = sum((w * poly(x) for x, w in pushed.atoms), start=Fraction(0))
    return lhs, rhs, lhs - rhs
