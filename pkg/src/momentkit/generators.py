"""Closed-form sequence families and the sequence-generator registry.

Generators attach to :class:`~momentkit.sequence_core.MomentSequence` and
extend a stored prefix on demand.  Rational families extend exactly;
floating families (exponential decay, log-normal type) extend in double
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import ParseError
from .measures import DiscreteMeasure, MeasureGenerator, moments
from .rational import Scalar, parse_scalar
from .sequence_core import MomentSequence


class HilbertGenerator:
    kind = "hilbert"

    def term(self, k: int) -> Fraction:
        return Fraction(1, k + 1)

    def params(self) -> dict:
        return {}


class GeometricGenerator:
    kind = "geometric"

    def __init__(self, ratio: Scalar):
        self.ratio = parse_scalar(ratio)

    def term(self, k: int) -> Scalar:
        return self.ratio**k

    def params(self) -> dict:
        return {"ratio": self.ratio}


class ExpDecayGenerator:
    """s_k = 1 / ((k+1) e^{k+1}); strictly positive, rapidly decaying."""

    kind = "exp_decay"

    def term(self, k: int) -> float:
        return 1.0 / ((k + 1) * math.exp(k + 1))

    def params(self) -> dict:
        return {}


class StieltjesWigertGenerator:
    """s_k = q^{-(k+1)^2 / 2} for 0 < q < 1 (log-normal moments)."""

    kind = "stieltjes_wigert"

    def __init__(self, q: float):
        q = float(q)
        if not 0 < q < 1:
            raise ParseError("stieltjes_wigert parameter q must satisfy 0 < q < 1")
        self.q = q

    def log_term(self, k: int) -> float:
        return -((k + 1) ** 2) / 2 * math.log(self.q)

    def term(self, k: int) -> float:
        log_value = self.log_term(k)
        if log_value > math.log(1e300):
            raise OverflowError(
                f"term {k} of the q={self.q} family is not representable in double precision"
            )
        return math.exp(log_value)

    def max_index(self) -> int:
        """Largest k whose term fits in a double."""
        k = 0
        while self.log_term(k + 1) <= math.log(1e300):
            k += 1
        return k

    def params(self) -> dict:
        return {"q": self.q}


_REGISTRY = {
    "hilbert": lambda params: HilbertGenerator(),
    "geometric": lambda params: GeometricGenerator(params["ratio"]),
    "exp_decay": lambda params: ExpDecayGenerator(),
    "stieltjes_wigert": lambda params: StieltjesWigertGenerator(params["q"]),
    "measure": lambda params: MeasureGenerator(DiscreteMeasure.of(params["atoms"])),
}


def make_generator(kind: str, params: Optional[dict] = None):
    if kind not in _REGISTRY:
        raise ParseError(f"unknown generator kind {kind!r}")
    try:
        return _REGISTRY[kind](params or {})
    except KeyError as exc:
        raise ParseError(f"generator {kind!r} is missing parameter {exc}") from None


def hilbert_sequence(count: int) -> MomentSequence:
    gen = HilbertGenerator()
    return MomentSequence(tuple(gen.term(k) for k in range(count)), gen)


def geometric_sequence(ratio, count: int) -> MomentSequence:
    gen = GeometricGenerator(ratio)
    return MomentSequence(tuple(gen.term(k) for k in range(count)), gen)


def exp_decay_sequence(count: int) -> MomentSequence:
    gen = ExpDecayGenerator()
    return MomentSequence(tuple(gen.term(k) for k in range(count)), gen)


def stieltjes_wigert_sequence(q: float, count: int) -> MomentSequence:
    gen = StieltjesWigertGenerator(q)
    top = gen.max_index()
    if count - 1 > top:
        raise ParseError(
            f"count {count} exceeds double precision for q={q}; at most {top + 1} terms"
        )
    return MomentSequence(tuple(gen.term(k) for k in range(count)), gen)


def measure_sequence(measure: DiscreteMeasure, count: int) -> MomentSequence:
    return moments(measure, count)


@dataclass(frozen=True)
class ModifiedS0Result:
    """Truncated evaluation of the determinacy-restoring s_0 modification."""

    q: float
    s0: float
    s0_tilde: float
    kernel_sum: float
    tail_ratio: float
    truncation: int
    dps: int


def stieltjes_wigert_modified_s0(
    q: float, truncation: int = 50, dps: Optional[int] = None
) -> ModifiedS0Result:
    """Evaluate s~_0 = s_0 - 1 / sum_{n<=N} P_n(0)^2 for the q-family.

    The orthonormal values P_n(0) are produced by a high-precision
    orthogonalization of the moment sequence itself (the dynamic range of
    these moments makes double precision useless almost immediately).  The
    tail ratio reports the last summand against the accumulated kernel sum
    as a truncation diagnostic.
    """
    import mpmath

    if not 0 < q < 1:
        raise ParseError("q must satisfy 0 < q < 1")
    if dps is None:
        span = (2 * truncation + 3) ** 2 / 2 * (-math.log10(q))
        dps = int(span) + 60
    with mpmath.workdps(dps):
        mq = mpmath.mpf(q)
        needed = 2 * truncation + 3
        mom = [mpmath.power(mq, -mpmath.mpf((k + 1) ** 2) / 2) for k in range(needed)]

        def lam(coeffs):
            return mpmath.fsum(c * mom[i] for i, c in enumerate(coeffs))

        def mul_shift(coeffs):
            return [mpmath.mpf(0)] + list(coeffs)

        def poly_mul(a, b):
            out = [mpmath.mpf(0)] * (len(a) + len(b) - 1)
            for i, ca in enumerate(a):
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
            return out

        pi_prev = [mpmath.mpf(1)]
        h_prev = lam(pi_prev)
        alphas = [lam(mul_shift(poly_mul(pi_prev, pi_prev))) / h_prev]
        hs = [h_prev]
        pi_cur = [-alphas[0], mpmath.mpf(1)]
        for k in range(1, truncation + 1):
            h_cur = lam(poly_mul(pi_cur, pi_cur))
            hs.append(h_cur)
            alpha = lam(mul_shift(poly_mul(pi_cur, pi_cur))) / h_cur
            alphas.append(alpha)
            beta = h_cur / hs[k - 1]
            nxt = [mpmath.mpf(0)] + list(pi_cur)
            for i, c in enumerate(pi_cur):
                nxt[i] -= alpha * c
            for i, c in enumerate(pi_prev):
                nxt[i] -= beta * c
            pi_prev, pi_cur = pi_cur, nxt
        hs.append(lam(poly_mul(pi_cur, pi_cur)))

        # orthonormal values at zero: P_n(0) = pi_n(0) / sqrt(h_n),
        # with pi_n(0) rebuilt through the recurrence on constant terms
        values = []
        p0_prev = mpmath.mpf(1)
        p0_cur = -alphas[0]
        values.append(p0_prev / mpmath.sqrt(hs[0]))
        values.append(p0_cur / mpmath.sqrt(hs[1]))
        for k in range(1, truncation):
            beta = hs[k] / hs[k - 1]
            p0_next = -alphas[k] * p0_cur - beta * p0_prev
            p0_prev, p0_cur = p0_cur, p0_next
            values.append(p0_cur / mpmath.sqrt(hs[k + 1]))

        squares = [v * v for v in values]
        kernel = mpmath.fsum(squares)
        s0 = mom[0]
        s0_tilde = s0 - 1 / kernel
        tail = squares[-1] / kernel
        return ModifiedS0Result(
            q=float(q),
            s0=float(s0),
            s0_tilde=float(s0_tilde),
            kernel_sum=float(kernel),
            tail_ratio=float(tail),
            truncation=truncation,
            dps=dps,
        )
