"""Sub-moment extraction: masks, universal validity, perturbation rigidity.

A mask selects the subsequence t_k = s_{k + offset_k}.  Validity has two
levels that must not be conflated:

* pattern level ("universal"): the mask extracts a positive subsequence
  from *every* positive sequence.  Affine masks offset_k = k*d + l0 are
  universal exactly when l0 is even; general masks are screened by an
  exact symbolic test on the matrix [u^{offset_{i+j}}], whose principal
  minors must all be nonnegative polynomials on the real line.
* per-sequence level: a pattern-invalid mask may still produce a positive
  subsequence from a particular sequence (the constant odd shift on a
  geometric sequence is the canonical example), so both verdicts are
  reported side by side.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple, Union

from .config import DEFAULT, Settings
from .errors import InsufficientTerms, NotPositiveInput, ParseError
from .measures import DiscreteMeasure, moments
from .polyq import Poly, det_poly, negative_point, nonneg_on_reals
from .rational import Scalar, parse_scalar
from .sequence_core import (
    MomentSequence,
    PositivityVerdict,
    _principal_subsets,
    hamburger_test,
    psd_scan_exact,
)


@dataclass(frozen=True)
class ExtractionMask:
    """Index map k -> k + offset_k, affine (offset_k = k*d + l0) or explicit."""

    kind: str
    d: Optional[int] = None
    l0: Optional[int] = None
    offsets: Optional[Tuple[int, ...]] = None

    @classmethod
    def affine(cls, d: int, l0: int) -> "ExtractionMask":
        if d < 0 or l0 < 0:
            raise ParseError("affine mask parameters must be nonnegative")
        return cls("affine", d=d, l0=l0)

    @classmethod
    def explicit(cls, offsets: Sequence[int]) -> "ExtractionMask":
        offs = tuple(int(x) for x in offsets)
        if any(x < 0 for x in offs):
            raise ParseError("mask offsets must be nonnegative")
        return cls("explicit", offsets=offs)

    @property
    def is_affine(self) -> bool:
        return self.kind == "affine"

    def offset(self, k: int) -> int:
        if self.is_affine:
            return k * self.d + self.l0
        if k >= len(self.offsets):
            raise InsufficientTerms(k + 1, len(self.offsets), what="mask")
        return self.offsets[k]

    def index(self, k: int) -> int:
        return k + self.offset(k)

    def to_offsets(self, count: int) -> Tuple[int, ...]:
        return tuple(self.offset(k) for k in range(count))

    def compose(self, inner: "ExtractionMask") -> "ExtractionMask":
        """Mask equivalent to extracting with self first, then ``inner``.

        The combined index map is self.index o inner.index; for affine
        masks this is again affine with step (d1+1)(d2+1).
        """
        if not (self.is_affine and inner.is_affine):
            raise ParseError("compose is defined for affine masks")
        step = (self.d + 1) * (inner.d + 1)
        start = self.l0 + inner.l0 * (self.d + 1)
        return ExtractionMask.affine(step - 1, start)


def extract(seq: MomentSequence, mask: ExtractionMask, count: int) -> MomentSequence:
    """Subsequence t_k = s_{k + offset_k} for k < count."""
    if count < 1:
        raise ValueError("count must be at least 1")
    return MomentSequence(tuple(seq.term(mask.index(k)) for k in range(count)))


# ---------------------------------------------------------------------------
# pattern-level (universal) checking


@dataclass(frozen=True)
class MinorWitness:
    """A principal minor of [u^{offset_{i+j}}] that goes negative on R."""

    indices: Tuple[int, ...]
    polynomial: Poly
    point: Fraction
    condition: str

    def witness_measure(self) -> DiscreteMeasure:
        """Point mass whose moments defeat the mask at the witness point."""
        return DiscreteMeasure.point(self.point, 1)


@dataclass(frozen=True)
class UniversalVerdict:
    valid: bool
    checked_cap: int
    witness: Optional[MinorWitness] = None
    note: str = ""


def mask_universal_check(mask: ExtractionMask, m_cap: int = 3) -> UniversalVerdict:
    """Decide whether a mask extracts positively from every positive sequence.

    Affine masks are decided outright by the parity of l0.  Explicit masks
    run three exact screens: parity of the diagonal offsets, the midpoint
    condition at odd positions, and nonnegativity on R of every principal
    minor (leading minors first) of the symbolic matrix, up to size
    m_cap + 1.  An invalid verdict carries the failing minor and a rational
    point where it is negative.
    """
    if mask.is_affine:
        if mask.l0 % 2 == 0:
            return UniversalVerdict(True, m_cap, note="affine mask with even l0")
        poly = Poly.monomial(mask.l0)
        witness = MinorWitness((0,), poly, negative_point(poly), "diagonal_evenness")
        return UniversalVerdict(
            False, m_cap, witness, note="affine mask with odd l0"
        )
    offs = mask.offsets
    length = len(offs)
    # (a) diagonal entries u^{offset_{2i}} must be even powers
    for i in range(0, length, 2):
        if offs[i] % 2 != 0:
            poly = Poly.monomial(offs[i])
            witness = MinorWitness(
                (i // 2,), poly, negative_point(poly), "diagonal_evenness"
            )
            return UniversalVerdict(False, m_cap, witness)
    # (b) midpoint condition at odd positions
    for i in range(1, length - 1, 2):
        if 2 * offs[i] != offs[i - 1] + offs[i + 1]:
            poly = Poly.monomial(offs[i - 1] + offs[i + 1]) - Poly.monomial(
                2 * offs[i]
            )
            witness = MinorWitness(
                ((i - 1) // 2, (i + 1) // 2),
                poly,
                negative_point(poly),
                "midpoint",
            )
            return UniversalVerdict(False, m_cap, witness)
    # (c) all principal minors of [u^{offset_{i+j}}] up to the size cap
    top = (length - 1) // 2
    size_cap = min(m_cap + 1, top + 1)
    note = ""
    if size_cap < m_cap + 1:
        note = f"mask length limits the scan to minors of size {size_cap}"
    for subset in _principal_subsets(top, size_cap):
        matrix = [
            [Poly.monomial(offs[i + j]) for j in subset] for i in subset
        ]
        minor = det_poly(matrix)
        if not nonneg_on_reals(minor):
            witness = MinorWitness(
                tuple(subset), minor, negative_point(minor), "minor"
            )
            return UniversalVerdict(False, size_cap - 1, witness, note=note)
    return UniversalVerdict(True, size_cap - 1, note=note)


def subsequence_positivity(
    seq: MomentSequence,
    mask: ExtractionMask,
    m_max: int,
    *,
    settings: Settings = DEFAULT,
) -> PositivityVerdict:
    """Positivity of the extracted subsequence at depth m_max."""
    sub = extract(seq, mask, 2 * m_max + 1)
    return hamburger_test(sub, m_max, settings=settings)


@dataclass(frozen=True)
class MaskVerdict:
    """Pattern-level and per-sequence verdicts, side by side."""

    universal: UniversalVerdict
    per_sequence: Optional[PositivityVerdict] = None


def mask_verdict(
    seq: MomentSequence,
    mask: ExtractionMask,
    m_max: int,
    m_cap: int = 3,
    *,
    settings: Settings = DEFAULT,
) -> MaskVerdict:
    return MaskVerdict(
        mask_universal_check(mask, m_cap),
        subsequence_positivity(seq, mask, m_max, settings=settings),
    )


# ---------------------------------------------------------------------------
# perturbation of a single term


@dataclass(frozen=True)
class PerturbationInterval:
    """Replacement values for s_n keeping both Hankel families PSD.

    ``lower``/``upper`` are certified-feasible rational endpoints (None
    means unbounded); the outer brackets are certified infeasible.  A
    collapsed interval (both endpoints back at the original value within
    the bisection resolution) flags single-term rigidity at this depth.
    """

    index: int
    m_max: int
    original: Fraction
    lower: Optional[Fraction]
    upper: Optional[Fraction]
    lower_outer: Optional[Fraction]
    upper_outer: Optional[Fraction]
    resolution: Fraction
    rigid_within_resolution: bool
    has_interior: bool
    unconstrained: bool = False


def _pattern_psd_everywhere(n: int, m_max: int) -> bool:
    """True when raising s_n without bound keeps every constraint PSD.

    The direction matrix of the perturbation is PSD exactly when each
    occurrence of skew-diagonal n is a single diagonal entry.
    """
    for m in range(m_max + 1):
        if n <= 2 * m:
            lo, hi = max(0, n - m), min(m, n)
            if hi - lo + 1 > 1:
                return False
        n1 = n - 1
        if 0 <= n1 <= 2 * m:
            lo, hi = max(0, n1 - m), min(m, n1)
            if hi - lo + 1 > 1:
                return False
    return True


def perturbation_interval(
    seq: MomentSequence,
    n: int,
    m_max: int,
    *,
    settings: Settings = DEFAULT,
) -> PerturbationInterval:
    """Maximal interval of replacements for s_n, by exact rational bisection.

    Feasibility means every Hankel matrix of both families up to order
    m_max stays PSD (checked by exact principal-minor scans).  Endpoints
    are located to the configured resolution; unboundedness above is
    decided exactly from the perturbation pattern.
    """
    if n < 0:
        raise ValueError("index must be nonnegative")
    needed = 2 * m_max + 2
    terms = [Fraction(t) for t in seq.prefix(needed)]
    original = terms[n] if n < needed else None
    if original is None or n > 2 * m_max + 1:
        # the term never enters a constraint at this depth
        value = Fraction(seq.term(n)) if seq.has_depth(n + 1) else None
        return PerturbationInterval(
            n, m_max, value, None, None, None, None,
            settings.bisection_tol, False, True, unconstrained=True,
        )
    cap = settings.psd_order_cap + 1

    def feasible(tau: Fraction) -> bool:
        trial = list(terms)
        trial[n] = tau
        for m in range(m_max + 1):
            for shift in (0, 1):
                rows = [
                    [trial[i + j + shift] for j in range(m + 1)]
                    for i in range(m + 1)
                ]
                ok, _, _ = psd_scan_exact(rows, cap)
                if not ok:
                    return False
        return True

    if not feasible(original):
        raise NotPositiveInput(
            f"sequence is not positive at depth {m_max} before perturbation"
        )
    tol = settings.bisection_tol
    step0 = max(Fraction(1), abs(original))

    def search(direction: int):
        """(inner feasible endpoint, outer infeasible bracket)."""
        step = step0
        outer = None
        for _ in range(128):
            cand = original + direction * step
            if not feasible(cand):
                outer = cand
                break
            step *= 2
        if outer is None:
            return None, None
        inner = original + direction * (step / 2) if step > step0 else original
        # invariant: inner feasible, outer infeasible
        while abs(outer - inner) > tol:
            mid = (inner + outer) / 2
            if feasible(mid):
                inner = mid
            else:
                outer = mid
        return inner, outer

    if _pattern_psd_everywhere(n, m_max):
        upper, upper_outer = None, None
    else:
        upper, upper_outer = search(+1)
    lower, lower_outer = search(-1)
    rigid = (
        upper is not None
        and lower is not None
        and upper == original
        and lower == original
    )
    has_interior = (upper is None or upper > original) or (
        lower is not None and lower < original
    )
    return PerturbationInterval(
        n,
        m_max,
        original,
        lower,
        upper,
        lower_outer,
        upper_outer,
        tol,
        rigid,
        has_interior,
    )


@dataclass(frozen=True)
class BoundCheck:
    lhs: Scalar
    rhs: Scalar

    @property
    def satisfied(self) -> bool:
        return self.lhs <= self.rhs


def perturbation_bound_check(
    seq: MomentSequence,
    replaced: Sequence[Tuple[int, Scalar]],
    m: int,
) -> BoundCheck:
    """Necessary multi-term bound: sum (s_p - tau_p)(p + 1) <= (m+1)^2 s_0.

    Requires distinct indices and tau_p <= s_p (downward replacements).
    The bound is necessary, not sufficient: a replacement satisfying it may
    still break positivity.
    """
    indices = [p for p, _ in replaced]
    if len(set(indices)) != len(indices):
        raise ValueError("replacement indices must be distinct")
    lhs = Fraction(0)
    for p, tau in replaced:
        tau = parse_scalar(tau) if not isinstance(tau, (Fraction, float)) else tau
        s_p = seq.term(p)
        if tau > s_p:
            raise ValueError(f"replacement at {p} must not exceed s_{p}")
        lhs += (s_p - tau) * (p + 1)
    rhs = (m + 1) ** 2 * seq.term(0)
    return BoundCheck(lhs, rhs)


# ---------------------------------------------------------------------------
# product-closed families


def product_family_moments(
    measure: DiscreteMeasure,
    phi: Union[str, Tuple[str, int], dict, Callable],
    count: int,
) -> MomentSequence:
    """Moments s_k = sum w_i phi(x_i)^k; positive by construction.

    phi may be "identity", ("power", a), an explicit table mapping atom
    positions to values, or any callable.  The result is the moment
    sequence of the phi-image of the measure, so it is always positive.
    """
    if phi == "identity":
        func = lambda x: x
    elif isinstance(phi, tuple) and len(phi) == 2 and phi[0] == "power":
        exponent = int(phi[1])
        if exponent < 0:
            raise ParseError("power exponent must be nonnegative")
        func = lambda x: x**exponent
    elif isinstance(phi, dict):
        table = {parse_scalar(k): parse_scalar(v) for k, v in phi.items()}

        def func(x):
            if x not in table:
                raise ParseError(f"phi table has no value for atom {x}")
            return table[x]

    elif callable(phi):
        func = phi
    else:
        raise ParseError(f"unsupported phi specification: {phi!r}")
    mapped = DiscreteMeasure(tuple((func(x), w) for x, w in measure.atoms))
    return moments(mapped, count)
