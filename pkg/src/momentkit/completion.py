"""Partial Hankel matrices: pattern detection and constructive completion.

A partial Hankel matrix specifies whole skew-diagonals.  Completability to
a positive Hankel matrix is decided at the pattern level (arithmetic index
progression with even start, specified values positive); the constructive
route then recovers a minimal atomic measure for the specified subsequence,
pulls its atoms back through real m-th roots and divides out the density
weight, and re-emits moments.  Completions are witnesses, not canonical:
any completion question with a solution has many.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union

from .config import DEFAULT, Settings
from .errors import (
    AtomAtZero,
    IndexOutOfRange,
    InsufficientTerms,
    NegativeAtomEvenRoot,
    ParseError,
    QuadratureFailure,
    TooFewIndices,
)
from .measures import DiscreteMeasure, MeasureGenerator
from .orthopoly import exact_atomic_measure, quadrature_from_values, slack_moment
from .rational import Scalar, all_exact, fraction_nth_root, parse_scalar
from .sequence_core import (
    MinorCertificate,
    MomentSequence,
    PositivityVerdict,
    hamburger_test,
    psd_scan_exact,
)
from .submoment import ExtractionMask

#: relative tolerance on reproduced skew-diagonals when roots are irrational
REPRODUCTION_TOL = 1e-10


@dataclass(frozen=True)
class PartialHankel:
    """Skew-diagonal index -> value map with holes."""

    specified: Tuple[Tuple[int, Scalar], ...]

    def __post_init__(self):
        seen: Dict[int, Scalar] = {}
        for idx, value in self.specified:
            idx = int(idx)
            if idx < 0:
                raise ParseError(f"negative skew-diagonal index {idx}")
            if idx in seen and seen[idx] != value:
                raise ParseError(f"conflicting values for skew-diagonal {idx}")
            seen[idx] = value
        object.__setattr__(
            self, "specified", tuple(sorted((i, v) for i, v in seen.items()))
        )

    @classmethod
    def of(cls, mapping: Union[Dict, Sequence]) -> "PartialHankel":
        items = mapping.items() if isinstance(mapping, dict) else mapping
        return cls(tuple((int(i), parse_scalar(v)) for i, v in items))

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(i for i, _ in self.specified)

    @property
    def values(self) -> Tuple[Scalar, ...]:
        return tuple(v for _, v in self.specified)

    @property
    def max_index(self) -> int:
        return self.specified[-1][0] if self.specified else -1


@dataclass(frozen=True)
class PrincipalSubmatrix:
    """H[alpha] with its Hankel-pattern flags.

    The (0,0) entry of any principal submatrix is s_{2 alpha_0}, an even
    moment; that observation is why extracted subsequences always start at
    an even offset.
    """

    indices: Tuple[int, ...]
    rows: Tuple[Tuple[Scalar, ...], ...]
    is_hankel: bool
    start_moment: int

    @property
    def even_start(self) -> bool:
        return self.start_moment % 2 == 0


def principal_submatrix(seq: MomentSequence, alpha: Sequence[int]) -> PrincipalSubmatrix:
    """Rows/columns ``alpha`` of the full Hankel matrix of ``seq``.

    Flags whether the result is itself a Hankel matrix (alpha an arithmetic
    progression, by the midpoint condition).
    """
    idx = tuple(int(a) for a in alpha)
    if not idx:
        raise IndexOutOfRange("index set must be nonempty")
    if any(a < 0 for a in idx):
        raise IndexOutOfRange("indices must be nonnegative")
    if list(idx) != sorted(set(idx)):
        raise IndexOutOfRange("indices must be strictly increasing")
    try:
        terms = seq.prefix(2 * idx[-1] + 1)
    except InsufficientTerms as exc:
        raise IndexOutOfRange(str(exc)) from exc
    rows = tuple(tuple(terms[i + j] for j in idx) for i in idx)
    is_hankel = all(
        2 * idx[k] == idx[k - 1] + idx[k + 1] for k in range(1, len(idx) - 1)
    )
    return PrincipalSubmatrix(idx, rows, is_hankel, 2 * idx[0])


@dataclass(frozen=True)
class PatternResult:
    kind: str  # "affine" | "non_arithmetic"
    mask: Optional[ExtractionMask] = None
    witness: Optional[Tuple[int, int, int]] = None

    @property
    def is_affine(self) -> bool:
        return self.kind == "affine"


def detect_pattern(partial: PartialHankel) -> PatternResult:
    """Recognize an arithmetic progression of specified indices.

    j_k = j_0 + k*step corresponds to the affine extraction mask with
    d = step - 1 and l0 = j_0; otherwise the first triple with unequal
    gaps is returned as witness.
    """
    idx = partial.indices
    if len(idx) < 2:
        raise TooFewIndices("pattern detection needs at least two indices")
    step = idx[1] - idx[0]
    for k in range(1, len(idx) - 1):
        if idx[k + 1] - idx[k] != step:
            return PatternResult("non_arithmetic", witness=(idx[k - 1], idx[k], idx[k + 1]))
    return PatternResult("affine", mask=ExtractionMask.affine(step - 1, idx[0]))


COMPLETABLE = "completable_in_principle"
NOT_COMPLETABLE = "not_completable"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class CompletionDecision:
    case: str
    reason: str
    pattern: PatternResult
    values_verdict: Optional[PositivityVerdict] = None
    certificate: Optional[MinorCertificate] = None


def decide_completable(
    partial: PartialHankel, m_max: int, *, settings: Settings = DEFAULT
) -> CompletionDecision:
    """Three-way completability decision.

    Affine pattern with even start and positive specified values: a
    positive completion exists in principle.  Affine with even start but
    failing values: not completable (any completion would contain the
    failing principal submatrix).  Non-arithmetic pattern or odd start:
    unknown at the pattern level; specific completions may still exist,
    as the constant odd shift of a geometric sequence shows.
    """
    pattern = detect_pattern(partial)
    if not pattern.is_affine:
        return CompletionDecision(
            UNKNOWN,
            f"specified indices are not an arithmetic progression at {pattern.witness}",
            pattern,
        )
    if pattern.mask.l0 % 2 != 0:
        return CompletionDecision(
            UNKNOWN,
            "pattern_not_universal: start offset is odd",
            pattern,
        )
    values_seq = MomentSequence(partial.values)
    depth = min(m_max, (len(partial.values) - 1) // 2)
    verdict = hamburger_test(values_seq, depth, settings=settings)
    if verdict.is_positive:
        return CompletionDecision(
            COMPLETABLE,
            f"affine pattern with even start; values {verdict.describe()} to depth {depth}",
            pattern,
            values_verdict=verdict,
        )
    return CompletionDecision(
        NOT_COMPLETABLE,
        "specified values fail positivity; any completion inherits the failure",
        pattern,
        values_verdict=verdict,
        certificate=verdict.certificate,
    )


@dataclass(frozen=True)
class ConstructionTrace:
    sub_measure: DiscreteMeasure
    pulled_measure: DiscreteMeasure
    slack_value: Optional[Scalar]
    exact: bool


@dataclass(frozen=True)
class CompletionResult:
    status: str
    decision: CompletionDecision
    sequence: Optional[MomentSequence] = None
    certified_depth: Optional[int] = None
    trace: Optional[ConstructionTrace] = None


def _root_pullback(sub: DiscreteMeasure, m: int, l0: int, exact: bool):
    pairs = []
    stays_exact = exact
    for x, w in sub.atoms:
        if m % 2 == 0 and x < 0:
            raise NegativeAtomEvenRoot(
                f"atom {x} has no real root of even order {m}"
            )
        y: Scalar
        if exact and isinstance(x, Fraction):
            root = fraction_nth_root(x, m)
            if root is None:
                stays_exact = False
                y = math.copysign(abs(float(x)) ** (1.0 / m), float(x))
            else:
                y = root
        else:
            stays_exact = False
            xf = float(x)
            y = math.copysign(abs(xf) ** (1.0 / m), xf)
        if l0 > 0 and y == 0:
            raise AtomAtZero("density exponent positive but an atom sits at zero")
        weight = w / y**l0 if l0 else w
        pairs.append((y, weight))
    return DiscreteMeasure(tuple(pairs)), stays_exact


def complete_via_pullback(
    partial: PartialHankel,
    target_depth: int,
    *,
    settings: Settings = DEFAULT,
) -> CompletionResult:
    """Construct a witness completion for an affine even-start pattern.

    Recovers a minimal atomic measure for the specified values (exactly
    when the support is rational, otherwise by floating quadrature), pulls
    atoms back through real (d+1)-th roots, divides the density u^{l0} out
    of the weights and emits moments up to ``target_depth``.  Every
    specified skew-diagonal is reproduced exactly in the rational route or
    within ``REPRODUCTION_TOL`` relative in the floating route.
    """
    decision = decide_completable(
        partial, (len(partial.values) - 1) // 2, settings=settings
    )
    if decision.case != COMPLETABLE:
        return CompletionResult(decision.case, decision)
    if target_depth < partial.max_index:
        raise ValueError(
            f"target depth {target_depth} does not cover specified index "
            f"{partial.max_index}"
        )
    mask = decision.pattern.mask
    m = mask.d + 1
    l0 = mask.l0
    values = list(partial.values)
    exact_in = all_exact(values)

    sub = None
    slack = None
    if exact_in:
        vals = [Fraction(v) for v in values]
        sub = exact_atomic_measure(vals)
        if sub is None and len(vals) % 2 == 1:
            try:
                slack = slack_moment(vals)
                sub = exact_atomic_measure(vals + [slack])
            except ValueError:
                slack = None
    stays_exact = sub is not None and sub.is_exact
    if sub is None:
        # floating quadrature; extend odd full-rank prefixes by one moment
        vals_f = [float(v) for v in values]
        verdict = decision.values_verdict
        if (
            verdict is not None
            and verdict.kind == "positive_semidefinite"
            and verdict.rank is not None
            and 2 * verdict.rank <= len(vals_f)
        ):
            n = verdict.rank
        else:
            if len(vals_f) % 2 == 1:
                slack = slack_moment(vals_f)
                vals_f = vals_f + [float(slack)]
            n = len(vals_f) // 2
        if n == 0:
            sub = DiscreteMeasure(())
        else:
            sub = quadrature_from_values(vals_f, n, settings=settings)
        stays_exact = False

    pulled, stays_exact = _root_pullback(sub, m, l0, stays_exact)
    terms = tuple(pulled.moment(j) for j in range(target_depth + 1))
    completed = MomentSequence(terms, MeasureGenerator(pulled))

    for k, (idx, value) in enumerate(partial.specified):
        got = completed.term(idx)
        if stays_exact and all_exact([value, got]):
            if Fraction(got) != Fraction(value):
                raise QuadratureFailure(
                    f"exact completion failed to reproduce index {idx}"
                )
        else:
            a, b = float(got), float(value)
            if abs(a - b) > REPRODUCTION_TOL * max(1.0, abs(b)):
                raise QuadratureFailure(
                    f"completion misses index {idx}: {a} vs {b}"
                )

    certified = target_depth // 2
    final_verdict = hamburger_test(completed, certified, settings=settings)
    if not final_verdict.is_positive:
        raise QuadratureFailure(
            "completed sequence failed its own positivity check"
        )
    trace = ConstructionTrace(sub, pulled, slack, stays_exact)
    return CompletionResult(
        "completed", decision, completed, certified, trace
    )


def inheritance_check(seq: MomentSequence, alpha: Sequence[int]) -> bool:
    """PSD check of H[alpha] for an arithmetic-progression index set.

    Ties completion back to extraction: these submatrices are exactly the
    Hankel matrices of the affine-mask subsequences, so positivity of the
    parent sequence must be inherited.
    """
    sub = principal_submatrix(seq, alpha)
    if not sub.is_hankel:
        raise ValueError("alpha must be an arithmetic progression")
    if all(all_exact(row) for row in sub.rows):
        ok, _, _ = psd_scan_exact([list(r) for r in sub.rows], len(sub.rows))
        return ok
    import numpy as np

    arr = np.array([[float(x) for x in row] for row in sub.rows])
    evals = np.linalg.eigvalsh(arr)
    scale = max(1.0, float(np.max(np.abs(evals))))
    return bool(evals[0] >= -DEFAULT.float_tolerance * scale)
