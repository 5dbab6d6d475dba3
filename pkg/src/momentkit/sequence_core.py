"""Moment sequences, Hankel matrices and the classical positivity tests.

The exact path works entirely in rational arithmetic: leading minors by
fraction-free Bareiss elimination, semidefiniteness by principal-minor
scans, rank by exact Gaussian elimination.  Floating input demotes a test
to the approximate path, where verdicts carry ``exact=False`` and use the
relative tolerance from :mod:`momentkit.config`.

All types are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT, Settings
from .errors import InsufficientTerms, ParseError, PrecisionLoss
from .rational import Scalar, all_exact, is_exact, parse_scalar


@dataclass(frozen=True)
class MomentSequence:
    """A finite prefix of power moments, optionally backed by a generator.

    ``terms[k]`` is the k-th power moment.  When a generator is attached it
    must reproduce every stored term (exactly for rational generators,
    within the configured relative tolerance otherwise) and provides terms
    past the stored prefix on demand.
    """

    terms: Tuple[Scalar, ...]
    generator: Optional[object] = None

    def __post_init__(self):
        if not self.terms:
            raise ParseError("a moment sequence needs at least one term")
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.generator is not None:
            for k, stored in enumerate(self.terms):
                produced = self.generator.term(k)
                if is_exact(stored) and is_exact(produced):
                    if stored != produced:
                        raise ParseError(
                            f"generator disagrees with stored term {k}: "
                            f"{produced} != {stored}"
                        )
                else:
                    a, b = float(stored), float(produced)
                    scale = max(1.0, abs(a), abs(b))
                    if abs(a - b) > DEFAULT.float_tolerance * scale:
                        raise ParseError(
                            f"generator disagrees with stored term {k}: "
                            f"{produced} != {stored}"
                        )

    @classmethod
    def of(cls, values: Iterable, generator=None) -> "MomentSequence":
        return cls(tuple(parse_scalar(v) for v in values), generator)

    def __len__(self) -> int:
        return len(self.terms)

    def term(self, k: int) -> Scalar:
        if k < 0:
            raise IndexError("negative moment index")
        if k < len(self.terms):
            return self.terms[k]
        if self.generator is not None:
            return self.generator.term(k)
        raise InsufficientTerms(k + 1, len(self.terms))

    def prefix(self, n: int) -> List[Scalar]:
        return [self.term(k) for k in range(n)]

    def has_depth(self, n: int) -> bool:
        return n <= len(self.terms) or self.generator is not None

    @property
    def is_exact(self) -> bool:
        return all_exact(self.terms)

    def materialized(self, n: int) -> "MomentSequence":
        """Sequence with at least n stored terms (pulled from the generator)."""
        if n <= len(self.terms):
            return self
        return MomentSequence(tuple(self.prefix(n)), self.generator)

    def scaled(self, factor: Scalar) -> "MomentSequence":
        return MomentSequence(tuple(t * factor for t in self.terms))


def elementwise_sum(a: MomentSequence, b: MomentSequence, count: int) -> MomentSequence:
    return MomentSequence(tuple(a.term(k) + b.term(k) for k in range(count)))


def elementwise_product(a: MomentSequence, b: MomentSequence, count: int) -> MomentSequence:
    return MomentSequence(tuple(a.term(k) * b.term(k) for k in range(count)))


@dataclass(frozen=True)
class HankelMatrix:
    """(m+1) x (m+1) matrix with entry (i, j) = s_{i+j+shift}."""

    order: int
    shift: int
    entries: Tuple[Tuple[Scalar, ...], ...]

    def entry(self, i: int, j: int) -> Scalar:
        return self.entries[i][j]

    def rows(self) -> List[List[Scalar]]:
        return [list(r) for r in self.entries]

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries])

    @property
    def is_exact(self) -> bool:
        return all(all_exact(row) for row in self.entries)


def hankel(seq: MomentSequence, m: int, shift: int = 0) -> HankelMatrix:
    """Hankel matrix of order m (shift 0) or its shifted companion (shift 1)."""
    if shift not in (0, 1):
        raise ValueError("shift must be 0 or 1")
    if m < 0:
        raise ValueError("order must be nonnegative")
    terms = seq.prefix(2 * m + 1 + shift)
    entries = tuple(
        tuple(terms[i + j + shift] for j in range(m + 1)) for i in range(m + 1)
    )
    return HankelMatrix(m, shift, entries)


# ---------------------------------------------------------------------------
# exact determinants


def det_exact(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant of a rational matrix by integer Bareiss elimination.

    Denominators are cleared first so all intermediate quantities are
    integers (fraction-free); row swaps track the sign.
    """
    n = len(rows)
    if n == 0:
        return Fraction(1)
    lcm = 1
    for row in rows:
        for x in row:
            lcm = math.lcm(lcm, Fraction(x).denominator)
    m = [[int(Fraction(x) * lcm) for x in row] for row in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = pivot
    return Fraction(sign * m[n - 1][n - 1], lcm**n)


def leading_minors(rows: Sequence[Sequence[Fraction]]) -> List[Fraction]:
    """D_0 .. D_m for the given square rational matrix."""
    return [
        det_exact([row[: k + 1] for row in rows[: k + 1]])
        for k in range(len(rows))
    ]


def rank_exact(rows: Sequence[Sequence[Fraction]]) -> int:
    m = [[Fraction(x) for x in row] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    rank = 0
    row = 0
    for col in range(ncols):
        pivot = None
        for i in range(row, nrows):
            if m[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        pv = m[row][col]
        for i in range(row + 1, nrows):
            if m[i][col] != 0:
                factor = m[i][col] / pv
                for j in range(col, ncols):
                    m[i][j] -= factor * m[row][j]
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank


def _principal_subsets(order: int, size_cap: int):
    """Index subsets to scan: leading minors first, then the rest by size."""
    top = min(size_cap, order + 1)
    for s in range(1, top + 1):
        yield tuple(range(s))
    for s in range(1, top + 1):
        leading = tuple(range(s))
        for subset in combinations(range(order + 1), s):
            if subset != leading:
                yield subset


@dataclass(frozen=True)
class MinorCertificate:
    """A concrete principal minor certifying failure of positivity."""

    order: int
    indices: Tuple[int, ...]
    value: Scalar


def psd_scan_exact(rows, size_cap: int):
    """(is_psd, failing certificate, scan_complete) for a rational matrix."""
    order = len(rows) - 1
    complete = size_cap >= order + 1
    for subset in _principal_subsets(order, size_cap):
        sub = [[rows[i][j] for j in subset] for i in subset]
        d = det_exact(sub)
        if d < 0:
            return False, MinorCertificate(len(subset) - 1, subset, d), complete
    return True, None, complete


# ---------------------------------------------------------------------------
# verdicts

POSITIVE_DEFINITE = "positive_definite"
POSITIVE_SEMIDEFINITE = "positive_semidefinite"
NOT_POSITIVE = "not_positive"


@dataclass(frozen=True)
class PositivityVerdict:
    kind: str
    tested_up_to: int
    leading_minors: Tuple[Scalar, ...]
    rank: Optional[int] = None
    certificate: Optional[MinorCertificate] = None
    exact: bool = True
    psd_check_complete: bool = True
    leading_rank_consistent: bool = True

    @property
    def is_positive(self) -> bool:
        return self.kind in (POSITIVE_DEFINITE, POSITIVE_SEMIDEFINITE)

    def describe(self) -> str:
        if self.kind == POSITIVE_SEMIDEFINITE:
            return f"positive_semidefinite_rank_{self.rank}"
        return self.kind


def _hadamard_bound(arr: np.ndarray) -> float:
    if arr.size == 0:
        return 1.0
    norms = np.sqrt((arr**2).sum(axis=1))
    bound = float(np.prod(norms))
    return bound if math.isfinite(bound) and bound > 0 else 1.0


def hamburger_test(
    seq: MomentSequence, m_max: int, *, settings: Settings = DEFAULT
) -> PositivityVerdict:
    """Classify positivity of the Hankel family D_0 .. D_{m_max}.

    Exact sequences give exact verdicts.  Degenerate (semidefinite) cases
    are confirmed by a principal-minor scan and an exact rank computation;
    ``leading_rank_consistent`` records whether the zero pattern of the
    leading minors matches the matrix rank (it does for genuine truncated
    moment sequences, by the finite-atom classification).
    """
    terms = seq.prefix(2 * m_max + 1)
    rows = [[terms[i + j] for j in range(m_max + 1)] for i in range(m_max + 1)]
    if all_exact(terms):
        return _hamburger_exact(rows, m_max, settings)
    return _hamburger_float(rows, m_max, settings)


def _hamburger_exact(rows, m_max: int, settings: Settings) -> PositivityVerdict:
    minors = leading_minors(rows)
    first_nonpos = next((k for k, d in enumerate(minors) if d <= 0), None)
    if first_nonpos is None:
        return PositivityVerdict(
            POSITIVE_DEFINITE, m_max, tuple(minors), rank=None, exact=True
        )
    k0 = first_nonpos
    if minors[k0] < 0:
        cert = MinorCertificate(k0, tuple(range(k0 + 1)), minors[k0])
        return PositivityVerdict(
            NOT_POSITIVE, m_max, tuple(minors), certificate=cert, exact=True
        )
    ok, cert, complete = psd_scan_exact(rows, settings.psd_order_cap + 1)
    if not ok:
        return PositivityVerdict(
            NOT_POSITIVE,
            m_max,
            tuple(minors),
            certificate=cert,
            exact=True,
            psd_check_complete=complete,
        )
    rank = rank_exact(rows)
    consistent = rank == k0 and all(d == 0 for d in minors[k0:])
    return PositivityVerdict(
        POSITIVE_SEMIDEFINITE,
        m_max,
        tuple(minors),
        rank=rank,
        exact=True,
        psd_check_complete=complete,
        leading_rank_consistent=consistent,
    )


def _hamburger_float(rows, m_max: int, settings: Settings) -> PositivityVerdict:
    arr = np.array([[float(x) for x in row] for row in rows])
    if not np.all(np.isfinite(arr)):
        raise PrecisionLoss("non-finite sequence terms in Hankel matrix")
    tol = settings.float_tolerance
    minors: List[float] = []
    classified: List[int] = []  # 1, 0, -1 against the scaled threshold
    for k in range(m_max + 1):
        block = arr[: k + 1, : k + 1]
        d = float(np.linalg.det(block))
        thr = tol * max(1.0, _hadamard_bound(block))
        minors.append(d)
        classified.append(0 if abs(d) <= thr else (1 if d > 0 else -1))
    first_nonpos = next((k for k, c in enumerate(classified) if c <= 0), None)
    if first_nonpos is None:
        return PositivityVerdict(
            POSITIVE_DEFINITE, m_max, tuple(minors), exact=False
        )
    k0 = first_nonpos
    if classified[k0] < 0:
        cert = MinorCertificate(k0, tuple(range(k0 + 1)), minors[k0])
        return PositivityVerdict(
            NOT_POSITIVE, m_max, tuple(minors), certificate=cert, exact=False
        )
    evals = np.linalg.eigvalsh(arr)
    scale = max(1.0, float(np.max(np.abs(evals))))
    if evals[0] < -tol * scale:
        cert = _float_negative_minor(arr, tol) or MinorCertificate(
            m_max, tuple(range(m_max + 1)), float(evals[0])
        )
        return PositivityVerdict(
            NOT_POSITIVE, m_max, tuple(minors), certificate=cert, exact=False
        )
    rank = int(np.sum(evals > tol * scale))
    consistent = rank == k0 and all(c == 0 for c in classified[k0:])
    return PositivityVerdict(
        POSITIVE_SEMIDEFINITE,
        m_max,
        tuple(minors),
        rank=rank,
        exact=False,
        leading_rank_consistent=consistent,
    )


def _float_negative_minor(arr: np.ndarray, tol: float):
    order = arr.shape[0] - 1
    for subset in _principal_subsets(order, order + 1):
        block = arr[np.ix_(subset, subset)]
        d = float(np.linalg.det(block))
        if d < -tol * max(1.0, _hadamard_bound(block)):
            return MinorCertificate(len(subset) - 1, tuple(subset), d)
    return None


@dataclass(frozen=True)
class StieltjesResult:
    """Verdicts for the plain and index-shifted Hankel families."""

    unshifted: PositivityVerdict
    shifted: PositivityVerdict

    @property
    def solvable(self) -> bool:
        return self.unshifted.is_positive and self.shifted.is_positive


def stieltjes_test(
    seq: MomentSequence, m_max: int, *, settings: Settings = DEFAULT
) -> StieltjesResult:
    """Test both determinant families; solvable iff both are nonnegative."""
    terms = seq.prefix(2 * m_max + 2)
    unshifted = hamburger_test(seq, m_max, settings=settings)
    shifted_seq = MomentSequence(tuple(terms[1:]))
    shifted = hamburger_test(shifted_seq, m_max, settings=settings)
    return StieltjesResult(unshifted, shifted)


@dataclass(frozen=True)
class HausdorffResult:
    completely_monotonic: bool
    first_violation: Optional[Tuple[int, int]]
    violation_value: Optional[Scalar]
    exact: bool


def hausdorff_test(
    seq: MomentSequence,
    n_max: int,
    k_max: int,
    *,
    settings: Settings = DEFAULT,
) -> HausdorffResult:
    """Check complete monotonicity: (-1)^n (difference^n s)_k >= 0."""
    terms = seq.prefix(n_max + k_max + 1)
    exact = all_exact(terms)
    tol = 0 if exact else settings.float_tolerance * max(
        1.0, max(abs(float(t)) for t in terms)
    )
    row = list(terms)
    for n in range(n_max + 1):
        sign = -1 if n % 2 else 1
        for k in range(min(k_max + 1, len(row))):
            value = sign * row[k]
            if value < -tol:
                return HausdorffResult(False, (n, k), value, exact)
        row = [row[k + 1] - row[k] for k in range(len(row) - 1)]
    return HausdorffResult(True, None, None, exact)
