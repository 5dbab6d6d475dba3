"""Orthonormal polynomials from moments: recurrence, Jacobi matrix, quadrature.

Coefficients come from the Stieltjes orthogonalization procedure run on the
mass-normalized sequence (terms divided by s_0, reported back through the
``scale`` field); on exact input the whole chain stays rational, with the
off-diagonal coefficients stored as exact squares.  Low orders are
cross-checked against the Hankel determinant ratios.

Evaluation follows the classical three-term recurrence

    u P_n = b_n P_{n+1} + a_n P_n + b_{n-1} P_{n-1}

with first-kind initial values P_0 = 1/sqrt(s_0) and second-kind values
Q_0 = 0, Q_1 = sqrt(s_0)/b_0 (mass-normalized input makes these the
textbook 1 and 1/b_0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .config import DEFAULT, Settings
from .errors import EigenFailure, NotPositiveDefinite, PrecisionLoss
from .measures import DiscreteMeasure
from .polyq import Poly, rational_roots
from .rational import Scalar, all_exact
from .sequence_core import MomentSequence, leading_minors


def _poly_mul(a, b, zero):
    out = [zero] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return out


def _stieltjes_chain(ts, depth: int, tol: float):
    """Monic orthogonalization against the moment list ``ts``.

    Returns (alphas, hs, pis, rank): diagonal coefficients, squared norms
    h_k of the monic polynomials, the monic coefficient lists themselves,
    and the detected rank boundary (h_rank = 0) or None.  Stops early when
    the moment list runs out.
    """
    exact = all_exact(ts)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    top = len(ts) - 1

    def lam(coeffs):
        return sum((c * ts[i] for i, c in enumerate(coeffs)), start=zero)

    def lam_abs(coeffs):
        return sum(abs(float(c)) * abs(float(ts[i])) for i, c in enumerate(coeffs))

    alphas = []
    hs = []
    pis = [[one]]
    pi_prev: List = []
    pi_cur = [one]
    rank = None
    for k in range(depth + 2):
        if 2 * k > top:
            break
        sq = _poly_mul(pi_cur, pi_cur, zero)
        h = lam(sq)
        if exact:
            if h < 0:
                raise NotPositiveDefinite(
                    f"squared norm at order {k} is negative: {h}"
                )
            if h == 0:
                rank = k
                hs.append(h)
                break
        else:
            scale = lam_abs(sq) or 1.0
            if not math.isfinite(float(h)) or h <= tol * scale:
                rank = k
                hs.append(max(float(h), 0.0))
                break
        hs.append(h)
        if k == depth + 1 or 2 * k + 1 > top:
            break
        alpha = lam([zero] + sq) / h
        alphas.append(alpha)
        nxt = [zero] + list(pi_cur)
        for i, c in enumerate(pi_cur):
            nxt[i] -= alpha * c
        if k >= 1:
            beta = h / hs[k - 1]
            for i, c in enumerate(pi_prev):
                nxt[i] -= beta * c
        pi_prev, pi_cur = pi_cur, nxt
        pis.append(list(pi_cur))
    return alphas, hs, pis, rank


@dataclass(frozen=True)
class RecurrenceCoefficients:
    """Diagonal a_n and squared off-diagonal b_n^2 coefficients.

    ``b2`` keeps exact squares whenever the input is rational; ``b_value``
    takes the (generally irrational) square root in floating point.  A
    ``rank`` marks a detected finite-rank boundary: the last stored b2
    entry is then zero and the chain ends there.
    """

    a: Tuple[Scalar, ...]
    b2: Tuple[Scalar, ...]
    scale: Scalar
    exact: bool
    rank: Optional[int] = None
    truncated: bool = False

    @property
    def n_max(self) -> int:
        return len(self.a) - 1

    @property
    def poly_depth(self) -> int:
        """Largest n for which P_n is defined (needs b_0..b_{n-1} > 0)."""
        count = 0
        for value in self.b2:
            if value > 0:
                count += 1
            else:
                break
        return count

    def b_value(self, k: int) -> float:
        return math.sqrt(float(self.b2[k]))

    @property
    def bs(self) -> Tuple[float, ...]:
        return tuple(self.b_value(k) for k in range(len(self.b2)))


def recurrence_coefficients(
    seq: MomentSequence,
    n_max: int,
    *,
    allow_rank_deficient: bool = False,
    validate: bool = True,
    settings: Settings = DEFAULT,
) -> RecurrenceCoefficients:
    """a_0..a_{n_max} and b_0..b_{n_max} by Stieltjes orthogonalization.

    Raises NotPositiveDefinite when a leading minor vanishes or goes
    negative inside the requested range, unless ``allow_rank_deficient``
    is set, in which case the chain truncates at the rank boundary (the
    finite-rank case; the returned coefficients then support quadrature
    with up to ``rank`` nodes).
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    terms = seq.prefix(2 * n_max + 3)
    exact = all_exact(terms)
    s0 = terms[0]
    if (s0 if exact else float(s0)) <= 0:
        raise NotPositiveDefinite("s_0 must be positive")
    if exact:
        ts = [Fraction(t) / s0 for t in terms]
    else:
        ts = [float(t) / float(s0) for t in terms]
    alphas, hs, _, rank = _stieltjes_chain(ts, n_max, settings.float_tolerance)
    if rank is not None:
        if not allow_rank_deficient:
            if exact:
                raise NotPositiveDefinite(
                    f"Hankel determinant of order {rank} vanishes"
                )
            raise PrecisionLoss(
                f"squared norm at order {rank} fell below tolerance"
            )
        a = tuple(alphas[:rank])
        b2 = tuple(hs[k + 1] / hs[k] for k in range(rank))
        coeffs = RecurrenceCoefficients(
            a, b2, s0, exact, rank=rank, truncated=not exact
        )
    else:
        a = tuple(alphas)
        b2 = tuple(hs[k + 1] / hs[k] for k in range(len(hs) - 1))
        coeffs = RecurrenceCoefficients(a, b2, s0, exact, rank=None)
    if validate:
        _validate_against_determinants(coeffs, ts, settings)
    return coeffs


def _validate_against_determinants(coeffs, ts, settings: Settings):
    """Cross-check b_n^2 against the Hankel determinant ratio at low orders."""
    depth = min(len(coeffs.b2) - 1, settings.coeff_validation_depth)
    if depth < 0:
        return
    order = depth + 1
    if 2 * order > len(ts) - 1:
        order = (len(ts) - 1) // 2
        depth = order - 1
    rows = [[ts[i + j] for j in range(order + 1)] for i in range(order + 1)]
    if coeffs.exact:
        minors = [Fraction(1)] + leading_minors(rows)  # D_{-1}, D_0, ...
        for k in range(depth + 1):
            if minors[k + 1] == 0:
                break
            expected = minors[k + 2] * minors[k] / minors[k + 1] ** 2
            if coeffs.b2[k] != expected:
                raise PrecisionLoss(
                    f"b_{k}^2 disagrees with determinant ratio: "
                    f"{coeffs.b2[k]} != {expected}"
                )
    else:
        arr = np.array([[float(x) for x in row] for row in rows])
        minors = [1.0] + [
            float(np.linalg.det(arr[: k + 1, : k + 1])) for k in range(order + 1)
        ]
        rel = settings.float_tolerance * 1e3
        for k in range(depth + 1):
            if abs(minors[k + 1]) < 1e-300:
                break
            expected = minors[k + 2] * minors[k] / minors[k + 1] ** 2
            got = float(coeffs.b2[k])
            scale = max(abs(expected), abs(got), 1e-300)
            if abs(got - expected) > rel * scale:
                raise PrecisionLoss(
                    f"b_{k}^2 disagrees with determinant ratio beyond tolerance"
                )


def evaluate_polys(
    coeffs: RecurrenceCoefficients, z, n: int, dps: Optional[int] = None
):
    """[(P_k(z), Q_k(z)) for k = 0..n] by the forward recurrence.

    ``dps`` switches evaluation to mpmath at that many decimal digits;
    the default is complex double precision.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > coeffs.poly_depth:
        raise NotPositiveDefinite(
            f"P_{n} needs b_{n - 1} > 0; available depth is {coeffs.poly_depth}"
        )
    if dps is not None:
        import mpmath

        def to_mp(x):
            if isinstance(x, Fraction):
                return mpmath.mpf(x.numerator) / x.denominator
            return mpmath.mpmathify(x)

        with mpmath.workdps(dps):
            zc = mpmath.mpmathify(z)
            avals = [to_mp(x) for x in coeffs.a]
            b2vals = [to_mp(x) for x in coeffs.b2]
            s0 = to_mp(coeffs.scale)
            return _poly_recurrence(zc, avals, b2vals, s0, n, mpmath.sqrt)
    zc = complex(z)
    avals = [float(x) for x in coeffs.a]
    b2vals = [float(x) for x in coeffs.b2]
    return _poly_recurrence(zc, avals, b2vals, float(coeffs.scale), n, math.sqrt)


def _poly_recurrence(z, a, b2, s0, n, sqrt):
    rs0 = sqrt(s0)
    ps = [1 / rs0]
    qs = [0 * z]
    if n >= 1:
        b0 = sqrt(b2[0])
        ps.append((z - a[0]) * ps[0] / b0)
        qs.append(rs0 / b0 + 0 * z)
    for k in range(1, n):
        bk = sqrt(b2[k])
        bkm1 = sqrt(b2[k - 1])
        ps.append(((z - a[k]) * ps[k] - bkm1 * ps[k - 1]) / bk)
        qs.append(((z - a[k]) * qs[k] - bkm1 * qs[k - 1]) / bk)
    return list(zip(ps, qs))


@dataclass(frozen=True)
class PolynomialPair:
    """Monomial-basis coefficients of (P_n, Q_n), low degree first."""

    degree: int
    p_coeffs: Tuple[float, ...]
    q_coeffs: Tuple[float, ...]

    def evaluate(self, z):
        p = sum(c * z**i for i, c in enumerate(self.p_coeffs))
        q = sum(c * z**i for i, c in enumerate(self.q_coeffs))
        return p, q


def polynomial_pair(coeffs: RecurrenceCoefficients, n: int) -> PolynomialPair:
    """Coefficient vectors for P_n (degree n) and Q_n (degree n-1)."""
    if n > coeffs.poly_depth:
        raise NotPositiveDefinite(
            f"P_{n} needs b_{n - 1} > 0; available depth is {coeffs.poly_depth}"
        )
    rs0 = math.sqrt(float(coeffs.scale))
    a = [float(x) for x in coeffs.a]
    b = [math.sqrt(float(x)) for x in coeffs.b2]
    p_prev = np.array([1.0 / rs0])
    q_prev = np.array([0.0])
    if n == 0:
        return PolynomialPair(0, tuple(p_prev), tuple(q_prev))
    p_cur = np.array([-a[0] / (b[0] * rs0), 1.0 / (b[0] * rs0)])
    q_cur = np.array([rs0 / b[0]])
    for k in range(1, n):
        p_next = np.zeros(k + 2)
        p_next[1:] += p_cur
        p_next[: k + 1] -= a[k] * p_cur
        p_next[: k] -= b[k - 1] * p_prev
        p_next /= b[k]
        q_next = np.zeros(k + 1)
        q_next[1:] += q_cur
        q_next[: k] -= a[k] * q_cur
        q_next[: k - 1] -= b[k - 1] * q_prev
        q_next /= b[k]
        p_prev, p_cur = p_cur, p_next
        q_prev, q_cur = q_cur, q_next
    return PolynomialPair(n, tuple(p_cur), tuple(q_cur))


@dataclass(frozen=True)
class JacobiMatrix:
    """Symmetric tridiagonal encoding of the three-term recurrence."""

    diagonal: Tuple[float, ...]
    offdiagonal: Tuple[float, ...]

    @property
    def order(self) -> int:
        return len(self.diagonal)

    def to_numpy(self) -> np.ndarray:
        n = self.order
        mat = np.zeros((n, n))
        mat[np.arange(n), np.arange(n)] = self.diagonal
        if n > 1:
            idx = np.arange(n - 1)
            mat[idx, idx + 1] = self.offdiagonal
            mat[idx + 1, idx] = self.offdiagonal
        return mat


def jacobi_matrix(coeffs: RecurrenceCoefficients, n: int) -> JacobiMatrix:
    if n < 1:
        raise ValueError("order must be at least 1")
    if len(coeffs.a) < n:
        raise NotPositiveDefinite(f"coefficients depth {len(coeffs.a) - 1} < {n - 1}")
    for k in range(n - 1):
        if coeffs.b2[k] <= 0:
            raise NotPositiveDefinite(f"b_{k} vanishes; order {n} unavailable")
    diag = tuple(float(x) for x in coeffs.a[:n])
    off = tuple(coeffs.b_value(k) for k in range(n - 1))
    return JacobiMatrix(diag, off)


def gauss_quadrature(
    coeffs: RecurrenceCoefficients, n: int, *, settings: Settings = DEFAULT
) -> DiscreteMeasure:
    """n-point quadrature measure: Jacobi eigenvalues and squared first
    eigenvector components scaled by the total mass s_0.

    The result reproduces moments s_0 .. s_{2n-1} of the input sequence.
    """
    jm = jacobi_matrix(coeffs, n)
    scale = float(coeffs.scale)
    if n == 1:
        return DiscreteMeasure(((jm.diagonal[0], scale),))
    try:
        vals, vecs = scipy.linalg.eigh_tridiagonal(
            np.array(jm.diagonal), np.array(jm.offdiagonal)
        )
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise EigenFailure(f"tridiagonal eigensolve failed: {exc}") from exc
    weights = scale * vecs[0, :] ** 2
    return DiscreteMeasure(tuple((float(v), float(w)) for v, w in zip(vals, weights)))


def quadrature_from_values(
    values: Sequence[Scalar], n: int, *, settings: Settings = DEFAULT
) -> DiscreteMeasure:
    """n-node quadrature matching moments values[0..2n-1] (floating path).

    Unlike :func:`gauss_quadrature` this consumes exactly the 2n moments the
    Jacobi matrix of order n needs, with no spare depth.
    """
    vals = [float(v) for v in values]
    if len(vals) < 2 * n:
        raise ValueError(f"{2 * n} moments needed for {n} nodes")
    if n < 1:
        raise ValueError("need at least one node")
    if vals[0] <= 0:
        raise NotPositiveDefinite("total mass must be positive")
    alphas, hs, _, rank = _stieltjes_chain(vals, n - 1, settings.float_tolerance)
    if rank is not None and rank < n:
        raise NotPositiveDefinite(f"moments have numerical rank {rank} < {n}")
    if len(alphas) < n:
        raise ValueError("insufficient moments for the requested node count")
    if n == 1:
        return DiscreteMeasure(((float(alphas[0]), vals[0]),))
    off = np.array([math.sqrt(hs[k + 1] / hs[k]) for k in range(n - 1)])
    try:
        eigvals, vecs = scipy.linalg.eigh_tridiagonal(
            np.array(alphas[:n], dtype=float), off
        )
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise EigenFailure(f"tridiagonal eigensolve failed: {exc}") from exc
    weights = vals[0] * vecs[0, :] ** 2
    return DiscreteMeasure(
        tuple((float(v), float(w)) for v, w in zip(eigvals, weights))
    )


# ---------------------------------------------------------------------------
# exact minimal-support recovery (rational counterpart of gauss_quadrature)


def _solve_vandermonde(xs: Sequence[Fraction], rhs: Sequence[Fraction]):
    n = len(xs)
    mat = [[xs[j] ** k for j in range(n)] + [rhs[k]] for k in range(n)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if mat[i][col] != 0), None)
        if pivot is None:
            return None
        mat[col], mat[pivot] = mat[pivot], mat[col]
        pv = mat[col][col]
        for i in range(n):
            if i != col and mat[i][col] != 0:
                factor = mat[i][col] / pv
                for j in range(col, n + 1):
                    mat[i][j] -= factor * mat[col][j]
    return [mat[i][n] / mat[i][i] for i in range(n)]


def exact_atomic_measure(values: Sequence[Scalar]) -> Optional[DiscreteMeasure]:
    """Recover the minimal atomic measure reproducing ``values`` exactly.

    Works when the values are rational, the minimal support is rational,
    and either a finite-rank boundary is visible inside the prefix or the
    prefix has even length (2n moments determine n atoms).  Returns None
    whenever the exact route is unavailable; callers then fall back to
    floating quadrature.
    """
    vals = list(values)
    if not vals or not all_exact(vals):
        return None
    vals = [Fraction(v) for v in vals]
    if vals[0] < 0:
        return None
    if vals[0] == 0:
        return DiscreteMeasure(()) if all(v == 0 for v in vals) else None
    try:
        alphas, hs, pis, rank = _stieltjes_chain(vals, len(vals), 0.0)
    except NotPositiveDefinite:
        return None
    if rank is not None:
        n = rank
    elif len(vals) % 2 == 0:
        n = len(vals) // 2
    else:
        return None
    if n == 0 or len(alphas) < n or len(pis) <= n:
        return None
    roots = rational_roots(Poly(pis[n]))
    if roots is None or len(roots) != n or len(set(roots)) != n:
        return None
    xs = sorted(roots)
    ws = _solve_vandermonde(xs, vals[:n])
    if ws is None or any(w <= 0 for w in ws):
        return None
    measure = DiscreteMeasure(tuple(zip(xs, ws)))
    for k, v in enumerate(vals):
        if measure.moment(k) != v:
            return None
    return measure


def slack_moment(values: Sequence[Scalar]):
    """A consistent next moment for an odd-length full-rank prefix.

    Choosing the value that repeats the newest diagonal recurrence
    coefficient keeps the extended prefix realizable by (K+1)/2 atoms;
    any sufficiently regular choice works, this one is deterministic and
    stays rational on rational input.
    """
    vals = list(values)
    K = len(vals)
    if K % 2 == 0:
        raise ValueError("slack extension applies to odd-length prefixes")
    if K == 1:
        return vals[0]
    exact = all_exact(vals)
    if exact:
        vals = [Fraction(v) for v in vals]
    zero = Fraction(0) if exact else 0.0
    alphas, hs, pis, rank = _stieltjes_chain(vals, K, DEFAULT.float_tolerance)
    if rank is not None:
        raise ValueError("finite-rank prefix needs no slack extension")
    n = (K + 1) // 2
    sq = _poly_mul(pis[n - 1], pis[n - 1], zero)
    shifted = [zero] + sq
    # Lambda(u pi^2) = t + <known moments>; solve for a_{n-1} = a_{n-2}
    known = sum((shifted[i] * vals[i] for i in range(len(shifted) - 1)), start=zero)
    return alphas[n - 2] * hs[n - 1] - known
