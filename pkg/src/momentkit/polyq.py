"""Exact univariate polynomials over the rationals.

Dense coefficient representation (low degree first), Fraction arithmetic
throughout.  Provides what the symbolic positivity machinery needs: Yun
square-free decomposition, Sturm-chain real-root counting, an exact
decision procedure for nonnegativity on the whole real line, and a
constructive rational witness point when the decision is negative.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple


def _trim(coeffs: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    last = len(coeffs)
    while last > 0 and coeffs[last - 1] == 0:
        last -= 1
    return tuple(coeffs[:last])


class Poly:
    """Immutable rational polynomial; the zero polynomial has degree -1."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs = _trim([Fraction(c) for c in coeffs])

    @classmethod
    def monomial(cls, power: int, coeff=1) -> "Poly":
        return cls([Fraction(0)] * power + [Fraction(coeff)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly(
            [
                (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                for i in range(n)
            ]
        )

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero or other.is_zero:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    def scale(self, factor) -> "Poly":
        return Poly([c * factor for c in self.coeffs])

    def __call__(self, x):
        """Horner evaluation; x may be Fraction, float, complex or mpmath."""
        result = x * 0
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "Poly":
        if self.is_zero:
            return self
        lc = self.leading
        return Poly([c / lc for c in self.coeffs])

    def divmod(self, other: "Poly") -> Tuple["Poly", "Poly"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        q = [Fraction(0)] * max(0, self.degree - other.degree + 1)
        rem = list(self.coeffs)
        d = other.degree
        lc = other.leading
        while True:
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) - 1 < d:
                break
            factor = rem[-1] / lc
            shift = len(rem) - 1 - d
            q[shift] = factor
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= factor * c
        return Poly(q), Poly(rem)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def __repr__(self):
        return f"Poly({self.text()})"

    def text(self, var: str = "u") -> str:
        if self.is_zero:
            return "0"
        parts = []
        for power in range(self.degree, -1, -1):
            c = self.coeffs[power]
            if c == 0:
                continue
            mag = abs(c)
            if power == 0:
                body = str(mag)
            else:
                head = "" if mag == 1 else f"{mag}*"
                body = f"{head}{var}" + (f"^{power}" if power > 1 else "")
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic polynomial gcd via the Euclidean algorithm."""
    while not b.is_zero:
        a, b = b, a % b
    return a.monic() if not a.is_zero else a


def squarefree_part(p: Poly) -> Poly:
    if p.degree <= 0:
        return p.monic()
    return (p // gcd(p, p.derivative())).monic()


def squarefree_decomposition(p: Poly) -> List[Tuple[Poly, int]]:
    """Yun's algorithm: p = lc * prod g_i^i with g_i monic square-free."""
    if p.degree <= 0:
        return []
    f = p.monic()
    d = gcd(f, f.derivative())
    b = f // d
    c = f.derivative() // d
    e = c - b.derivative()
    factors: List[Tuple[Poly, int]] = []
    i = 1
    while b.degree > 0:
        g = gcd(b, e)
        if g.degree > 0:
            factors.append((g, i))
        b = b // g
        c = e // g
        e = c - b.derivative()
        i += 1
    return factors


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sturm_chain(p: Poly) -> List[Poly]:
    chain = [p, p.derivative()]
    while chain[-1].degree > 0:
        rem = chain[-2] % chain[-1]
        if rem.is_zero:
            break
        chain.append(-rem)
    return [q for q in chain if not q.is_zero]


def _variations(signs: Sequence[int]) -> int:
    filtered = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(filtered, filtered[1:]) if a * b < 0)


def _variations_at(chain: Sequence[Poly], x: Fraction) -> int:
    return _variations([_sign(q(x)) for q in chain])


def _variations_at_inf(chain: Sequence[Poly], positive: bool) -> int:
    signs = []
    for q in chain:
        s = _sign(q.leading)
        if not positive and q.degree % 2 == 1:
            s = -s
        signs.append(s)
    return _variations(signs)


def cauchy_root_bound(p: Poly) -> Fraction:
    """All real roots of p lie in (-B, B)."""
    if p.degree <= 0:
        return Fraction(1)
    lc = abs(p.leading)
    return 1 + max(abs(c) for c in p.coeffs[:-1]) / lc


def count_real_roots(p: Poly, lo=None, hi=None) -> int:
    """Number of distinct real roots of p, optionally within (lo, hi]."""
    if p.degree <= 0:
        return 0
    chain = sturm_chain(squarefree_part(p))
    va = (
        _variations_at(chain, Fraction(lo))
        if lo is not None
        else _variations_at_inf(chain, positive=False)
    )
    vb = (
        _variations_at(chain, Fraction(hi))
        if hi is not None
        else _variations_at_inf(chain, positive=True)
    )
    return va - vb


def isolate_real_roots(p: Poly) -> List[Tuple[Fraction, Fraction]]:
    """Disjoint rational intervals (lo, hi], each holding one distinct root."""
    if p.degree <= 0:
        return []
    sf = squarefree_part(p)
    chain = sturm_chain(sf)
    bound = cauchy_root_bound(sf)

    def count(lo, hi):
        return _variations_at(chain, lo) - _variations_at(chain, hi)

    pending = [(-bound - 1, bound + 1)]
    isolated: List[Tuple[Fraction, Fraction]] = []
    while pending:
        lo, hi = pending.pop()
        c = count(lo, hi)
        if c == 0:
            continue
        if c == 1:
            isolated.append((lo, hi))
            continue
        mid = _off_root_midpoint(sf, lo, hi)
        pending.append((lo, mid))
        pending.append((mid, hi))
    isolated.sort()
    return isolated


def _off_root_midpoint(sf: Poly, lo: Fraction, hi: Fraction) -> Fraction:
    mid = (lo + hi) / 2
    step = (hi - lo) / 64
    while sf(mid) == 0:
        mid += step
    return mid


def nonneg_on_reals(p: Poly) -> bool:
    """Exact decision: p(u) >= 0 for every real u.

    Nonnegative iff the leading coefficient is positive, the degree even,
    and every odd-multiplicity square-free factor has no real root.
    """
    if p.is_zero:
        return True
    if p.degree == 0:
        return p.coeffs[0] >= 0
    if p.leading < 0 or p.degree % 2 == 1:
        return False
    for factor, mult in squarefree_decomposition(p):
        if mult % 2 == 1 and count_real_roots(factor) > 0:
            return False
    return True


def negative_point(p: Poly) -> Fraction:
    """A rational u0 with p(u0) < 0; p must not be nonnegative on R."""
    if p.is_zero or (p.degree == 0 and p.coeffs[0] >= 0):
        raise ValueError("polynomial is nonnegative on R")
    for quick in (0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2)):
        if p(Fraction(quick)) < 0:
            return Fraction(quick)
    bound = cauchy_root_bound(p)
    if p.leading < 0:
        return bound + 1
    if p.degree % 2 == 1:
        return -(bound + 1)
    # p dips negative between real roots: refine each isolating interval
    # until its endpoints are off every root, then test their signs
    sf = squarefree_part(p)
    chain = sturm_chain(sf)
    for lo, hi in isolate_real_roots(p):
        for _ in range(p.degree.bit_length() + 64):
            if p(lo) < 0:
                return lo
            if p(hi) < 0:
                return hi
            mid = _off_root_midpoint(sf, lo, hi)
            if _variations_at(chain, lo) - _variations_at(chain, mid) >= 1:
                hi = mid
            else:
                lo = mid
    raise ValueError("no negative point found; polynomial may be nonnegative")


def rational_roots(p: Poly):
    """All n roots of p when every root is rational, else None.

    Float roots guide candidate reconstruction; every candidate is verified
    exactly before deflation, so a returned list is exact.
    """
    import numpy as np

    work = p.monic()
    roots: List[Fraction] = []
    while work.degree > 0:
        root = _one_rational_root(work, np)
        if root is None:
            return None
        roots.append(root)
        work = work // Poly([-root, Fraction(1)])
    return roots


def _one_rational_root(p: Poly, np):
    if p.coeffs[0] == 0:
        return Fraction(0)
    high_first = [float(c) for c in reversed(p.coeffs)]
    if not all(abs(c) < 1e300 for c in high_first):
        return None
    for z in np.roots(high_first):
        if abs(z.imag) > 1e-6 * max(1.0, abs(z.real)):
            continue
        x = float(z.real)
        for limit in (1, 16, 4096, 10**6, 10**12):
            cand = Fraction(x).limit_denominator(limit)
            if p(cand) == 0:
                return cand
    return None


def det_poly(matrix: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant of a small polynomial matrix by cofactor expansion."""
    n = len(matrix)
    if n == 0:
        return Poly([1])
    if n == 1:
        return matrix[0][0]
    if n == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    total = Poly()
    for j in range(n):
        if matrix[0][j].is_zero:
            continue
        minor = [[row[k] for k in range(n) if k != j] for row in matrix[1:]]
        term = matrix[0][j] * det_poly(minor)
        total = total + term if j % 2 == 0 else total - term
    return total
