"""Exact arithmetic for integer polynomials.

Everything in this module is exact: coefficients are Python ints (or
Fractions where division is unavoidable), resultants come from the
subresultant polynomial remainder sequence, and real roots are isolated
with Sturm chains before any floating point enters the picture.  The
rest of the package only ever sees polynomial data through here, so the
invariants (squarefree, totally real, known root count) are established
once and trusted downstream.

Polynomials are stored with coefficients in ascending degree order,
so [1, -3, 1] is x^2 - 3x + 1.  The JSON wire format is the same list
with each coefficient rendered as a decimal string, which keeps large
integers exact across serialization.

References for the subresultant algorithm: Cohen, "A Course in
Computational Algebraic Number Theory", Algorithm 3.3.7; Brown and
Traub, "On Euclid's algorithm and the theory of subresultants".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd as int_gcd
from typing import Iterable, List, Sequence, Tuple


class PolyError(ValueError):
    """Base class for polynomial arithmetic failures."""


class NonSquarefree(PolyError):
    """Raised when an operation requires a squarefree polynomial."""


class NotTotallyReal(PolyError):
    """Raised when a polynomial set member has non-real roots."""


def _strip(coeffs: Sequence[int]) -> Tuple[int, ...]:
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class IntPoly:
    """An integer polynomial, coefficients ascending in degree."""

    coeffs: Tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        cs = _strip([int(c) for c in coeffs])
        object.__setattr__(self, "coeffs", cs)

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial assigned degree -1."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        if not self.coeffs:
            raise PolyError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        """Evaluate by Horner's rule.  Exact on int/Fraction inputs."""
        acc = 0 * x  # matches the type of x (works for numpy arrays too)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "IntPoly":
        return IntPoly([i * c for i, c in enumerate(self.coeffs)][1:] or [0])

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = int_gcd(g, abs(c))
        return g if g else 1

    def primitive(self) -> "IntPoly":
        g = self.content()
        return IntPoly([c // g for c in self.coeffs])

    def avg_trace(self) -> Fraction:
        """Mean of the roots: -c_{n-1} / (n c_n), exactly."""
        if self.degree < 1:
            raise PolyError("average trace needs degree >= 1")
        n = self.degree
        return Fraction(-self.coeffs[n - 1], n * self.coeffs[n])

    def to_json(self) -> List[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "IntPoly":
        return cls([int(s) for s in data])

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mag = "" if abs(c) == 1 else str(abs(c))
                term = f"{mag}x" if i == 1 else f"{mag}x^{i}"
                parts.append(f"-{term}" if c < 0 else f"+{term}" if parts else term)
        return "".join(parts) if parts else "0"


def _pseudo_rem(a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
    """Pseudo-remainder prem(A, B) = lc(B)^(degA-degB+1) * A mod B, exact."""
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    da = len(a) - 1
    k = da - db + 1
    for _ in range(k):
        da = len(a) - 1
        if da < db:
            a = [c * lb for c in a]
            continue
        la = a[-1]
        a = [c * lb for c in a]
        for i in range(db + 1):
            a[da - db + i] -= la * b[i]
        a = list(_strip(a))
        if not a:
            return ()
    return _strip(a)


def resultant(p: IntPoly, q: IntPoly) -> int:
    """Resultant of two integer polynomials via the subresultant PRS.

    Exact including sign.  Res(p, q) = lc(p)^deg(q) * prod q(alpha) over
    the roots alpha of p, counted with multiplicity.
    """
    if p.is_zero() or q.is_zero():
        return 0
    if p.degree == 0:
        return p.coeffs[0] ** q.degree
    if q.degree == 0:
        return q.coeffs[0] ** p.degree
    a, b = p.primitive(), q.primitive()
    ca, cb = p.content(), q.content()
    t = ca**q.degree * cb**p.degree
    s = 1
    if a.degree < b.degree:
        if a.degree % 2 == 1 and b.degree % 2 == 1:
            s = -1
        a, b = b, a
    A, B = a.coeffs, b.coeffs
    g = h = 1
    while True:
        da, db = len(A) - 1, len(B) - 1
        delta = da - db
        if da % 2 == 1 and db % 2 == 1:
            s = -s
        R = _pseudo_rem(A, B)
        if not R:
            return 0  # common factor of positive degree
        denom = g * h**delta
        A, B = B, tuple(c // denom for c in R)
        g = A[-1]
        # h <- h^(1-delta) g^delta; exact integer division for delta > 1
        if delta == 1:
            h = g
        elif delta > 1:
            h = g**delta // h ** (delta - 1)
        if len(B) - 1 == 0:
            break
    p_last = len(A) - 1
    c = B[0]
    num = c**p_last
    den = h ** (p_last - 1) if p_last >= 1 else 1
    return s * t * (num // den if den != 1 else num)


def discriminant(p: IntPoly) -> int:
    """Disc(p) = (-1)^(n(n-1)/2) Res(p, p') / lc(p), exact."""
    n = p.degree
    if n < 1:
        raise PolyError("discriminant needs degree >= 1")
    r = resultant(p, p.derivative())
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    val, rem = divmod(sign * r, p.lead)
    if rem != 0:
        raise PolyError("discriminant division failed (bug)")
    return val


def _frac_rem(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a = a[:]
    db = len(b) - 1
    while len(a) - 1 >= db and any(a):
        da = len(a) - 1
        f = a[-1] / b[-1]
        for i in range(db + 1):
            a[da - db + i] -= f * b[i]
        while a and a[-1] == 0:
            a.pop()
    return a


def _sturm_chain(p: IntPoly) -> List[List[Fraction]]:
    chain = [[Fraction(c) for c in p.coeffs], [Fraction(c) for c in p.derivative().coeffs]]
    while len(chain[-1]) > 1:
        r = _frac_rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _sign_changes(chain: List[List[Fraction]], x: Fraction) -> int:
    signs = []
    for cs in chain:
        v = Fraction(0)
        for c in reversed(cs):
            v = v * x + c
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def count_real_roots(p: IntPoly, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots of p in (lo, hi], by Sturm's theorem."""
    chain = _sturm_chain(p)
    return _sign_changes(chain, lo) - _sign_changes(chain, hi)


def is_squarefree(p: IntPoly) -> bool:
    # gcd(p, p') is constant iff Res(p, p') != 0 iff disc != 0
    return resultant(p, p.derivative()) != 0


def root_bound(p: IntPoly) -> Fraction:
    """Cauchy bound: all real roots lie in (-B, B)."""
    lc = abs(p.lead)
    m = max(abs(c) for c in p.coeffs[:-1]) if p.degree >= 1 else 0
    return Fraction(m, lc) + 1


def real_roots(p: IntPoly, tol: float = 1e-13) -> List[float]:
    """All real roots, ascending, isolated by Sturm bisection then polished.

    Raises NonSquarefree on repeated roots: the callers in this package
    all need simple roots, and silently collapsing a multiple root would
    hide an input error.
    """
    if p.degree < 1:
        return []
    if not is_squarefree(p):
        raise NonSquarefree(f"{p} has a repeated root")
    if p.degree == 1:
        return [-p.coeffs[0] / p.coeffs[1]]
    chain = _sturm_chain(p)
    B = root_bound(p)
    total = _sign_changes(chain, -B) - _sign_changes(chain, B)
    # bisect until every bracket isolates one root
    work = [(-B, B, total)]
    isolated = []
    while work:
        lo, hi, n = work.pop()
        if n == 0:
            continue
        if n == 1:
            isolated.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        while not p(mid):  # landed on a root exactly; nudge
            mid = (mid + hi) / 2
        nl = _sign_changes(chain, lo) - _sign_changes(chain, mid)
        work.append((lo, mid, nl))
        work.append((mid, hi, n - nl))
    roots = []
    dp = p.derivative()
    for lo, hi in isolated:
        # exact bisection down to a small bracket, then float Newton
        for _ in range(40):
            mid = (lo + hi) / 2
            vm = p(mid)
            if vm == 0:
                lo = hi = mid
                break
            if (p(lo) > 0) == (vm > 0):
                lo = mid
            else:
                hi = mid
        x = float((lo + hi) / 2)
        for _ in range(8):
            fx, dfx = p(x), dp(x)
            if dfx == 0:
                break
            step = fx / dfx
            x -= step
            if abs(step) < tol * max(1.0, abs(x)):
                break
        roots.append(x)
    roots.sort()
    return roots


class PolySet:
    """A finite set of distinct, squarefree, totally real integer polynomials.

    This is the admissible input class: each member must split completely
    over the reals (checked with a Sturm count against the degree), since
    the construction downstream places one root in each support gap.
    """

    def __init__(self, polys: Iterable[IntPoly]):
        ps = list(polys)
        seen = set()
        for q in ps:
            if q.degree < 1:
                raise PolyError(f"constant polynomial {q} not allowed")
            if q.coeffs in seen:
                raise PolyError(f"duplicate polynomial {q}")
            seen.add(q.coeffs)
            if not is_squarefree(q):
                raise NonSquarefree(f"{q} is not squarefree")
            B = root_bound(q)
            n = count_real_roots(q, -B, B)
            if n != q.degree:
                raise NotTotallyReal(f"{q} has {q.degree - n} non-real roots")
        self.polys: Tuple[IntPoly, ...] = tuple(ps)
        self._roots = None

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)

    def roots(self) -> List[List[float]]:
        """Real roots of each member, cached."""
        if self._roots is None:
            self._roots = [real_roots(q) for q in self.polys]
        return self._roots

    def roots_of(self, q: IntPoly) -> List[float]:
        return self.roots()[self.polys.index(q)]

    def all_roots(self) -> List[float]:
        out = []
        for rs in self.roots():
            out.extend(rs)
        return sorted(out)

    def total_degree(self) -> int:
        return sum(q.degree for q in self.polys)

    def to_json(self) -> List[List[str]]:
        return [q.to_json() for q in self.polys]

    @classmethod
    def from_json(cls, data) -> "PolySet":
        if isinstance(data, str):
            data = json.loads(data)
        return cls([IntPoly.from_json(row) for row in data])
