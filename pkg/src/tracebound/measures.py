"""Measures on interval unions and their logarithmic potentials.

Everything here is a measure of the form f(x) dx / sqrt((x-a)(b-x)) per
interval, held as node values of f on the Gauss-Chebyshev grids of
quadrature.py.  Three canonical constructions:

  * equilibrium(support): the arcsine-type equilibrium measure of the
    union, density |P(x)| / (pi sqrt|H(x)|) with P monic of degree l
    (one fewer than the number of intervals).  The l coefficients are
    pinned by the period conditions int_gap P/sqrt(H) = 0, which make
    the potential constant across all components (Saff & Totik,
    "Logarithmic Potentials with External Fields", ch. IV).

  * linear_measure(support): the signed measure whose potential is
    x + const on the support, numerator -x P(x) + G(x) with deg G < l
    fixed by the same period conditions.  Its Cauchy transform is
    identically 1 on the support (the airfoil identity generalized).

  * root_measure(support, alpha): balayage of the point mass at alpha
    onto the support, computed by inverting the plane at alpha: the
    equilibrium numerator of the image union 1/(Sigma - alpha), pulled
    back, gives the density in closed form.  Probability measure with
    potential log|x - alpha| + const on the support.

Potentials, Cauchy transforms, energies and polynomial log-moments are
all evaluated spectrally from the Chebyshev coefficients of f.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import chebyshev as npcheb
from numpy.polynomial import polynomial as npoly

from .polyarith import IntPoly
from .quadrature import (
    ChebGrid,
    cauchy_kernel,
    cheb_coeffs,
    grids,
    integrate,
    log_kernel,
    moment2_kernel,
)
from .support import Support, SupportError, H_eval, rest_abs


class IllConditioned(RuntimeError):
    """The gap period system is numerically unusable (gap collapsed or
    intervals nearly touching)."""


@dataclass
class Measure:
    """A (possibly signed) measure on a support, one f-vector per
    interval."""

    support: Support
    grids: List[ChebGrid]
    fvecs: List[np.ndarray]
    _coeffs: Optional[List[np.ndarray]] = field(default=None, repr=False)

    @property
    def coeffs(self) -> List[np.ndarray]:
        if self._coeffs is None:
            self._coeffs = [cheb_coeffs(f) for f in self.fvecs]
        return self._coeffs

    def mass(self) -> float:
        return sum(integrate(g, f) for g, f in zip(self.grids, self.fvecs))

    def expectation(self) -> float:
        """int x d(mu)."""
        return sum(integrate(g, f, g.x) for g, f in zip(self.grids, self.fvecs))

    def potential(self, s):
        """U(s) = int log|s - y| d(mu)(y), any real s."""
        out = 0.0
        for g, c in zip(self.grids, self.coeffs):
            out = out + log_kernel(g, c, s)
        return out

    def cauchy(self, s):
        """int d(mu)(y)/(s - y), principal value on the support."""
        out = 0.0
        for g, c in zip(self.grids, self.coeffs):
            out = out + cauchy_kernel(g, c, s)
        return out

    def moment2(self, s):
        """int d(mu)(y)/(s - y)^2 for s off the support."""
        out = 0.0
        for g, c in zip(self.grids, self.coeffs):
            out = out + moment2_kernel(g, c, s)
        return out

    def density(self, s, k: int):
        """d(mu)/dx on the interior of interval k (blows up like the
        inverse square root toward the interval ends)."""
        g, c = self.grids[k], self.coeffs[k]
        sa = np.asarray(s, dtype=float)
        w = np.clip((sa - g.mid) / g.rad, -1.0, 1.0)
        coef = c.copy()
        coef[0] *= 0.5
        f = npcheb.chebval(w, coef)
        root = np.sqrt(np.maximum((sa - g.a) * (g.b - sa), 0.0))
        with np.errstate(divide="ignore"):
            out = f / root
        if np.ndim(s) == 0:
            return float(out)
        return out

    def log_moment(self, q: IntPoly, roots: Sequence[float]) -> float:
        """int log|q| d(mu), evaluated as sum_a U(a) over the roots of q
        (plus the leading coefficient); exact for the interpolated
        density and immune to the log singularities sitting in the gaps.
        """
        out = float(np.sum(self.potential(np.asarray(roots, dtype=float))))
        lead = q.lead
        if lead != 1:
            out += np.log(abs(lead)) * self.mass()
        return out

    def energy(self, other: "Measure" = None) -> float:
        """I(mu, other) = int int log|x-y| d(mu)(x) d(other)(y); self-energy
        when other is omitted."""
        if other is None:
            other = self
        out = 0.0
        for g, f in zip(other.grids, other.fvecs):
            out += integrate(g, f, self.potential(g.x))
        return out

    def scaled(self, w: float) -> "Measure":
        return Measure(self.support, self.grids, [w * f for f in self.fvecs])


def combine(measures: Sequence[Measure], weights: Sequence[float]) -> Measure:
    """Weighted sum; all measures must share the same grids."""
    base = measures[0]
    fvecs = [np.zeros_like(f) for f in base.fvecs]
    for m, w in zip(measures, weights):
        if m.support.endpoints != base.support.endpoints:
            raise ValueError("cannot combine measures on different supports")
        for k, f in enumerate(m.fvecs):
            fvecs[k] = fvecs[k] + w * f
    return Measure(base.support, base.grids, fvecs)


# ---------------------------------------------------------------------------
# gap period system

def _gap_grids(endpoints: Sequence[float], n: int) -> List[ChebGrid]:
    e = list(endpoints)
    return [ChebGrid.build(e[2 * j + 1], e[2 * j + 2], n) for j in range((len(e) - 2) // 2)]


def _gap_rest(endpoints: Sequence[float], j: int, x: np.ndarray) -> np.ndarray:
    """|H| with gap j's own two factors removed, on that gap."""
    out = np.ones_like(x)
    for i, a in enumerate(endpoints):
        if i in (2 * j + 1, 2 * j + 2):
            continue
        out = out * (x - a)
    return np.abs(out)


def _period_matrix(endpoints: Sequence[float], gap_grids: List[ChebGrid]):
    """M[j, k] = int_gap_j y^k / sqrt|H| dy for k < l, plus the weight
    vectors 1/sqrt(rest) needed for right-hand sides."""
    l = len(gap_grids)
    wvecs = []
    M = np.empty((l, l))
    for j, g in enumerate(gap_grids):
        w = 1.0 / np.sqrt(_gap_rest(endpoints, j, g.x))
        wvecs.append(w)
        for k in range(l):
            M[j, k] = integrate(g, w, g.x**k) / np.pi
    return M, wvecs


def _solve_period(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    if M.size == 0:
        return np.zeros(0)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > 1e12:
        raise IllConditioned(f"gap period matrix has condition number {cond:.3g}")
    return np.linalg.solve(M, rhs)


def _equilibrium_numer(endpoints: Sequence[float], n: int) -> np.ndarray:
    """Ascending coefficients of the monic degree-l numerator whose gap
    periods vanish."""
    l = len(endpoints) // 2 - 1
    if l == 0:
        return np.array([1.0])
    gg = _gap_grids(endpoints, n)
    M, wvecs = _period_matrix(endpoints, gg)
    rhs = np.array([-integrate(g, w, g.x**l) / np.pi for g, w in zip(gg, wvecs)])
    c = _solve_period(M, rhs)
    return np.append(c, 1.0)


# ---------------------------------------------------------------------------
# canonical measures

@dataclass
class EquilibriumResult:
    measure: Measure
    numer: np.ndarray          # ascending coefficients, monic degree l


@dataclass
class LinearResult:
    measure: Measure
    numer: np.ndarray          # ascending coefficients of -x P(x) + G(x)


@dataclass
class RootResult:
    measure: Measure
    alpha: float
    numer: np.ndarray          # ascending coefficients of the pulled-back
                               # image numerator, evaluated at x - alpha
    sqrt_H_alpha: float


def _numer_measure(support: Support, gs: List[ChebGrid], numer: np.ndarray,
                   absolute: bool) -> Measure:
    """Measure with density numer(x) / (pi sqrt|H|); absolute=True takes
    |numer| (positive measures whose numerator alternates sign), False
    applies the interval sign pattern (signed measures)."""
    fvecs = []
    for k, g in enumerate(gs):
        vals = npoly.polyval(g.x, numer)
        if absolute:
            vals = np.abs(vals)
        else:
            vals = vals * support.pattern(k)
        fvecs.append(vals / (np.pi * np.sqrt(rest_abs(support, k, g.x))))
    return Measure(support, gs, fvecs)


def equilibrium(support: Support, n: int) -> EquilibriumResult:
    numer = _equilibrium_numer(support.endpoints, n)
    gs = grids(support, n)
    return EquilibriumResult(_numer_measure(support, gs, numer, absolute=True), numer)


def linear_measure(support: Support, n: int,
                   eq: EquilibriumResult = None) -> LinearResult:
    """Signed measure with U(x) = x + const on the support."""
    if eq is None:
        eq = equilibrium(support, n)
    e = support.endpoints
    l = support.n_gaps
    # numerator -x P(x) + G(x); G soaks up the periods that -x P creates
    base = -npoly.polymulx(eq.numer)
    if l:
        gg = _gap_grids(e, n)
        M, wvecs = _period_matrix(e, gg)
        rhs = np.array([
            -integrate(g, w, npoly.polyval(g.x, base)) / np.pi
            for g, w in zip(gg, wvecs)
        ])
        gap_poly = _solve_period(M, rhs)
        numer = npoly.polyadd(base, gap_poly)
    else:
        numer = base
    gs = grids(support, n)
    return LinearResult(_numer_measure(support, gs, numer, absolute=False), numer)


def root_measure(support: Support, alpha: float, n: int) -> RootResult:
    """Balayage of a unit point mass at alpha onto the support.

    Image endpoints 1/(a_i - alpha) form another interval union; its
    equilibrium numerator p, written back through u -> 1/u, yields

        d(omega) = |u^l p(1/u)| sqrt|H(alpha)| / (pi |u| sqrt|H(x)|) dx,

    with u = x - alpha.  Mass 1, potential log|x - alpha| + const.
    """
    Ha, _ = H_eval(support, alpha)
    if abs(Ha) < 1e-30:
        raise SupportError(f"balayage point {alpha} sits on an endpoint")
    if support.contains(alpha):
        raise SupportError(f"balayage point {alpha} lies inside the support")
    image = np.sort(1.0 / (support.as_array() - alpha))
    p = _equilibrium_numer(image, n)
    numer = p[::-1].copy()           # u^l p(1/u)
    sqrt_Ha = float(np.sqrt(abs(Ha)))
    gs = grids(support, n)
    fvecs = []
    for k, g in enumerate(gs):
        u = g.x - alpha
        vals = np.abs(npoly.polyval(u, numer)) / np.abs(u)
        fvecs.append(vals * sqrt_Ha / (np.pi * np.sqrt(rest_abs(support, k, g.x))))
    return RootResult(Measure(support, gs, fvecs), float(alpha), numer, sqrt_Ha)


def poly_measure(support: Support, roots: Sequence[float], n: int) -> Tuple[Measure, List[RootResult]]:
    """mu_Q = average of the root balayages over the roots of Q."""
    parts = [root_measure(support, a, n) for a in roots]
    m = combine([p.measure for p in parts], [1.0 / len(parts)] * len(parts))
    return m, parts
