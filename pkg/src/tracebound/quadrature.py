"""Gauss-Chebyshev quadrature and spectral kernel evaluation.

Every measure handled by this package lives on a union of intervals and
has an inverse-square-root endpoint blowup, so on each interval [a, b]
we write

    d(mu) = f(x) dx / sqrt((x - a)(b - x)),

substitute x = m + r cos(theta) (m midpoint, r half-width), and the
weight collapses: d(mu) = f(x(theta)) d(theta).  Integrals become plain
averages over the first-kind Chebyshev angles theta_j = (2j+1) pi / 2N,
which is the N-point Gauss-Chebyshev rule; smooth f means spectral
accuracy.

Potentials and Cauchy transforms are then read off a Chebyshev cosine
series of f.  With f(theta) ~ c_0/2 + sum_m c_m cos(m theta):

  * log kernel, s anywhere:  the classical expansion
        log|w - cos(theta)| = log(|zeta|/2) - sum_m (2/m)...
    reduces to closed sums; on the cut (|w| <= 1) the surviving
    formula is  log(r/2) mass - pi sum c_m cos(m theta_s)/m, and off
    the cut zeta = w + sign(w) sqrt(w^2-1) replaces cos(m theta_s)
    by zeta^{-m}.  The two branches agree at the endpoints.

  * Cauchy kernel on the cut: Glauert's principal-value integral
        PV int_0^pi cos(m t)/(cos t - cos a) dt = pi sin(m a)/sin(a)
    (Tricomi, "Integral Equations", sec. 4.3); off the cut the same
    zeta-series as above, differentiated term by term for the
    second-moment kernel.

All formulas are exact for f a Chebyshev polynomial of degree < N, so
the only error is the (spectrally small) tail of f.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .support import Support


class TooCloseToNode(ValueError):
    """Kernel evaluation requested on top of a square-root singularity
    where the answer would be meaningless (Cauchy/second-moment kernels
    at an interval endpoint)."""


_cos_tables = {}


def _cos_table(n: int) -> np.ndarray:
    """cos(m theta_j) for m, j in [0, n); cached since n is shared by
    every interval of a run."""
    tab = _cos_tables.get(n)
    if tab is None:
        theta = (2 * np.arange(n) + 1) * np.pi / (2 * n)
        tab = np.cos(np.outer(np.arange(n), theta))
        _cos_tables[n] = tab
    return tab


@dataclass(frozen=True)
class ChebGrid:
    """First-kind Chebyshev nodes on one interval."""

    a: float
    b: float
    theta: np.ndarray   # (n,) angles in (0, pi), decreasing x order
    x: np.ndarray       # (n,) nodes m + r cos(theta)

    @classmethod
    def build(cls, a: float, b: float, n: int) -> "ChebGrid":
        theta = (2 * np.arange(n) + 1) * np.pi / (2 * n)
        x = 0.5 * (a + b) + 0.5 * (b - a) * np.cos(theta)
        return cls(float(a), float(b), theta, x)

    @property
    def n(self) -> int:
        return len(self.theta)

    @property
    def mid(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def rad(self) -> float:
        return 0.5 * (self.b - self.a)

    @property
    def weight(self) -> float:
        return np.pi / self.n


def grids(support: Support, n: int) -> List[ChebGrid]:
    return [ChebGrid.build(a, b, n) for a, b in support.intervals]


def integrate(grid: ChebGrid, fvals: np.ndarray, gvals=None) -> float:
    """integral of g d(mu) on this interval, mu given by its f-vector."""
    if gvals is None:
        return grid.weight * float(np.sum(fvals))
    return grid.weight * float(np.sum(fvals * gvals))


def cheb_coeffs(fvals: np.ndarray) -> np.ndarray:
    """Cosine-series coefficients c_m = (2/N) sum_j f_j cos(m theta_j).

    The series f = c_0/2 + sum_{m>=1} c_m cos(m theta) interpolates f at
    the grid angles.
    """
    n = len(fvals)
    return (2.0 / n) * (_cos_table(n) @ np.asarray(fvals, dtype=float))


def _split(grid: ChebGrid, s) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    sa = np.atleast_1d(np.asarray(s, dtype=float))
    w = (sa - grid.mid) / grid.rad
    inside = np.abs(w) <= 1.0
    return sa, w, inside


def log_kernel(grid: ChebGrid, coeffs: np.ndarray, s):
    """U(s) = int log|s - y| d(mu)(y) over this interval.

    Continuous across the endpoints; both branches are evaluated from
    the same coefficient vector.
    """
    sa, w, inside = _split(grid, s)
    n = len(coeffs)
    m = np.arange(1, n)
    mass = np.pi * coeffs[0] / 2.0
    out = np.empty_like(sa)

    if np.any(inside):
        th = np.arccos(np.clip(w[inside], -1.0, 1.0))
        # rows: evaluation points, cols: modes
        series = np.cos(np.outer(th, m)) @ (coeffs[1:] / m)
        out[inside] = np.log(grid.rad / 2.0) * mass - np.pi * series
    if np.any(~inside):
        wo = w[~inside]
        root = np.sqrt(wo * wo - 1.0)
        zeta_inv = 1.0 / (wo + np.sign(wo) * root)
        powers = np.power(zeta_inv[:, None], m[None, :])
        series = powers @ (coeffs[1:] / m)
        out[~inside] = np.log(grid.rad * np.abs(1.0 / zeta_inv) / 2.0) * mass - np.pi * series
    if np.ndim(s) == 0:
        return float(out[0])
    return out


def cauchy_kernel(grid: ChebGrid, coeffs: np.ndarray, s):
    """C(s) = int d(mu)(y) / (s - y), principal value on the cut.

    On the cut this is Glauert's formula; at the two endpoints the
    removable sin(m t)/sin(t) limit is taken explicitly.  Off the cut
    the geometric zeta-series.
    """
    sa, w, inside = _split(grid, s)
    n = len(coeffs)
    m = np.arange(1, n)
    out = np.empty_like(sa)

    if np.any(inside):
        wi = np.clip(w[inside], -1.0, 1.0)
        th = np.arccos(wi)
        sin_th = np.sin(th)
        vals = np.empty_like(th)
        reg = sin_th > 1e-9
        if np.any(reg):
            ratio = np.sin(np.outer(th[reg], m)) / sin_th[reg, None]
            vals[reg] = ratio @ coeffs[1:]
        if np.any(~reg):
            # theta -> 0 or pi: sin(m t)/sin t -> m or m (-1)^{m+1}
            lim = np.where(wi[~reg, None] > 0, m[None, :],
                           m[None, :] * np.where(m[None, :] % 2 == 1, 1, -1))
            vals[~reg] = lim @ coeffs[1:]
        out[inside] = -(np.pi / grid.rad) * vals
    if np.any(~inside):
        wo = w[~inside]
        root = np.sqrt(wo * wo - 1.0)
        if np.any(root < 1e-12):
            raise TooCloseToNode("Cauchy kernel at an interval endpoint")
        zeta_inv = 1.0 / (wo + np.sign(wo) * root)
        powers = np.power(zeta_inv[:, None], m[None, :])
        series = coeffs[0] / 2.0 + powers @ coeffs[1:]
        out[~inside] = (np.pi / grid.rad) * np.sign(wo) / root * series
    if np.ndim(s) == 0:
        return float(out[0])
    return out


def moment2_kernel(grid: ChebGrid, coeffs: np.ndarray, s):
    """D(s) = int d(mu)(y) / (s - y)^2 for s strictly off the cut.

    Obtained as -d/ds of the off-cut Cauchy series, using
    zeta'(w) = sign(w) zeta / sqrt(w^2 - 1).
    """
    sa, w, _ = _split(grid, s)
    if np.any(np.abs(w) <= 1.0 + 1e-12):
        raise TooCloseToNode("second-moment kernel needs s off the interval")
    n = len(coeffs)
    m = np.arange(1, n)
    root = np.sqrt(w * w - 1.0)
    sign = np.sign(w)
    zeta_inv = 1.0 / (w + sign * root)
    powers = np.power(zeta_inv[:, None], m[None, :])
    s0 = coeffs[0] / 2.0 + powers @ coeffs[1:]
    s1 = powers @ (m * coeffs[1:])
    r = grid.rad
    out = (np.pi / r**2) * (sign * w / root**3 * s0 + s1 / root**2)
    if np.ndim(s) == 0:
        return float(out[0])
    return out
