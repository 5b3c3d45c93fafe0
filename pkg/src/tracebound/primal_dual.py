"""Primal and dual optimizers for the trace problem on a fixed support.

Primal side: probability measures mu on Sigma = union of intervals with
int log|Q| d(mu) >= 0 for each Q in the polynomial set and nonnegative
logarithmic self-energy, minimizing int x d(mu).  Dual side: numbers
lambda_0, lambda_Q >= 0 and a signed measure nu with

    F(x) = x - lambda_0 - sum_Q lambda_Q log|Q(x)| - U_nu(x)/X_lin >= 0

on (0, 18], vanishing identically on Sigma.  When the support is
optimal the two values coincide and lambda_0 is the bound.

For a FIXED support both problems collapse to small linear algebra:

  * nu is a combination  X_eq mu_eq + X_lin mu_lin + sum_Q X_Q mu_Q  of
    the canonical measures of measures.py.  X_lin = pi c with c fixed
    by the normalization  int_Sigma c sqrt|H| / prod|Q| dx = 1, the
    X_Q come from resultant/discriminant data of the set, and X_eq
    makes nu a probability measure.  On Sigma the potential identity
    U_nu = X_lin x + sum_Q (X_Q/deg Q) log|Q| + K then holds, so

        x + sum_Q X_Q/(X_lin deg Q) log|Q(x)| - U_nu(x)/X_lin

    is constant on Sigma; its mean over collocation nodes is lambda_0
    and its spread is a direct quality measure of the computation.

  * the primal optimum is a mixture of mu_eq and the mu_Q whose
    coefficients solve the moment system  int log|Q| d(mu_A) = 0.

What the fixed support does NOT give us is vanishing of the combined
density numerator of nu at the endpoints; those 2l+2 boundary values
T(a_i) are the quantities the outer descent drives to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .measures import (
    EquilibriumResult,
    LinearResult,
    Measure,
    RootResult,
    combine,
    equilibrium,
    linear_measure,
    poly_measure,
)
from .polyarith import IntPoly, PolySet, discriminant, resultant
from .quadrature import ChebGrid, grids, integrate
from .support import Support, rest_abs, require_one_root_per_gap, validate


class SingularW(RuntimeError):
    """The primal moment system has no usable solution."""


N_COLLOC = 32   # extraction nodes per interval


def _full_pivot_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with full pivoting; tiny systems only.

    Raises SingularW when a pivot collapses relative to the largest
    entry, which np.linalg.solve would happily push through.
    """
    n = len(b)
    if n == 0:
        return np.zeros(0)
    M = np.hstack([A.astype(float).copy(), b.reshape(-1, 1).astype(float)])
    col_perm = np.arange(n)
    scale = np.max(np.abs(A)) or 1.0
    for k in range(n):
        sub = np.abs(M[k:, k:n])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] < 1e-13 * scale:
            raise SingularW(f"pivot {sub[i, j]:.3g} at elimination step {k}")
        M[[k, k + i]] = M[[k + i, k]]
        M[:, [k, k + j]] = M[:, [k + j, k]]
        col_perm[[k, k + j]] = col_perm[[k + j, k]]
        M[k + 1:] -= np.outer(M[k + 1:, k] / M[k, k], M[k])
    y = np.zeros(n)
    for k in range(n - 1, -1, -1):
        y[k] = (M[k, n] - M[k, k + 1:n] @ y[k + 1:]) / M[k, k]
    x = np.zeros(n)
    x[col_perm] = y
    return x


def _weighted_area(support: Support, polys: PolySet, n: int) -> float:
    """int_Sigma sqrt|H(x)| / prod_Q |Q(x)| dx."""
    total = 0.0
    for k, g in enumerate(grids(support, n)):
        own = (g.x - g.a) * (g.b - g.x)
        vals = own * np.sqrt(rest_abs(support, k, g.x))
        for q in polys.polys:
            vals = vals / np.abs(q(g.x))
        total += integrate(g, vals)
    return total


def _poly_coefficient(support: Support, polys: PolySet, c: float, q: IntPoly,
                      q_roots: np.ndarray) -> float:
    """X_Q from resultant data.

    |Res(H, Q)| factors through the roots of Q as |lc|^{deg H} prod |H(a)|;
    the pairwise resultants and the discriminant are exact integers.
    In the one-root-per-gap regime the gap polynomial is 1 and its
    resultant with Q drops out.
    """
    d = q.degree
    e = support.as_array()
    habs = 1.0
    for a in q_roots:
        habs *= abs(np.prod(a - e))
    habs *= abs(q.lead) ** len(e)
    num = habs ** (1.0 / (2 * d))
    den = abs(discriminant(q)) ** (1.0 / d)
    for other in polys.polys:
        if other is q:
            continue
        den *= abs(resultant(other, q)) ** (1.0 / d)
    return -d * c * np.pi * num / den


@dataclass
class DualSolution:
    support: Support
    polys: PolySet
    n: int
    eq: EquilibriumResult
    lin: LinearResult
    mu_q: List[Measure]
    root_parts: List[List[RootResult]]
    c: float
    X_eq: float
    X_lin: float
    X_q: np.ndarray
    nu: Measure
    lambda0: float
    lambda_dev: float
    lambda_q: np.ndarray
    delta_mix: float
    I_nu: float

    @property
    def coefficients(self) -> np.ndarray:
        """[X_eq, X_lin, X_Q...] in set order."""
        return np.concatenate([[self.X_eq, self.X_lin], self.X_q])

    def certificate(self, x):
        """F(x); nonnegative on (0,18] iff the dual datum is feasible."""
        xa = np.asarray(x, dtype=float)
        out = xa - self.lambda0 - self.nu.potential(xa) / self.X_lin
        for lam, q in zip(self.lambda_q, self.polys.polys):
            out = out - lam * np.log(np.abs(q(xa)))
        if np.ndim(x) == 0:
            return float(out)
        return out

    def numerator(self, x, k: int):
        """Combined density numerator of nu on the branch of interval k.

        d(nu) = numerator(x, k) dx / (pi sqrt|H(x)|) on interval k; the
        formula continues analytically a little past the interval ends,
        which is what the endpoint derivative checks differentiate.
        """
        xa = np.asarray(x, dtype=float)
        t = self.X_eq * np.abs(npoly.polyval(xa, self.eq.numer))
        t = t + self.X_lin * self.support.pattern(k) * npoly.polyval(xa, self.lin.numer)
        for xq, q, parts in zip(self.X_q, self.polys.polys, self.root_parts):
            s = 0.0
            for rp in parts:
                s = s + (np.abs(npoly.polyval(xa - rp.alpha, rp.numer))
                         * rp.sqrt_H_alpha / np.abs(xa - rp.alpha))
            t = t + (xq / q.degree) * s
        if np.ndim(x) == 0:
            return float(t)
        return t

    def boundary_numerators(self) -> np.ndarray:
        """Numerator of nu at each endpoint; all zeros is the endpoint
        optimality condition the outer descent drives toward."""
        e = self.support.as_array()
        return np.array([
            self.numerator(a, i // 2) for i, a in enumerate(e)
        ])

    def normalized_boundary(self) -> np.ndarray:
        """T(a_i) / |E(a_i)|: comparable across endpoints, since the raw
        numerators inherit the wildly different scales of E."""
        e = self.support.as_array()
        escale = np.abs(npoly.polyval(e, self.eq.numer))
        return self.boundary_numerators() / escale


def dual_solution(support: Support, polys: PolySet, n: int,
                  delta_mix: float = 2e-8) -> DualSolution:
    """Assemble nu and extract (lambda_0, lambda_Q) on a fixed support.

    delta_mix folds that much equilibrium measure into nu (a convex
    combination, coefficients renamed accordingly).  The raw optimum
    has boundary densities of either sign at the working precision;
    the mixed measure is strictly positive near the endpoints, which
    the certification step requires.  Pass 0 for the raw solution.
    """
    validate(support)
    if len(polys.polys):
        require_one_root_per_gap(support, polys)
    elif support.n_gaps:
        raise SingularW("gapped support needs polynomials to pin the gaps")

    eq = equilibrium(support, n)
    lin = linear_measure(support, n, eq)

    c = 1.0 / _weighted_area(support, polys, n)
    X_lin = np.pi * c
    X_q = np.array([
        _poly_coefficient(support, polys, c, q, polys.roots_of(q))
        for q in polys.polys
    ])

    mu_q, root_parts = [], []
    for q in polys.polys:
        m, parts = poly_measure(support, polys.roots_of(q), n)
        mu_q.append(m)
        root_parts.append(parts)

    X_eq = 1.0 - X_lin * lin.measure.mass() - float(np.sum(X_q))

    # mix, then rename: nu stays a probability measure because the raw
    # coefficients already summed to mass one
    X_eq = (1.0 - delta_mix) * X_eq + delta_mix
    X_lin = (1.0 - delta_mix) * X_lin
    X_q = (1.0 - delta_mix) * X_q

    nu = combine([eq.measure, lin.measure] + mu_q,
                 [X_eq, X_lin] + list(X_q))

    lambda_q = np.array([
        -xq / (X_lin * q.degree) for xq, q in zip(X_q, polys.polys)
    ])

    # lambda_0: the on-support constant of the potential identity
    vals = []
    for a, b in support.intervals:
        x = ChebGrid.build(a, b, N_COLLOC).x
        r = x - nu.potential(x) / X_lin
        for lam, q in zip(lambda_q, polys.polys):
            r = r - lam * np.log(np.abs(q(x)))
        vals.append(r)
    vals = np.concatenate(vals)
    lambda0 = float(np.mean(vals))
    lambda_dev = float(np.max(np.abs(vals - lambda0)))

    return DualSolution(support, polys, n, eq, lin, mu_q, root_parts,
                        c, X_eq, X_lin, X_q, nu, lambda0, lambda_dev,
                        lambda_q, delta_mix, nu.energy())


@dataclass
class PrimalSolution:
    b: np.ndarray           # mixture coefficients of the mu_Q
    weights: np.ndarray     # [1 - sum b, b...]: coefficients on mu_eq, mu_Q
    measure: Measure


def primal_solution(ds: DualSolution) -> PrimalSolution:
    """Mixture of mu_eq and the mu_Q making every log-moment vanish."""
    polys = ds.polys.polys
    k = len(polys)
    L_eq = np.array([
        ds.eq.measure.log_moment(q, ds.polys.roots_of(q)) for q in polys
    ])
    W = np.empty((k, k))
    for col, m in enumerate(ds.mu_q):
        for row, q in enumerate(polys):
            W[row, col] = m.log_moment(q, ds.polys.roots_of(q)) - L_eq[row]
    b = _full_pivot_solve(W, -L_eq)
    weights = np.concatenate([[1.0 - b.sum()], b])
    measure = combine([ds.eq.measure] + ds.mu_q, list(weights))
    return PrimalSolution(b, weights, measure)


def residual_vector(ds: DualSolution, ps: PrimalSolution) -> np.ndarray:
    """Ordered optimality residuals for the support descent:

        [ I(nu, mu_A),
          T(a_i) per endpoint (numerator of nu's density),
          int log|Q| d(mu_A) per Q,
          int log|Q| d(nu)  per Q,
          int x d(mu_A) - lambda_0 ]

    All vanish at the optimal support.
    """
    polys = ds.polys.polys
    cross = ds.nu.energy(ps.measure)
    boundary = ds.normalized_boundary()
    # an endpoint pinned to the hull edge only admits one-sided
    # variations, so its density need not vanish there
    for i, a in enumerate(ds.support.endpoints):
        if a <= 0.0 or a >= 18.0:
            boundary[i] = 0.0
    mu_logs = [ps.measure.log_moment(q, ds.polys.roots_of(q)) for q in polys]
    nu_logs = [ds.nu.log_moment(q, ds.polys.roots_of(q)) for q in polys]
    gap = ps.measure.expectation() - ds.lambda0
    return np.concatenate([[cross], boundary,
                           mu_logs, nu_logs, [gap]])


def weighted_residuals(support: Support, polys: PolySet, n: int,
                       weights: Optional[Sequence[float]] = None) -> np.ndarray:
    """residual_vector with each block scaled by sqrt of its weight.

    weights has one entry per residual block (5 blocks), default all 1.
    Uses the unmixed dual solution: the descent hunts the exact common
    zero, and mixing would bias the boundary block away from it.
    """
    ds = dual_solution(support, polys, n, delta_mix=0.0)
    ps = primal_solution(ds)
    r = residual_vector(ds, ps)
    if weights is None:
        weights = np.ones(5)
    w = np.asarray(weights, dtype=float)
    if w.shape != (5,):
        raise ValueError("weights must give one entry per residual block")
    k = len(polys.polys)
    blocks = [1, len(support.endpoints), k, k, 1]
    full = np.concatenate([np.full(b, wi) for b, wi in zip(blocks, w)])
    return np.sqrt(full) * r


def objective(support: Support, polys: PolySet, n: int,
              weights: Optional[Sequence[float]] = None) -> float:
    """Weighted sum of squared residuals; the outer merit function."""
    rho = weighted_residuals(support, polys, n, weights)
    return float(rho @ rho)
