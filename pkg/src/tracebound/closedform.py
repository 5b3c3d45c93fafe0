"""Closed-form solutions for the empty set and the set {x}.

These are the two cases where the optimal support is a single interval
and everything can be written down:

  * A = {}: the support is [0, 4], the optimal measure is its arcsine
    (equilibrium) measure, and the bound is its first moment, exactly 2.
    This is the classical bound of Schur and Siegel.

  * A = {x}: after the substitutions xh = (a+b-2 sqrt(ab))/4 and
    yh = (a+b+2 sqrt(ab))/4 the optimality conditions collapse to two
    equations in (xh, yh),

        yh log yh = (yh - xh) log(yh - xh) + xh,
        log(xh) log(yh) = log(xh yh) log(yh - xh),

    and the bound is yh - yh log yh + xh - xh log xh.  This pins the
    interval Serre found by hand (numerically, in correspondence) to
    full double precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import Measure, combine, equilibrium, linear_measure
from .support import Support


@dataclass
class SchurSolution:
    lambda0: float          # exactly 2
    support: Support        # [0, 4]
    nu_hat: Measure         # potential x - 2 on the support
    mu: Measure             # arcsine measure, int x d(mu) = 2


def schur(n: int = 256) -> SchurSolution:
    """The A = {} optimum: interval [0, 4], bound exactly 2.

    nu_hat = 4 mu_eq + mu_lin has density (4 - x)/(pi sqrt(x(4-x)))
    and potential x - 2 on the support; its nonnegativity off [0, 4]
    is the dual certificate for the bound.
    """
    s = Support([0.0, 4.0])
    eq = equilibrium(s, n)
    lin = linear_measure(s, n, eq)
    nu_hat = combine([eq.measure, lin.measure], [4.0, 1.0])
    return SchurSolution(2.0, s, nu_hat, eq.measure)


class NewtonFailed(RuntimeError):
    pass


@dataclass
class SerreSolution:
    lambda0: float
    a: float
    b: float
    xh: float
    yh: float
    t: float                # U_mu = t log x on [a, b]
    residual: float
    iterations: int


def _serre_system(x: float, y: float):
    d = y - x
    f = np.array([
        y * np.log(y) - d * np.log(d) - x,
        np.log(x) * np.log(y) - np.log(x * y) * np.log(d),
    ])
    J = np.array([
        [np.log(d), np.log(y) - np.log(d)],
        [
            (np.log(y) - np.log(d)) / x + np.log(x * y) / d,
            (np.log(x) - np.log(d)) / y - np.log(x * y) / d,
        ],
    ])
    return f, J


def serre(tol: float = 1e-14, max_iters: int = 60) -> SerreSolution:
    """Solve the A = {x} system by damped Newton iteration.

    Starts from Serre's own interval (good to ~1e-10 already) so full
    steps are accepted immediately; the damping only guards the domain
    constraints 0 < x < y.
    """
    x, y = 0.8142283, 1.4349863
    f, J = _serre_system(x, y)
    it = 0
    while np.max(np.abs(f)) > tol:
        if it >= max_iters:
            raise NewtonFailed(f"no convergence after {max_iters} iterations")
        dx, dy = np.linalg.solve(J, -f)
        step = 1.0
        for _ in range(60):
            xn, yn = x + step * dx, y + step * dy
            if 0 < xn < yn:
                fn, Jn = _serre_system(xn, yn)
                if np.max(np.abs(fn)) < np.max(np.abs(f)):
                    break
            step /= 2
        else:
            raise NewtonFailed("line search stalled")
        x, y, f, J = xn, yn, fn, Jn
        it += 1
    lam = y - y * np.log(y) + x - x * np.log(x)
    root = 2.0 * np.sqrt(x * y)
    a, b = x + y - root, x + y + root
    t = np.log(x * y) / (2.0 * np.log(y))
    return SerreSolution(float(lam), float(a), float(b), float(x), float(y),
                         float(t), float(np.max(np.abs(f))), it)
