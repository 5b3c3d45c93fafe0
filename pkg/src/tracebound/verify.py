"""Certification of computed trace bounds.

A converged support gives a primal measure mu_A and a dual certificate
(lambda_0, lambda_Q, nu).  Round-off keeps either side from being
exactly feasible, so the raw value lambda_0 is not yet a bound.  This
module degrades both sides just enough to survive the numerical slack:

  * lower bound: lambda_0 - delta log 18, where delta bounds the ratio
    d(nu_hat)/d(mu_eq) at every endpoint and nu_hat = nu / X_lin is
    the measure appearing in the certificate identity.  The degraded
    certificate stays nonnegative on all of [0, 18] provided the
    boundary ratios stay below delta, the certificate is convex across
    each gap, and its slope at each endpoint points into the support;
    those are exactly the checks run here.

  * upper bound: the expectation of mu_tilde, the primal measure with
    a small multiple of the equilibrium measure mixed in.  The mix
    restores strict feasibility (nonnegative log-moments, potential
    dominating sum b_Q log|Q|), which is rechecked directly.

Everything is floating point: the bracket is "numerically certified",
not proven.  Interval arithmetic is out of scope.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from numpy.polynomial import polynomial as npoly

from .primal_dual import DualSolution, PrimalSolution
from .quadrature import ChebGrid
from .support import Support, map_gap_roots

LOG18 = float(np.log(18.0))

DELTA_FD_STEP = 1e-6        # endpoint derivative stencil, relative
GAP_SAMPLES = 64            # per gap sub-segment
SPOT_POINTS = 256           # primal feasibility spot checks
SCAN_POINTS = 1024          # global certificate scan
SCAN_FLOOR = -1e-9          # certificate may dip this far before failing
EPS_MIX = 6e-8              # equilibrium fraction mixed into mu_tilde
GUARD_FRAC = 1e-2           # collar width next to an endpoint, relative
                            # to the adjacent support interval


class ChecksFailed(RuntimeError):
    """Certification checks failed; .failures lists the predicates,
    .bounds carries the partial result (lower marked unverified)."""

    def __init__(self, failures: List[str], bounds: "CertifiedBounds"):
        super().__init__("; ".join(failures))
        self.failures = failures
        self.bounds = bounds


def delta_ratios(ds: DualSolution) -> np.ndarray:
    """Limit of d(nu_hat)/d(mu_eq) at each endpoint.

    Both densities carry the same 1/sqrt|H| singularity, so the limit
    is the ratio of their numerators; the equilibrium numerator never
    vanishes at an endpoint.
    """
    return ds.normalized_boundary() / ds.X_lin


@dataclass(frozen=True)
class EndpointCheck:
    endpoint: float
    side: str               # "left" | "right"
    slope: float            # d/dx of nu's density numerator
    reference: float        # d/dx of |P_eq|
    passed: bool


@dataclass
class EndpointChecks:
    density_ok: bool
    min_density: float
    checks: List[EndpointCheck]

    @property
    def all_pass(self) -> bool:
        return self.density_ok and all(c.passed for c in self.checks)


def _fd_scale(ds: DualSolution, i: int) -> float:
    """Stencil width at endpoint i: small relative to the endpoint but
    kept well clear of every neighboring endpoint and polynomial root,
    where the numerator loses smoothness."""
    e = ds.support.endpoints
    a = e[i]
    dist = min(abs(a - o) for j, o in enumerate(e) if j != i)
    for r in ds.polys.all_roots():
        dist = min(dist, abs(a - r))
    return min(DELTA_FD_STEP * max(1.0, abs(a)), dist / 8.0)


def endpoint_derivative_checks(ds: DualSolution) -> EndpointChecks:
    """Slope comparison at every endpoint, after a density positivity
    precheck (a negative density anywhere fails without comparing).

    At a left endpoint nu's density numerator must grow at least as
    fast as |P_eq|, at a right endpoint at most as fast: together with
    gap convexity this pins the degraded certificate above zero on
    the gap sides adjacent to the support.
    """
    sup = ds.support
    interior = []
    for k, (a, b) in enumerate(sup.intervals):
        xs = ChebGrid.build(a, b, 64).x
        interior.append(np.min(ds.numerator(xs, k)) / ds.X_lin)
    boundary = ds.normalized_boundary() * np.abs(
        npoly.polyval(sup.as_array(), ds.eq.numer)) / ds.X_lin
    min_density = float(min(np.min(interior), np.min(boundary)))
    # a zero right at an endpoint is a soft edge, still a measure
    density_ok = min_density >= -1e-11
    if not density_ok:
        return EndpointChecks(False, min_density, [])

    eq_deriv = npoly.polyder(ds.eq.numer)
    checks = []
    for i, a in enumerate(sup.endpoints):
        k = i // 2
        h = _fd_scale(ds, i)
        lhs = float((ds.numerator(a + h, k) - ds.numerator(a - h, k))
                    / (2 * h))
        sgn = np.sign(npoly.polyval(a, ds.eq.numer)) or 1.0
        rhs = float(sgn * npoly.polyval(a, eq_deriv))
        tol = 1e-7 * max(1.0, abs(lhs), abs(rhs))
        if i % 2 == 0:
            side, passed = "left", lhs >= rhs - tol
            if i == 0 and a <= 0.0:
                passed = True   # no complement below 0 to protect
        else:
            side, passed = "right", lhs <= rhs + tol
            if i == len(sup.endpoints) - 1 and a >= 18.0:
                passed = True   # support reaches the hull's right edge
        checks.append(EndpointCheck(a, side, lhs, rhs, passed))
    return EndpointChecks(True, min_density, checks)


@dataclass
class GapChecks:
    minima: List[float]     # min of the convexity expression per gap

    @property
    def all_pass(self) -> bool:
        return all(v > 0.0 for v in self.minima)


def gap_convexity(ds: DualSolution, samples: int = GAP_SAMPLES) -> GapChecks:
    """Second derivative of the degraded certificate across each gap.

    On the segment between a gap endpoint and the gap's root the
    expression is sum_Q sum_alpha lambda_Q/(x-alpha)^2 plus the second
    moment of nu_hat - delta_i mu_eq, with delta_i taken at the
    endpoint whose side the segment touches.  Positivity everywhere,
    a soft-edge start, and one sign change at the root force the
    certificate to stay nonnegative on the gap.
    """
    sup = ds.support
    if sup.n_gaps == 0:
        return GapChecks([])
    gm = map_gap_roots(sup, ds.polys)
    deltas = delta_ratios(ds)
    minima = []
    for j, (lo, hi) in enumerate(sup.gaps):
        root = gm.gap_roots[j][0]
        worst = np.inf
        for seg_a, seg_b, di in ((lo, root, deltas[2 * j + 1]),
                                 (root, hi, deltas[2 * j + 2])):
            xs = seg_a + (np.arange(samples) + 0.5) / samples * (seg_b - seg_a)
            for x in xs:
                val = 0.0
                for lam, rts in zip(ds.lambda_q, ds.polys.roots()):
                    for al in rts:
                        val += lam / (x - al) ** 2
                val += ds.nu.moment2(x) / ds.X_lin - di * ds.eq.measure.moment2(x)
                worst = min(worst, val)
        minima.append(float(worst))
    return GapChecks(minima)


@dataclass
class CertifiedBounds:
    lower: Optional[float]
    upper: float
    lambda0: float
    delta: float
    delta_i: np.ndarray
    endpoint_checks: EndpointChecks
    gap_checks: GapChecks
    feasibility: Dict[str, object]
    failures: List[str] = field(default_factory=list)
    label: str = "numerically certified"

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "lower": self.lower,
            "upper": self.upper,
            "lambda0": f"{self.lambda0:.17g}",
            "delta": self.delta,
            "delta_i": list(map(float, self.delta_i)),
            "endpoint_checks": {
                "density_ok": self.endpoint_checks.density_ok,
                "min_density": self.endpoint_checks.min_density,
                "comparisons": [
                    {"endpoint": c.endpoint, "side": c.side,
                     "slope": c.slope, "reference": c.reference,
                     "passed": c.passed}
                    for c in self.endpoint_checks.checks
                ],
            },
            "gap_convexity_minima": self.gap_checks.minima,
            "feasibility": self.feasibility,
            "failures": self.failures,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def _complement_points(support: Support, total: int,
                       lo: float = 0.0, hi: float = 18.0) -> np.ndarray:
    """Roughly length-proportional sample of [lo, hi] minus the support.

    A collar next to each support endpoint is left out: there the
    series expansion of the off-support potential converges too slowly
    to trust, and the collar is exactly the neighborhood certified by
    the endpoint slope comparisons and the gap convexity instead.  Its
    width scales with the adjacent support interval, matching how the
    expansion's accuracy degrades.
    """
    e = support.endpoints
    lengths = [b - a for a, b in support.intervals]

    def guard(x: float) -> float:
        for i, a in enumerate(e):
            if a == x:
                return GUARD_FRAC * lengths[i // 2]
        return 1e-9 * max(1.0, abs(x))

    regions = [(lo, e[0])] + list(support.gaps) + [(e[-1], hi)]
    trimmed = []
    for a, b in regions:
        pa, pb = guard(a), guard(b)
        if b - a > 2 * (pa + pb):
            trimmed.append((a + pa, b - pb))
    length = sum(b - a for a, b in trimmed)
    pts = []
    for a, b in trimmed:
        m = max(3, int(round(total * (b - a) / length)))
        pts.append(np.linspace(a, b, m))
    return np.concatenate(pts)


def certify(primal: PrimalSolution, dual: DualSolution,
            eps_mix: float = EPS_MIX, samples: int = GAP_SAMPLES) -> CertifiedBounds:
    """Assemble the certified bracket; raises ChecksFailed when any
    predicate fails, with the partial bounds attached (lower dropped,
    the upper bound only keeps its own feasibility flags)."""
    sup, polys = dual.support, dual.polys
    failures: List[str] = []

    # structure: one root per gap, nothing outside the hull except 0
    gm = map_gap_roots(sup, polys) if polys.polys else None
    if gm is not None:
        if not gm.one_root_per_gap:
            failures.append("a gap holds more than one root")
        stray = [a for a in gm.below if abs(a) > 1e-12] + list(gm.above)
        if stray:
            failures.append(f"roots outside the support hull: {stray}")
    if not all(lam >= 0 for lam in dual.lambda_q):
        failures.append("negative lambda_Q")
    if dual.lambda0 <= 0:
        failures.append("lambda_0 not positive")

    d_i = delta_ratios(dual)
    if np.any(d_i < 0):
        failures.append("negative boundary density ratio")
    # an endpoint sitting on the hull boundary has no off-support region
    # next to it, so its ratio never enters the lower-bound correction
    e = sup.endpoints
    counted = [r for a, r in zip(e, d_i) if 0.0 < a < 18.0]
    delta = float(np.max(counted)) if counted else 0.0

    ep = endpoint_derivative_checks(dual)
    if not ep.density_ok:
        failures.append("nu density negative somewhere")
    elif not ep.all_pass:
        bad = [c.endpoint for c in ep.checks if not c.passed]
        failures.append(f"endpoint derivative comparison failed at {bad}")

    gaps = gap_convexity(dual, samples)
    if not gaps.all_pass:
        failures.append("gap convexity expression not positive")

    xs = _complement_points(sup, SCAN_POINTS)
    fmin = float(np.min(dual.certificate(xs)))
    if fmin <= SCAN_FLOOR:
        failures.append(f"certificate dips to {fmin:.3e} off the support")

    # upper bound from the re-feasibilized primal measure
    from .measures import combine  # local import keeps module load light
    mu_t = combine([dual.eq.measure, primal.measure], [eps_mix, 1.0 - eps_mix])
    upper = mu_t.expectation()
    logs = [mu_t.log_moment(q, polys.roots_of(q)) for q in polys.polys]
    spots = _complement_points(sup, SPOT_POINTS)
    pot = mu_t.potential(spots)
    dom = np.zeros_like(spots)
    for bq, q in zip(primal.b, polys.polys):
        dom += (bq / q.degree) * np.log(np.abs(q(spots)))
    margin = float(np.min(pot - dom))
    # on the support the same margin is a constant; a negative value
    # there breaks feasibility outright, and no amount of off-support
    # scanning sees it.  Recover it from integrals: integrating the
    # margin against mu_tilde gives I(mu_tilde) minus the log-moment
    # correction, all quantities already at hand.
    b_t = (1.0 - eps_mix) * primal.b
    on_support = float(mu_t.energy()
                       - sum(bq / q.degree * lg
                             for bq, q, lg in zip(b_t, polys.polys, logs)))
    feas = {
        "eps_mix": eps_mix,
        "mu_tilde_log_moments": [float(v) for v in logs],
        "min_potential_margin": margin,
        "on_support_margin": on_support,
        "min_certificate": fmin,
        "I_mu_tilde": mu_t.energy(),
    }
    if any(v < 0 for v in logs):
        failures.append("mu_tilde log-moment negative")
    if margin <= 0:
        failures.append("mu_tilde potential fails to dominate")
    if on_support < -1e-6:
        failures.append("mu_tilde potential fails to dominate on the support")

    lower = dual.lambda0 - delta * LOG18 if not failures else None
    bounds = CertifiedBounds(lower, upper, dual.lambda0, delta, d_i,
                             ep, gaps, feas, failures)
    if failures:
        raise ChecksFailed(failures, bounds)
    return bounds
