"""Quadrature and kernel checks.

Oracles: scipy.integrate.quad with explicit endpoint hints for the
ordinary integrals, symmetric-excision quad for principal values, and
central differences of the Cauchy kernel for the second-moment kernel.
"""

import numpy as np
import pytest

from tracebound.quadrature import (
    ChebGrid,
    TooCloseToNode,
    cauchy_kernel,
    cheb_coeffs,
    grids,
    integrate,
    log_kernel,
    moment2_kernel,
)
from tracebound.support import Support

scipy = pytest.importorskip("scipy")
from scipy.integrate import quad  # noqa: E402


def semicircle_grid(n=64):
    """density sqrt(4-x) / (pi sqrt x) on [0,4]: f = (4-x)/pi."""
    g = ChebGrid.build(0, 4, n)
    return g, (4 - g.x) / np.pi


def pv_excision(dens, a, b, s, eps=1e-7):
    left = quad(lambda y: dens(y) / (s - y), a, s - eps, points=[a], limit=200)[0]
    right = quad(lambda y: dens(y) / (s - y), s + eps, b, points=[b], limit=200)[0]
    return left + right


def test_mass_of_semicircle_like_density():
    # int_0^4 sqrt(4-x)/(pi sqrt x) dx = 2 (oracle: quad gives 2.0000000000)
    g, f = semicircle_grid()
    assert integrate(g, f) == pytest.approx(2.0, abs=1e-13)


def test_integrate_against_quad_with_weight():
    g, f = semicircle_grid()
    want = quad(
        lambda y: y * y * np.sqrt(4 - y) / (np.pi * np.sqrt(y)), 0, 4, points=[0, 4]
    )[0]
    # quad itself only delivers ~1e-9 here; the rule is exact for polynomials
    assert integrate(g, f, g.x**2) == pytest.approx(want, abs=1e-8)


def test_cheb_coeffs_reconstruct():
    g = ChebGrid.build(-2, 5, 32)
    f = np.exp(-g.x) + g.x**3
    c = cheb_coeffs(f)
    recon = c[0] / 2 + np.cos(np.outer(g.theta, np.arange(1, 32))) @ c[1:]
    assert recon == pytest.approx(f, abs=1e-10)


def test_log_kernel_arcsine_constant_on_cut():
    # equilibrium measure of [-1,1]: U = -log 2 everywhere on the cut
    g = ChebGrid.build(-1, 1, 64)
    f = np.full(64, 1 / np.pi)
    c = cheb_coeffs(f)
    s = np.linspace(-0.99, 0.99, 17)
    assert log_kernel(g, c, s) == pytest.approx(np.full(17, -np.log(2)), abs=1e-14)


def test_log_kernel_off_cut_vs_quad():
    g, f = semicircle_grid()
    c = cheb_coeffs(f)
    for s in (6.0, -1.5, 4.25):
        want = quad(
            lambda y: np.log(abs(s - y)) * np.sqrt(4 - y) / (np.pi * np.sqrt(y)),
            0, 4, points=[0, 4],
        )[0]
        assert log_kernel(g, c, s) == pytest.approx(want, abs=1e-11)


def test_log_kernel_on_cut_vs_quad():
    g, f = semicircle_grid()
    c = cheb_coeffs(f)
    dens = lambda y: np.sqrt(4 - y) / (np.pi * np.sqrt(y))
    for s in (0.3, 1.7, 3.9):
        want = (
            quad(lambda y: np.log(abs(s - y)) * dens(y), 0, s, points=[0])[0]
            + quad(lambda y: np.log(abs(s - y)) * dens(y), s, 4, points=[4])[0]
        )
        assert log_kernel(g, c, s) == pytest.approx(want, abs=1e-10)


def test_log_kernel_continuous_at_endpoints():
    g, f = semicircle_grid()
    c = cheb_coeffs(f)
    # U has a sqrt cusp at an endpoint where f does not vanish, so the
    # two sides only agree to O(sqrt(eps))
    for e in (0.0, 4.0):
        lo = log_kernel(g, c, e - 1e-9)
        hi = log_kernel(g, c, e + 1e-9)
        assert lo == pytest.approx(hi, abs=1e-3)


def test_log_kernel_far_field():
    g, f = semicircle_grid()
    c = cheb_coeffs(f)
    s = 1e8
    assert log_kernel(g, c, s) == pytest.approx(2.0 * np.log(s), rel=1e-9)


def test_log_kernel_doubling():
    g1, f1 = semicircle_grid(48)
    g2, f2 = semicircle_grid(96)
    s = np.array([0.5, 2.2, 5.0, -0.7])
    u1 = log_kernel(g1, cheb_coeffs(f1), s)
    u2 = log_kernel(g2, cheb_coeffs(f2), s)
    assert u1 == pytest.approx(u2, abs=1e-12)


def test_cauchy_arcsine_vanishes_on_cut():
    g = ChebGrid.build(-1, 1, 64)
    c = cheb_coeffs(np.full(64, 1 / np.pi))
    s = np.linspace(-0.9, 0.9, 13)
    assert cauchy_kernel(g, c, s) == pytest.approx(np.zeros(13), abs=1e-13)


def test_cauchy_pv_airfoil_identity():
    # PV int sqrt(4-y)/(pi sqrt y (s-y)) dy = 1 on (0,4)
    g, f = semicircle_grid()
    c = cheb_coeffs(f)
    s = np.array([0.4, 1.3, 2.0, 3.6])
    assert cauchy_kernel(g, c, s) == pytest.approx(np.ones(4), abs=1e-12)


def test_cauchy_pv_vs_excision_oracle():
    g = ChebGrid.build(0, 4, 96)
    f = np.exp(-g.x / 3) / np.pi          # generic smooth f
    c = cheb_coeffs(f)
    dens = lambda y: np.exp(-y / 3) / (np.pi * np.sqrt(y * (4 - y)))
    for s in (0.8, 2.5):
        want = pv_excision(dens, 0, 4, s)
        assert cauchy_kernel(g, c, s) == pytest.approx(want, abs=1e-6)


def test_cauchy_off_cut_vs_quad():
    g, f = semicircle_grid()
    c = cheb_coeffs(f)
    dens = lambda y: np.sqrt(4 - y) / (np.pi * np.sqrt(y))
    for s in (6.0, -2.0):
        want = quad(lambda y: dens(y) / (s - y), 0, 4, points=[0, 4])[0]
        assert cauchy_kernel(g, c, s) == pytest.approx(want, abs=1e-12)


def test_cauchy_endpoint_limit_finite():
    g, f = semicircle_grid()
    c = cheb_coeffs(f)
    v0 = cauchy_kernel(g, c, 0.0)
    v4 = cauchy_kernel(g, c, 4.0)
    assert np.isfinite(v0) and np.isfinite(v4)
    # airfoil identity extends continuously to the endpoints
    assert v0 == pytest.approx(1.0, abs=1e-9)
    assert v4 == pytest.approx(1.0, abs=1e-9)


def test_moment2_matches_cauchy_derivative():
    g, f = semicircle_grid()
    c = cheb_coeffs(f)
    for s in (5.0, -1.0, 1e4):
        h = 1e-6 * max(1.0, abs(s))
        fd = (cauchy_kernel(g, c, s + h) - cauchy_kernel(g, c, s - h)) / (2 * h)
        assert moment2_kernel(g, c, s) == pytest.approx(-fd, rel=1e-7)


def test_moment2_vs_quad():
    g, f = semicircle_grid()
    c = cheb_coeffs(f)
    dens = lambda y: np.sqrt(4 - y) / (np.pi * np.sqrt(y))
    want = quad(lambda y: dens(y) / (6.0 - y) ** 2, 0, 4, points=[0, 4])[0]
    assert moment2_kernel(g, c, 6.0) == pytest.approx(want, abs=1e-12)


def test_moment2_refuses_points_on_cut():
    g, f = semicircle_grid()
    c = cheb_coeffs(f)
    with pytest.raises(TooCloseToNode):
        moment2_kernel(g, c, 2.0)
    with pytest.raises(TooCloseToNode):
        moment2_kernel(g, c, 4.0 + 1e-15)


def test_grids_cover_support():
    s = Support([0.1, 1.0, 2.0, 3.0])
    gs = grids(s, 16)
    assert len(gs) == 2
    assert gs[0].a == 0.1 and gs[1].b == 3.0
    assert all(np.all((g.x > g.a) & (g.x < g.b)) for g in gs)
    # nodes listed right-to-left (theta increasing)
    assert np.all(np.diff(gs[0].x) < 0)


try:
    from hypothesis import given, settings, strategies as st

    HYP = True
except ImportError:  # pragma: no cover
    HYP = False


if HYP:

    @given(
        st.floats(min_value=-5, max_value=5),
        st.floats(min_value=0.1, max_value=6),
        st.integers(min_value=0, max_value=5),
    )
    @settings(max_examples=30, deadline=None)
    def test_monomial_moments_match_quad(a, width, k):
        b = a + width
        g = ChebGrid.build(a, b, 48)
        f = np.ones(48)
        want = quad(
            lambda y: y**k / np.sqrt((y - a) * (b - y)), a, b, points=[a, b]
        )[0]
        assert integrate(g, f, g.x**k) == pytest.approx(want, rel=1e-7, abs=1e-7)

    @given(st.floats(min_value=-0.95, max_value=0.95))
    @settings(max_examples=20, deadline=None)
    def test_log_kernel_branches_agree_near_cut(w):
        # a point just off the cut sees almost the on-cut value
        g, f = semicircle_grid()
        c = cheb_coeffs(f)
        s = g.mid + w * g.rad
        assert log_kernel(g, c, s) == pytest.approx(
            log_kernel(g, c, s + 1e-13), abs=1e-5
        )
