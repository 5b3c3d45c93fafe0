"""Exact polynomial arithmetic against independent oracles.

Resultants and discriminants are checked against sympy and against
values computed from the defining product formulas by hand; root
isolation is checked against the quadratic formula and numpy.
"""

from fractions import Fraction

import numpy as np
import pytest

from tracebound.polyarith import (
    IntPoly,
    NonSquarefree,
    NotTotallyReal,
    PolySet,
    count_real_roots,
    discriminant,
    real_roots,
    resultant,
    root_bound,
)

sympy = pytest.importorskip("sympy")

X = IntPoly([0, 1])          # x
XM1 = IntPoly([-1, 1])       # x - 1
QUAD = IntPoly([1, -3, 1])   # x^2 - 3x + 1
CUBIC = IntPoly([-1, 6, -5, 1])  # x^3 - 5x^2 + 6x - 1


def to_sympy(p: IntPoly):
    x = sympy.Symbol("x")
    return sympy.Poly(list(reversed(p.coeffs)), x)


# ---------------------------------------------------------------------------
# pinned exact values
#
# Res(p, q) = lc(p)^deg q * prod_{p(a)=0} q(a).  For p = x the product is
# just q(0); for p = x - 1 it is q(1).  Discriminants from the classical
# degree-2 and degree-3 formulas.

def test_resultant_pinned_values():
    assert resultant(X, XM1) == -1
    assert resultant(X, QUAD) == 1        # QUAD(0) = 1
    assert resultant(XM1, QUAD) == -1     # QUAD(1) = -1
    assert resultant(X, CUBIC) == -1      # CUBIC(0) = -1
    assert resultant(XM1, CUBIC) == 1     # CUBIC(1) = 1


def test_resultant_quad_cubic_is_unit():
    r = resultant(QUAD, CUBIC)
    assert abs(r) == 1
    x = sympy.Symbol("x")
    assert r == sympy.resultant(to_sympy(QUAD).as_expr(), to_sympy(CUBIC).as_expr(), x)


def test_discriminant_pinned_values():
    # b^2 - 4ac and the textbook cubic formula give 5 and 49
    assert discriminant(QUAD) == 5
    assert discriminant(CUBIC) == 49
    assert discriminant(X) == 1
    assert discriminant(IntPoly([-1, 0, 1])) == 4   # x^2 - 1


def test_resultant_antisymmetry():
    # Res(p,q) = (-1)^{deg p deg q} Res(q,p)
    assert resultant(QUAD, CUBIC) == resultant(CUBIC, QUAD)
    assert resultant(X, QUAD) == resultant(QUAD, X)
    assert resultant(X, XM1) == -resultant(XM1, X)


def test_avg_trace():
    assert QUAD.avg_trace() == Fraction(3, 2)
    assert CUBIC.avg_trace() == Fraction(5, 3)
    assert X.avg_trace() == 0
    assert XM1.avg_trace() == 1


# ---------------------------------------------------------------------------
# root isolation

def test_real_roots_quadratic_formula():
    # oracle: (3 +- sqrt 5)/2
    lo = (3 - 5 ** 0.5) / 2
    hi = (3 + 5 ** 0.5) / 2
    got = real_roots(QUAD)
    assert len(got) == 2
    assert got[0] == pytest.approx(lo, abs=1e-13)
    assert got[1] == pytest.approx(hi, abs=1e-13)


def test_real_roots_cubic_vs_numpy():
    got = real_roots(CUBIC)
    want = sorted(np.roots([1, -5, 6, -1]).real)
    assert got == pytest.approx(want, abs=1e-12)


def test_count_real_roots():
    assert count_real_roots(QUAD, 0, 1) == 1
    assert count_real_roots(QUAD, 0, 3) == 2
    assert count_real_roots(QUAD, 1, 2) == 0
    assert count_real_roots(CUBIC, 0, 18) == 3
    # x^2 + 1 has no real roots at all
    assert count_real_roots(IntPoly([1, 0, 1]), -10, 10) == 0


def test_root_bound_contains_roots():
    b = root_bound(CUBIC)
    for r in real_roots(CUBIC):
        assert -b <= r <= b


def test_real_roots_rejects_repeated():
    with pytest.raises(NonSquarefree):
        real_roots(IntPoly([1, -2, 1]))  # (x-1)^2


# ---------------------------------------------------------------------------
# IntPoly basics

def test_eval_exact_and_float():
    assert CUBIC(Fraction(1, 2)) == Fraction(-1, 1) + Fraction(3, 1) - Fraction(5, 4) + Fraction(1, 8)
    assert CUBIC(0) == -1
    vals = CUBIC(np.array([0.0, 1.0]))
    assert vals == pytest.approx([-1.0, 1.0])


def test_derivative():
    assert CUBIC.derivative().coeffs == (6, -10, 3)
    assert X.derivative().coeffs == (1,)


def test_json_round_trip():
    p = IntPoly([-1, 6, -5, 1])
    q = IntPoly.from_json(p.to_json())
    assert q == p
    assert q.coeffs == p.coeffs


def test_str_readable():
    assert "x" in str(QUAD)


# ---------------------------------------------------------------------------
# PolySet membership rules

def test_polyset_accepts_standard_sets():
    s = PolySet([X, XM1, QUAD, CUBIC])
    assert s.total_degree() == 7
    roots = s.all_roots()
    assert len(roots) == 7
    assert roots == sorted(roots)


def test_polyset_rejects_constants():
    with pytest.raises(ValueError):
        PolySet([IntPoly([2])])


def test_polyset_rejects_duplicates():
    with pytest.raises(ValueError):
        PolySet([X, IntPoly([0, 1])])


def test_polyset_rejects_nonsquarefree():
    with pytest.raises(NonSquarefree):
        PolySet([IntPoly([1, -2, 1])])


def test_polyset_rejects_complex_roots():
    with pytest.raises(NotTotallyReal):
        PolySet([IntPoly([1, 0, 1])])   # x^2 + 1
    with pytest.raises(NotTotallyReal):
        PolySet([IntPoly([1, 1, 1, 1])])


def test_polyset_json_round_trip():
    s = PolySet([X, QUAD])
    t = PolySet.from_json(s.to_json())
    assert [p.coeffs for p in t.polys] == [p.coeffs for p in s.polys]


# ---------------------------------------------------------------------------
# randomized cross-checks against sympy

try:
    from hypothesis import given, settings, strategies as st

    HYP = True
except ImportError:  # pragma: no cover
    HYP = False


if HYP:
    small_poly = st.lists(
        st.integers(min_value=-9, max_value=9), min_size=2, max_size=5
    ).filter(lambda c: c[-1] != 0)

    @given(small_poly, small_poly)
    @settings(max_examples=60, deadline=None)
    def test_resultant_matches_sympy(ca, cb):
        p, q = IntPoly(ca), IntPoly(cb)
        x = sympy.Symbol("x")
        want = sympy.resultant(to_sympy(p).as_expr(), to_sympy(q).as_expr(), x)
        assert resultant(p, q) == want

    @given(small_poly)
    @settings(max_examples=40, deadline=None)
    def test_root_count_matches_sympy(ca):
        p = IntPoly(ca)
        if resultant(p, p.derivative()) == 0:
            return  # repeated roots: Sturm counter not applicable
        want = sympy.Poly(list(reversed(p.coeffs)), sympy.Symbol("x")).count_roots(-100, 100)
        assert count_real_roots(p, -100, 100) == want
