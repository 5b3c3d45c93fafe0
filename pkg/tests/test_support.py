import json

import numpy as np
import pytest

from tracebound.polyarith import IntPoly, PolySet
from tracebound.support import (
    EmptyGap,
    GapRootMap,
    H_eval,
    MultiRootGapWithoutP,
    OverlappingIntervals,
    Support,
    SupportError,
    map_gap_roots,
    require_one_root_per_gap,
    rest_abs,
    validate,
)


def test_H_eval_two_intervals():
    # Sigma = [0,1] u [2,3]: H(2.5) = 2.5 * 1.5 * 0.5 * (-0.5)
    s = Support([0, 1, 2, 3])
    val, sign = H_eval(s, 2.5)
    assert val == pytest.approx(-0.9375)
    assert sign == -1


def test_H_eval_signs():
    s = Support([0, 1, 2, 3])
    # inside either interval: negative
    assert H_eval(s, 0.5)[1] == -1
    assert H_eval(s, 2.9)[1] == -1
    # in the gap and outside: positive
    assert H_eval(s, 1.5)[1] == 1
    assert H_eval(s, -1.0)[1] == 1
    assert H_eval(s, 4.0)[1] == 1
    # at a root the value vanishes and the sign ties to +1
    val, sign = H_eval(s, 1.0)
    assert val == 0.0
    assert sign == 1


def test_H_eval_vectorized():
    s = Support([0, 1, 2, 3])
    x = np.array([0.5, 1.5, 2.5])
    val, sign = H_eval(s, x)
    assert val[2] == pytest.approx(-0.9375)
    assert list(sign) == [-1, 1, -1]


def test_rest_abs_strips_own_factors():
    s = Support([0, 1, 2, 3])
    # on interval 1 at x=2.5: |x(x-1)| = 3.75
    assert rest_abs(s, 1, 2.5) == pytest.approx(3.75)
    # smooth through the interval's own endpoints
    assert rest_abs(s, 1, 2.0) == pytest.approx(2.0)
    val, _ = H_eval(s, 2.5)
    assert abs(val) == pytest.approx(rest_abs(s, 1, 2.5) * abs((2.5 - 2) * (2.5 - 3)))


def test_pattern_alternates():
    s = Support([0.1, 1, 2, 3, 4, 5])
    # rightmost interval positive, alternating leftwards
    assert [s.pattern(k) for k in range(3)] == [1, -1, 1]
    t = Support([0.1, 4])
    assert t.pattern(0) == 1


def test_intervals_and_gaps():
    s = Support([0.1, 1, 2, 3, 4, 5])
    assert s.n_intervals == 3
    assert s.n_gaps == 2
    assert s.intervals == [(0.1, 1), (2, 3), (4, 5)]
    assert s.gaps == [(1, 2), (3, 4)]
    assert s.contains(2.5)
    assert not s.contains(1.5)
    assert s.interval_of(4.2) == 2
    with pytest.raises(SupportError):
        s.interval_of(1.5)


def test_validate_accepts_good_support():
    validate(Support([0.07, 0.72, 1.34, 4.69]))
    validate(Support([0.0, 4.0]))   # closed-form configuration sits at 0


def test_validate_rejects_bad_shapes():
    with pytest.raises(SupportError):
        validate(Support([1, 2, 3]))          # odd count
    with pytest.raises(SupportError):
        validate(Support([-0.1, 4.0]))        # negative endpoint
    with pytest.raises(SupportError):
        validate(Support([1.0, 19.0]))        # beyond the cap
    with pytest.raises(OverlappingIntervals):
        validate(Support([0.1, 1.0, 0.9, 2.0]))
    with pytest.raises(OverlappingIntervals):
        validate(Support([0.1, 1.0, 1.0 + 1e-9, 2.0]))


def test_json_round_trip_16_digits():
    s = Support([0.0706597128759717, 0.7191192204214787, 1.337668148298108, 4.687953934364709])
    blob = s.dumps()
    t = Support.from_json(blob)
    assert t.endpoints == s.endpoints
    data = json.loads(blob)
    assert all(isinstance(e, str) for e in data["endpoints"])


def test_gap_root_map_pair():
    # roots of x and x-1 with Sigma = [0.07, 0.72] u [1.34, 4.69]:
    # 0 sits below, 1 sits in the single gap
    polys = PolySet([IntPoly([0, 1]), IntPoly([-1, 1])])
    s = Support([0.07, 0.72, 1.34, 4.69])
    m = map_gap_roots(s, polys)
    assert m.below == (0.0,)
    assert m.above == ()
    assert m.gap_roots == ((1.0,),)
    assert m.one_root_per_gap
    assert isinstance(m, GapRootMap)
    require_one_root_per_gap(s, polys)


def test_gap_root_map_rejects_root_inside():
    polys = PolySet([IntPoly([-1, 1])])  # root at 1
    s = Support([0.5, 2.0])
    with pytest.raises(SupportError):
        map_gap_roots(s, polys)


def test_empty_gap_raises():
    polys = PolySet([IntPoly([0, 1])])   # only root is 0
    s = Support([0.5, 1.0, 2.0, 3.0])    # gap (1,2) holds nothing
    with pytest.raises(EmptyGap):
        require_one_root_per_gap(s, polys)


def test_crowded_gap_raises():
    # x^2 - 3x + 1 has roots 0.382 and 2.618; squeeze both into one gap
    polys = PolySet([IntPoly([1, -3, 1])])
    s = Support([0.1, 0.3, 2.7, 3.0])
    with pytest.raises(MultiRootGapWithoutP):
        require_one_root_per_gap(s, polys)
