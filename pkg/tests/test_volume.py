import math

import pytest

from momentshape.polynomials import RealPoly
from momentshape.volume import check_vol_ratio, delta_threshold, find_admissible, mc_sublevel_volume


def alphas(p):
    return sorted({a.alpha for a in find_admissible(p)})


def test_admissible_examples():
    assert alphas(RealPoly(2, {(1, 0): 1.0})) == [(1, 0)]
    assert alphas(RealPoly(2, {(2, 0): 1, (0, 2): 1, (0, 0): -1})) == [(0, 2), (2, 0)]
    assert alphas(RealPoly(2, {(1, 1): 1.0})) == [(1, 1)]
    # (1, 1) is dominated by (2, 0) under x-first and by (0, 2) under y-first
    assert alphas(RealPoly(2, {(2, 0): 1, (1, 1): 1, (0, 2): 1})) == [(0, 2), (2, 0)]
    with pytest.raises(ValueError):
        find_admissible(RealPoly(2, {}))


def test_threshold():
    p = RealPoly(2, {(1, 1): 3.0})
    a = find_admissible(p)[0]
    assert delta_threshold(p, a) == 3.0 / 64


def test_affine_volume_exact():
    # vol{|x| < delta} in [-1, 1]**2 = 4 delta, ratio 2**n
    p = RealPoly(2, {(1, 0): 1.0})
    est = mc_sublevel_volume(p, 0.01, samples=400_000, seed=1)
    assert abs(est.estimate - 0.04) < 4 * est.stderr


def test_xy_volume_log_factor():
    # vol{|xy| < delta} = 4 delta (1 + ln(1/delta))
    p = RealPoly(2, {(1, 1): 1.0})
    d = 1e-3
    est = mc_sublevel_volume(p, d, samples=400_000, seed=2)
    assert abs(est.estimate - 4 * d * (1 + math.log(1 / d))) < 4 * est.stderr


def test_seeded_and_chunk_invariant():
    p = RealPoly(1, {(2,): 1.0})
    a = mc_sublevel_volume(p, 0.01, samples=300_000, seed=5)
    b = mc_sublevel_volume(p, 0.01, samples=300_000, seed=5)
    assert a == b


def test_ratio_table():
    p = RealPoly(1, {(1,): 1.0})
    tab = check_vol_ratio(p, find_admissible(p)[0], [1e-2, 1e-3], samples=200_000)
    assert tab.bounded
    assert [r.delta for r in tab.rows] == [1e-2, 1e-3]
    with pytest.raises(ValueError):
        check_vol_ratio(p, find_admissible(p)[0], [0.5])


def test_volume_errors():
    with pytest.raises(ValueError):
        mc_sublevel_volume(RealPoly(1, {(1,): 1.0}), 0.0)
