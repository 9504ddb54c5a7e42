import math
import threading

import numpy as np
import pytest

from momentshape.domains import ConformalImage, Disk, Perturbation, disk_moments, sample_shade
from momentshape.polynomials import RealPoly
from momentshape.stability import (
    C3,
    FAMILIES,
    HolderConfig,
    bidegree,
    check_bgap_bound,
    check_diagonal_bound,
    closed_form_family,
    family_shades,
    fenchel_check,
    lambda_f,
    random_exterior_points,
    random_shade_pair,
    rational_gap_experiment,
    run_holder_experiment,
    run_jobs,
    two_domains_experiment,
)


def test_lambda_constant():
    assert abs(lambda_f(np.full(100, 3.0), 0.37, 0.02) - 3.0 * 0.37) < 1e-12


def test_lambda_abs_x():
    # fill |x| < 1/2: int |x| = 1/4
    n = 1000
    x = -1 + (np.arange(n) + 0.5) * 2 / n
    assert abs(lambda_f(np.abs(x), 1.0, 2 / n) - 0.25) < 1e-12
    # eps = total volume forces g = 1
    assert abs(lambda_f(np.abs(x), 2.0, 2 / n) - 1.0) < 1e-12


def test_lambda_errors():
    with pytest.raises(ValueError):
        lambda_f(np.ones(10), 2.0, 0.1)
    with pytest.raises(ValueError):
        lambda_f(-np.ones(10), 0.5, 0.1)


def test_fenchel_linear():
    r = fenchel_check(RealPoly(1, {(1,): 1.0}), [0.01, 0.5, 2.0], [0.0, 1e-3, 1e-2, 3e-2])
    assert r.holds
    assert abs(r.tail[2] - 1e-4) < 1e-12  # int (s - |x|)_+ = s**2
    assert abs(r.slope - 2.0) < 0.05 and r.expected_slope == 2.0
    assert all(abs(row[0]) < 1e-15 for row in r.dual)  # s = 0 gives 0


def test_fenchel_2d_inequality():
    r = fenchel_check(RealPoly(2, {(1, 1): 1.0}), [0.01, 0.5, 4.0], [1e-3, 1e-2, 0.1], N=256)
    assert r.holds
    assert r.slope >= r.expected_slope - 0.05


@pytest.mark.parametrize("shape", ["orthant", "disk-complement"])
@pytest.mark.parametrize("family", FAMILIES)
def test_closed_forms_match_grid(shape, family):
    eps = 0.1
    l1, gap = closed_form_family(shape, family, eps)
    chi, g = family_shades(shape, family, eps, 1000)  # square edges fall on cell edges
    z = chi.centers()
    p = (z.real * z.imag) if shape == "orthant" else (np.abs(z) ** 2 - 0.25)
    grid_gap = float(np.sum(p * (chi.values - g.values)) * chi.cell_area)
    assert abs(np.sum(np.abs(chi.values - g.values)) * chi.cell_area - l1) < 0.03 * l1
    assert abs(grid_gap - gap) < 0.05 * gap


def test_zero_perturbation():
    assert closed_form_family("orthant", "dilation", 0.0) == (0.0, 0.0)


@pytest.mark.parametrize("shape", ["orthant", "disk-complement"])
@pytest.mark.parametrize("family", FAMILIES)
def test_holder_bounded(shape, family):
    ex = run_holder_experiment(HolderConfig(shape, family, eps_grid=tuple(np.geomspace(0.1, 1e-3, 7))))
    assert ex.bounded and ex.max_ratio > 0
    assert all(r.l1 >= 0 and r.gap >= 0 and r.ratio >= 0 for r in ex.records)
    assert ex.alpha.order == 2


def test_holder_gap_slope_smooth_boundary():
    # annulus: gap ~ l1**2
    ex = run_holder_experiment(HolderConfig("disk-complement", "level_shift", eps_grid=(1e-2, 1e-3)))
    assert abs(ex.gap_slope - 2.0) < 1e-6


def test_holder_ball_exclusion():
    ex = run_holder_experiment(HolderConfig("orthant", "level_shift", eps_grid=(0.1, 1e-2, 1e-3)))
    assert not ex.records[0].in_ball and ex.notes


def test_holder_config_validation():
    with pytest.raises(ValueError):
        HolderConfig(eps_grid=(1e-3, 1e-2))
    with pytest.raises(ValueError):
        HolderConfig(shape="cube")


def test_C3():
    assert abs(C3(2.0) - 2 / math.pi * math.exp(4 / math.pi)) < 1e-14
    assert abs(C3(2.0) - 2.2743) < 1e-4
    with pytest.raises(ValueError):
        C3(1.0)


def test_diagonal_bound_concentric_disks():
    bbox = (-1, 1, -1, 1)
    f, g = sample_shade(Disk(0, 0.4), 512, bbox), sample_shade(Disk(0, 0.5), 512, bbox)
    rec = check_diagonal_bound(f, g, [2.0])
    assert abs(rec.left[0] - 0.0225) < 1e-3
    assert abs(rec.right[0] - 0.08) < 1e-3
    assert rec.violations == 0
    same = check_diagonal_bound(f, f, [2.0])
    assert same.left[0] == 0


def test_diagonal_bound_rejects_close_points():
    f, g = random_shade_pair(0)
    with pytest.raises(ValueError):
        check_diagonal_bound(f, g, [0.0])


@pytest.mark.parametrize("seed", range(5))
def test_diagonal_bound_random(seed):
    f, g = random_shade_pair(seed)
    rec = check_diagonal_bound(f, g, random_exterior_points(seed + 100, 50))
    assert rec.violations == 0


def test_bgap_disks():
    bf, bg = disk_moments(0, 0.4, 4), disk_moments(0, 0.5, 4)
    rec = check_bgap_bound(bf, bg, 2.0, 4, l1=math.pi * 0.09)
    assert rec.violations == 0 and np.all(rec.margin > 0)
    same = check_bgap_bound(bf, bf, 2.0, 4, l1=0.0)
    assert np.all(same.margin == same.right)
    with pytest.raises(ValueError):
        check_bgap_bound(bf, bg)


def test_two_domains_disks():
    rep = two_domains_experiment(Disk(0, 0.4), Disk(0, 0.5), N=256)
    assert abs(rep.left - 0.09) < 1e-12
    assert abs(rep.integral.real + 2 * math.pi * 0.002025) < 1e-12
    assert abs(rep.grid_integral.real - rep.integral.real) < 5e-4
    assert abs(rep.right - (2 * math.pi * 0.002025) ** (1 / 3)) < 1e-12
    assert rep.consistent and rep.reference_constant == 72.0
    assert rep.difference_bidegree == (0, 0)


def test_two_domains_equal_and_mismatch():
    rep = two_domains_experiment(Disk(0.1, 0.4), Disk(0.1, 0.4), N=64)
    assert rep.left == 0 and rep.right == 0 and rep.implied_constant is None
    assert rep.same_weights and bidegree(np.zeros((2, 2))) == (-1, -1)
    with pytest.raises(ValueError):
        two_domains_experiment(Disk(0, 0.4), Disk(0.2, 0.4), N=64)


def test_two_domains_conformal_pair():
    rep = two_domains_experiment(ConformalImage((0, 0.9, 0.27)), ConformalImage((0, 0.8, 0.2)), N=256)
    assert rep.degree == 2 and rep.consistent


def test_rational_gap_disk():
    out = rational_gap_experiment(Disk(0, 0.5), Perturbation("dilation", 0.02), [1.2, 1.5j], N=256)
    assert out["degree"] == 1 and out["implied_constant"] > 0


def test_run_jobs_order(monkeypatch):
    seen = set()

    def work(x):
        seen.add(threading.get_ident())
        return x * x

    monkeypatch.setenv("MOMENTSHAPE_THREADS", "1")
    assert run_jobs(work, range(20)) == [x * x for x in range(20)]
    assert len(seen) == 1
    monkeypatch.setenv("MOMENTSHAPE_THREADS", "4")
    assert run_jobs(work, range(20)) == [x * x for x in range(20)]
    monkeypatch.setenv("MOMENTSHAPE_THREADS", "x")
    with pytest.raises(ValueError):
        run_jobs(work, [1])
