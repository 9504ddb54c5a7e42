import numpy as np
import pytest

from momentshape.domains import (
    ConformalImage,
    Disk,
    MomentTable1D,
    MomentTable2D,
    conformal_moments,
    disk_moments,
    interval_moments,
    sample_shade,
)
from momentshape.exptransform import (
    ExpCoeffTable,
    ExpCoeffTable1D,
    SupportProximityError,
    b_to_s,
    eval_diagonal,
    eval_polarized,
    psd_margin,
    rational_E,
    s_to_b,
    s_to_t,
    t_to_s,
)


@pytest.mark.parametrize("a,r", [(0, 0.5), (0.2 + 0.1j, 0.5), (-0.3j, 0.2)])
def test_disk_b_closed_form(a, r):
    # E = 1 - r**2 / ((z - a)(conj w - conj a)) expands to b_kl = r**2 a**k conj(a)**l
    b = s_to_b(disk_moments(a, r, 5)).b
    k = np.arange(6)
    exact = r * r * np.outer(np.asarray(a, complex) ** k, np.conj(np.asarray(a, complex)) ** k)
    assert np.max(np.abs(b - exact)) < 1e-12
    lo, hi = psd_margin(ExpCoeffTable(b))
    assert lo > -1e-12 and abs(hi - r * r * np.sum(np.abs(a) ** (2 * k))) < 1e-12


def test_b_roundtrip():
    s = conformal_moments([0, 0.7, 0.2, 0.05], 6)
    back = b_to_s(s_to_b(s))
    assert np.max(np.abs(back.s - s.s)) < 1e-12


def test_s_to_b_rejects_non_hermitian():
    with pytest.raises(ValueError):
        s_to_b(MomentTable2D(np.array([[1, 1], [0, 1]])))


def test_unit_interval_t():
    t = s_to_t(MomentTable1D(1.0 / np.arange(1, 12))).t
    assert np.max(np.abs(t - np.eye(1, 11)[0])) < 1e-12


@pytest.mark.parametrize("a,b", [(0.0, 1.0), (-0.5, 0.25), (-1.0, 1.0)])
def test_interval_t_closed_form(a, b):
    # (z - b) / (z - a) = 1 - (b - a) sum a**k z**-(k+1)
    t = s_to_t(interval_moments([(a, b)], 7)).t
    assert np.allclose(t, (b - a) * a ** np.arange(8), atol=1e-12)
    assert np.allclose(t_to_s(ExpCoeffTable1D(t)).s, interval_moments([(a, b)], 7).s, atol=1e-12)


def test_eval_diagonal_disk():
    g = sample_shade(Disk(0, 0.5), 512, (-1, 1, -1, 1))
    z = np.array([1.0, 0.8j, -1 - 1j])
    exact = 1 - 0.25 / np.abs(z) ** 2
    assert np.max(np.abs(eval_diagonal(g, z) - exact)) < 2e-3
    assert isinstance(eval_diagonal(g, 1.0), float)


def test_eval_diagonal_far_field():
    g = sample_shade(Disk(0, 0.5), 64, (-1, 1, -1, 1))
    assert abs(eval_diagonal(g, 1000.0) - 1) < 1e-6


def test_eval_rejects_support():
    g = sample_shade(Disk(0, 0.5), 64, (-1, 1, -1, 1))
    with pytest.raises(SupportProximityError):
        eval_diagonal(g, 0.51)
    with pytest.raises(SupportProximityError):
        eval_polarized(g, 2.0, 0.1)


def test_polarized_matches_rational_form():
    spec = ConformalImage((0, 0.6, 0.15))
    g = sample_shade(spec, 512, (-1, 1, -1, 1))
    q = np.array([[0.0, 0.0], [0.0, 1.0]])
    rng = np.random.default_rng(1)
    z = 1.5 * np.exp(2j * np.pi * rng.uniform(size=5))
    w = 1.7 * np.exp(2j * np.pi * rng.uniform(size=5))
    # disk of radius 0.5 at 0: Q = z conj(w) - 1/4, P = z
    d = sample_shade(Disk(0, 0.5), 512, (-1, 1, -1, 1))
    exact = rational_E(np.array([[-0.25, 0], [0, 1]]), [0, 1], z, w)
    assert np.max(np.abs(eval_polarized(d, z, w) - exact)) < 3e-3
    assert np.all(np.abs(eval_polarized(g, z, w)) > 0)
    assert abs(rational_E(q, [0, 1], 2.0, 3.0) - 1) < 1e-15


def test_rational_E_pole():
    with pytest.raises(ZeroDivisionError):
        rational_E(np.eye(2), [0, 1], 0.0, 1.0)
