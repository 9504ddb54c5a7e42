import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from momentshape.series import TruncSeries1, TruncSeries2, exp_series, log_series, mul

finite = st.floats(-2, 2, allow_nan=False, allow_infinity=False)


def rand2(rng, m, scale=1.0, const=0.0):
    c = scale * (rng.normal(size=(m + 1, m + 1)) + 1j * rng.normal(size=(m + 1, m + 1)))
    c[0, 0] = const
    return TruncSeries2(c)


def test_exp_of_u_is_factorial_series():
    a = TruncSeries1([0, 1, 0, 0, 0, 0])
    e = exp_series(a).coeffs
    assert np.allclose(e, [1 / math.factorial(k) for k in range(6)], atol=1e-15)


def test_exp_of_uv_box():
    # exp(uv) keeps only the diagonal u**k v**k / k!
    c = np.zeros((4, 4))
    c[1, 1] = 1.0
    e = exp_series(TruncSeries2(c)).coeffs
    assert np.allclose(e, np.diag([1 / math.factorial(k) for k in range(4)]), atol=1e-15)


def test_mul_matches_numpy_convolution():
    rng = np.random.default_rng(0)
    a, b = rand2(rng, 5, const=1.0), rand2(rng, 5, const=0.5)
    full = np.zeros((11, 11), dtype=complex)
    for i in range(6):
        for j in range(6):
            full[i : i + 6, j : j + 6] += a.coeffs[i, j] * b.coeffs
    assert np.allclose(mul(a, b).coeffs, full[:6, :6], atol=1e-13)


@pytest.mark.parametrize("m", [1, 4, 12])
def test_exp_is_a_homomorphism(m):
    rng = np.random.default_rng(m)
    a, b = rand2(rng, m, 0.5), rand2(rng, m, 0.5)
    lhs = exp_series(a + b)
    rhs = mul(exp_series(a), exp_series(b))
    assert lhs.max_abs_diff(rhs) < 1e-12 * max(1.0, np.max(np.abs(rhs.coeffs)))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (6, 6), elements=finite), arrays(np.float64, (6, 6), elements=finite))
def test_log_inverts_exp_2d(re, im):
    c = re + 1j * im
    c[0, 0] = 0
    a = TruncSeries2(c)
    back = log_series(exp_series(a))
    assert back.max_abs_diff(a) < 1e-9 * max(1.0, np.max(np.abs(exp_series(a).coeffs)))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, 10, elements=finite))
def test_log_inverts_exp_1d(c):
    c = c.astype(complex)
    c[0] = 0
    a = TruncSeries1(c)
    assert log_series(exp_series(a)).max_abs_diff(a) < 1e-9


def test_log_of_one_plus_u():
    out = log_series(TruncSeries1([1, 1, 0, 0, 0, 0])).coeffs
    assert np.allclose(out, [0] + [(-1) ** (k + 1) / k for k in range(1, 6)], atol=1e-15)


def test_errors():
    with pytest.raises(ValueError):
        exp_series(TruncSeries1([1.0, 2.0]))
    with pytest.raises(ValueError):
        log_series(TruncSeries1([2.0, 1.0]))
    with pytest.raises(ValueError):
        TruncSeries2(np.zeros((2, 3)))
    with pytest.raises(TypeError):
        TruncSeries1([0, 1]) + TruncSeries2(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        TruncSeries1([0, 1]) + TruncSeries1([0, 1, 2])
    with pytest.raises(IndexError):
        TruncSeries1([0, 1])[5]
