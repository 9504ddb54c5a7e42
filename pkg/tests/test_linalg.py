import numpy as np
import pytest

from momentshape.linalg import RootFindingError, hermitian_eigen, poly_roots, polyval


@pytest.mark.parametrize("n", [1, 2, 5, 20, 64])
def test_jacobi_matches_lapack(n):
    rng = np.random.default_rng(n)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = A + A.conj().T
    w, V = hermitian_eigen(H)
    assert np.allclose(w, np.linalg.eigvalsh(H), atol=1e-12 * np.abs(w).max())
    assert np.allclose(V.conj().T @ V, np.eye(n), atol=1e-12)
    assert np.linalg.norm(H @ V - V * w) < 1e-12 * np.linalg.norm(H)


def test_jacobi_rank_one():
    p = np.array([1.0, 2j, -1.0])
    w, V = hermitian_eigen(np.outer(p, p.conj()))
    assert np.allclose(w, [0, 0, 6], atol=1e-14)
    assert abs(abs(np.vdot(V[:, -1], p)) - np.sqrt(6)) < 1e-12


def test_jacobi_rejects_bad_input():
    with pytest.raises(ValueError):
        hermitian_eigen(np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValueError):
        hermitian_eigen(np.eye(65))


@pytest.mark.parametrize("seed", range(5))
def test_roots_match_companion(seed):
    rng = np.random.default_rng(seed)
    roots = rng.normal(size=6) + 1j * rng.normal(size=6)
    coeffs = np.poly(roots)[::-1]
    found = poly_roots(coeffs)
    assert np.allclose(np.sort_complex(found), np.sort_complex(roots), atol=1e-8)
    # Vieta: sum of roots is minus the subleading coefficient
    assert abs(found.sum() + coeffs[-2] / coeffs[-1]) < 1e-10


def test_roots_double_root_residual():
    found = poly_roots([1, -2, 1])
    assert np.max(np.abs(polyval(np.array([1, -2, 1]), found))) < 1e-10


def test_roots_errors():
    with pytest.raises(ValueError):
        poly_roots([3.0])
    with pytest.raises(RootFindingError) as info:
        poly_roots(np.poly(np.arange(1, 25))[::-1], max_iter=3)
    assert info.value.best.size == 24
