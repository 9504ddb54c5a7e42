"""Small dense kernels: cyclic Jacobi for Hermitian matrices, Durand-Kerner roots.

Both work at desk scale (matrices up to 64 x 64, polynomials of modest degree)
and are checked in the tests against LAPACK and companion-matrix roots.
"""
from __future__ import annotations

import numpy as np

__all__ = ["hermitian_eigen", "poly_roots", "polyval", "RootFindingError"]


class RootFindingError(RuntimeError):
    """Durand-Kerner did not reach the residual target; ``best`` holds the last iterate."""

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


def hermitian_eigen(H, tol=1e-13, max_sweeps=100):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as columns. Sweeps stop once the off-diagonal Frobenius norm
    drops below ``tol * ||H||_F``.
    """
    A = np.array(H, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n > 64:
        raise ValueError(f"matrix of size {n} exceeds the supported 64 x 64")
    norm = np.linalg.norm(A)
    if np.linalg.norm(A - A.conj().T) > 1e-10 * max(norm, 1e-300):
        raise ValueError("matrix is not Hermitian")
    A = 0.5 * (A + A.conj().T)
    V = np.eye(n, dtype=complex)
    if n == 0 or norm == 0.0:
        return np.zeros(n), V

    target = tol * norm
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off < target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = A[p, q]
                mag = abs(beta)
                if mag < 1e-300:
                    continue
                alpha = A[p, p].real
                gamma = A[q, q].real
                # phase rotation makes the pivot real, then a real Jacobi rotation kills it
                phase = beta / mag
                tau = (gamma - alpha) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                J = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ J
                A[idx, :] = J.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                V[:, idx] = V[:, idx] @ J
    else:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    w = np.diag(A).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def polyval(coeffs, z):
    """Evaluate ``sum_k coeffs[k] z**k`` (ascending coefficients) by Horner's rule."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def poly_roots(coeffs, max_iter=500, tol=1e-10):
    """Roots of a complex polynomial by simultaneous (Durand-Kerner) iteration.

    ``coeffs`` are ascending, ``coeffs[-1]`` is the nonzero leading coefficient.
    Each returned root satisfies ``|p(root)| <= tol * (1 + ||p||)``; otherwise
    :class:`RootFindingError` is raised carrying the best iterate.
    """
    p = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    deg = p.size - 1
    if deg < 1:
        raise ValueError("polynomial must have degree >= 1 with a nonzero leading coefficient")
    monic = p / p[-1]
    if deg == 1:
        return np.array([-monic[0]])

    pnorm = np.linalg.norm(p)
    bound = 1.0 + np.max(np.abs(monic[:-1]))  # Cauchy bound on root moduli
    z = 0.5 * bound * (0.4 + 0.9j) ** np.arange(deg)
    threshold = tol * (1.0 + pnorm)

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for _ in range(max_iter):
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            step = polyval(monic, z) / np.prod(diff, axis=1)
            z = z - step
            if not np.all(np.isfinite(z)):
                break
            if np.max(np.abs(polyval(p, z))) <= threshold and np.max(np.abs(step)) <= 1e-14 * bound:
                break
        resid = np.abs(polyval(p, z))
    # NaN residuals must fail too, hence the negated comparison
    if not np.max(resid) <= threshold:
        raise RootFindingError(
            f"Durand-Kerner stalled: max residual {np.max(resid):.3e} > {threshold:.3e}", z
        )
    return z
