"""Markov's one-dimensional picture: interval unions from their moments.

For ``g`` the indicator of ``[a_1, b_1] u ... u [a_d, b_d]`` the exponential
transform is ``prod (z - b_i) / (z - a_i)``. Its coefficients ``t_k`` give a
Hankel matrix of rank ``d``; the null vector of the ``(d+1) x (d+1)`` block is
the denominator and a Pade step gives the numerator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import hankel

from .exptransform import ExpCoeffTable1D
from .linalg import hermitian_eigen, poly_roots

__all__ = [
    "RationalE1D",
    "hankel_matrix",
    "hankel_rank",
    "pade_recover",
    "endpoints",
    "EndpointError",
]


class EndpointError(ValueError):
    """Roots of ``P`` and ``Q`` are not real and interlacing."""


@dataclass
class RationalE1D:
    """``E(z) = Q(z) / P(z)``, both monic of degree ``d`` (ascending coefficients)."""

    Q: np.ndarray
    P: np.ndarray
    condition: float = 1.0

    @property
    def d(self) -> int:
        return self.P.size - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.Q) / np.polynomial.polynomial.polyval(z, self.P)


def hankel_matrix(t, d):
    """``H[j, l] = t[j + l]`` for ``0 <= j, l <= d``."""
    t = np.asarray(getattr(t, "t", t), dtype=float)
    if t.size < 2 * d + 1:
        raise ValueError(f"a ({d + 1})x({d + 1}) Hankel block needs {2 * d + 1} coefficients, have {t.size}")
    return hankel(t[: d + 1], t[d : 2 * d + 1])


def hankel_rank(t: ExpCoeffTable1D, tol=1e-10):
    """Smallest ``d`` with a numerically singular ``(d+1) x (d+1)`` Hankel block.

    Returns ``None`` when every available block is regular.
    """
    tt = np.asarray(t.t, dtype=float)
    for d in range((tt.size - 1) // 2 + 1):
        w, _ = hermitian_eigen(hankel_matrix(tt, d))
        top = np.max(np.abs(w))
        if top == 0.0 or abs(w[0]) < tol * top:
            return d
    return None


def pade_recover(t: ExpCoeffTable1D, d) -> RationalE1D:
    """Denominator from the Hankel null vector, numerator by the Pade step.

    ``Q`` is the polynomial part of ``P(z) (1 - sum t_k z**-(k+1))``.
    """
    tt = np.asarray(t.t, dtype=float)
    H = hankel_matrix(tt, d)
    w, V = hermitian_eigen(H)
    v = V[:, 0].real
    if abs(v[-1]) < 1e-12:
        raise ValueError("Hankel null vector has no leading coefficient; cannot form a monic P")
    P = v / v[-1]
    cond = float(np.max(np.abs(w)) / max(abs(w[1]) if w.size > 1 else 1.0, 1e-300))
    # polynomial part: q_i = p_i - sum_k p_{i+k+1} t_k
    Q = P.copy()
    for i in range(d + 1):
        for k in range(d - i):
            Q[i] -= P[i + k + 1] * tt[k]
    if abs(Q[-1] - 1.0) > 1e-12:
        raise ValueError("recovered numerator is not monic of degree d")
    return RationalE1D(Q, P, cond)


def endpoints(rat: RationalE1D, imag_tol=1e-8, merge_gap=1e-8):
    """Pair the roots of ``P`` (left ends) and ``Q`` (right ends) into intervals.

    Sorted roots must alternate ``P, Q, P, Q, ...``. Intervals closer than
    ``merge_gap`` are merged; ``Q == P`` gives the empty union.
    """
    if rat.d == 0 or np.allclose(rat.Q, rat.P, rtol=0, atol=1e-14):
        return []
    pr = poly_roots(rat.P)
    qr = poly_roots(rat.Q)
    roots = np.concatenate([pr, qr])
    if np.any(np.abs(roots.imag) > imag_tol * (1 + np.abs(roots.real))):
        raise EndpointError("roots are not real; data is not an interval-union moment sequence")
    labels = np.array([0] * pr.size + [1] * qr.size)
    order = np.argsort(roots.real, kind="stable")
    labels = labels[order]
    vals = roots.real[order]
    if np.any(labels[0::2] != 0) or np.any(labels[1::2] != 1):
        raise EndpointError("roots of P and Q do not interlace")
    intervals = []
    for a, b in zip(vals[0::2], vals[1::2]):
        if intervals and a - intervals[-1][1] < merge_gap:
            intervals[-1] = (intervals[-1][0], float(b))
        else:
            intervals.append((float(a), float(b)))
    for a, b in intervals:
        if a < -1 - 1e-9 or b > 1 + 1e-9:
            raise EndpointError(f"recovered interval [{a}, {b}] leaves [-1, 1]")
    return intervals
