"""The exponential transform of a shade function.

Coefficient level: moments ``s`` map to the coefficients ``b`` of

    exp(-(1/pi) sum s_kl u**(k+1) v**(l+1)) = 1 - sum b_kl u**(k+1) v**(l+1),

with ``u = 1/z`` and ``v = 1/conj(w)``, and in one variable

    exp(-sum s_k u**(k+1)) = 1 - sum t_k u**(k+1).

Both maps are triangular and inverted exactly by a series logarithm.
Pointwise level: ``E_g(z, conj(w))`` is evaluated by the midpoint rule on the
grid of a :class:`~momentshape.domains.ShadeFunction`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import MomentTable1D, MomentTable2D, ShadeFunction, support_distance
from .linalg import hermitian_eigen, polyval
from .series import TruncSeries1, TruncSeries2, exp_series, log_series

__all__ = [
    "ExpCoeffTable",
    "ExpCoeffTable1D",
    "SupportProximityError",
    "s_to_b",
    "b_to_s",
    "s_to_t",
    "t_to_s",
    "eval_diagonal",
    "eval_polarized",
    "rational_E",
    "psd_margin",
]

EXP_CLAMP = 700.0
POINT_CHUNK = 16


class SupportProximityError(ValueError):
    """An evaluation point is inside, or within two grid cells of, the support."""


@dataclass
class ExpCoeffTable:
    """2D exponential-transform coefficients ``b[k, l]``, ``0 <= k, l <= d``."""

    b: np.ndarray

    def __post_init__(self):
        self.b = np.array(self.b, dtype=complex)
        if self.b.ndim != 2 or self.b.shape[0] != self.b.shape[1]:
            raise ValueError(f"coefficient matrix must be square, got {self.b.shape}")

    @property
    def d(self) -> int:
        return self.b.shape[0] - 1

    def block(self, d):
        return self.b[: d + 1, : d + 1]


@dataclass
class ExpCoeffTable1D:
    """1D coefficients ``t[k]``, ``0 <= k <= m``."""

    t: np.ndarray

    def __post_init__(self):
        self.t = np.array(self.t, dtype=float)

    @property
    def m(self) -> int:
        return self.t.size - 1


def s_to_b(s: MomentTable2D, rtol=1e-10) -> ExpCoeffTable:
    """Moments to exponential-transform coefficients on the box ``0..d``."""
    if not s.is_hermitian(rtol):
        raise ValueError(f"moment matrix is not Hermitian (defect {s.hermitian_defect():.3e})")
    d = s.d
    a = np.zeros((d + 2, d + 2), dtype=complex)
    a[1:, 1:] = -s.s / np.pi
    e = exp_series(TruncSeries2(a)).coeffs
    return ExpCoeffTable(-e[1:, 1:])


def b_to_s(b: ExpCoeffTable) -> MomentTable2D:
    """Inverse of :func:`s_to_b` through the series logarithm."""
    d = b.d
    e = np.zeros((d + 2, d + 2), dtype=complex)
    e[0, 0] = 1.0
    e[1:, 1:] = -b.b
    a = log_series(TruncSeries2(e)).coeffs
    return MomentTable2D(-np.pi * a[1:, 1:], "exp-inverse")


def s_to_t(s: MomentTable1D) -> ExpCoeffTable1D:
    """1D moments to Markov's ``t`` coefficients (no ``1/pi`` in one variable)."""
    a = np.zeros(s.m + 2, dtype=complex)
    a[1:] = -s.s
    e = exp_series(TruncSeries1(a)).coeffs
    return ExpCoeffTable1D(-e[1:].real)


def t_to_s(t: ExpCoeffTable1D) -> MomentTable1D:
    e = np.zeros(t.m + 2, dtype=complex)
    e[0] = 1.0
    e[1:] = -t.t
    a = log_series(TruncSeries1(e)).coeffs
    return MomentTable1D(-a[1:].real)


def psd_margin(b: ExpCoeffTable):
    """``(smallest, largest)`` eigenvalue of the Hermitian matrix ``[b_kl]``."""
    w, _ = hermitian_eigen(0.5 * (b.b + b.b.conj().T))
    return float(w[0]), float(w[-1])


# --------------------------------------------------------------------------
# pointwise evaluation


def _support_weights(g: ShadeFunction):
    mask = g.values > 0
    zeta = g.centers()[mask]
    return zeta, g.values[mask] * g.cell_area


def _check_points(g, pts):
    if not pts.size:
        return
    dist = support_distance(g, pts)
    limit = 2.0 * max(g.hx, g.hy)
    bad = dist < limit
    if np.any(bad):
        p = pts[bad][0]
        raise SupportProximityError(
            f"point {p} is within {limit:.3g} of the support (distance {dist[bad][0]:.3g})"
        )


def _cauchy_integral(g: ShadeFunction, z, w):
    """``(1/pi) sum g dA / ((zeta - z)(conj(zeta) - conj(w)))`` for paired arrays."""
    zeta, wts = _support_weights(g)
    out = np.zeros(z.shape, dtype=complex)
    if not zeta.size:
        return out
    zf, wf, of = z.ravel(), w.ravel(), out.ravel()
    for start in range(0, zf.size, POINT_CHUNK):
        sl = slice(start, start + POINT_CHUNK)
        kz = 1.0 / (zeta[None, :] - zf[sl, None])
        kw = 1.0 / (zeta[None, :] - wf[sl, None])
        of[sl] = (kz * kw.conj()) @ wts
    return of.reshape(z.shape) / np.pi


def _clamped_exp(integral):
    out = np.exp(-np.where(integral.real > EXP_CLAMP, 0.0, integral))
    return np.where(integral.real > EXP_CLAMP, 0.0, out)


def eval_diagonal(g: ShadeFunction, z):
    """``E_g(z, conj(z)) = exp(-(1/pi) int g dA / |zeta - z|**2)`` outside the support.

    Accepts a scalar or an array of points. Points closer than two grid
    cells to the support raise :class:`SupportProximityError`.
    """
    zz = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(zz)
    _check_points(g, flat.ravel())
    val = _clamped_exp(_cauchy_integral(g, flat, flat)).real
    return float(val.ravel()[0]) if zz.ndim == 0 else val.reshape(zz.shape)


def eval_polarized(g: ShadeFunction, z, w):
    """Polarized transform ``E_g(z, conj(w))`` for broadcastable ``z`` and ``w``."""
    zz, ww = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
    scalar = zz.ndim == 0
    zf, wf = np.atleast_1d(zz), np.atleast_1d(ww)
    _check_points(g, np.concatenate([zf.ravel(), wf.ravel()]))
    val = _clamped_exp(_cauchy_integral(g, zf, wf))
    return complex(val.ravel()[0]) if scalar else val


def rational_E(Q, P, z, w):
    """Evaluate ``Q(z, conj(w)) / (P(z) conj(P(w)))``.

    ``Q`` is a coefficient matrix ``q[i, j]`` of ``z**i conj(w)**j`` (or any
    object with a ``q`` attribute); ``P`` holds ascending coefficients.
    """
    q = np.asarray(getattr(Q, "q", Q), dtype=complex)
    P = np.asarray(getattr(P, "coeffs", P), dtype=complex)
    zz, ww = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
    pz = polyval(P, zz)
    pw = polyval(P, ww)
    if np.any(pz == 0) or np.any(pw == 0):
        raise ZeroDivisionError("rational_E evaluated at a node (zero of P)")
    i = np.arange(q.shape[0])
    zpow = zz[..., None] ** i
    wpow = np.conj(ww)[..., None] ** np.arange(q.shape[1])
    num = np.einsum("...i,ij,...j->...", zpow, q, wpow)
    val = num / (pz * np.conj(pw))
    return complex(val) if val.ndim == 0 else val
