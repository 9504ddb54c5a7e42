"""Truncated formal power series in one or two variables.

The variables stand for inverse coordinates ``u = 1/z`` and ``v = 1/conj(w)``.
Two-variable series use box truncation: every coefficient ``u**k v**l`` with
``0 <= k, l <= M`` is stored and nothing outside the box is ever produced.

Because a series with zero constant term is nilpotent once truncated, ``exp``
reduces to a finite Taylor sum and is exact up to rounding.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TruncSeries1",
    "TruncSeries2",
    "mul",
    "exp_series",
    "log_series",
]


def _as_coeffs(coeffs, ndim):
    arr = np.array(coeffs, dtype=complex)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d coefficient array, got shape {arr.shape}")
    if ndim == 2 and arr.shape[0] != arr.shape[1]:
        raise ValueError(f"box truncation needs a square coefficient matrix, got {arr.shape}")
    if arr.size == 0:
        raise ValueError("truncation order must be >= 0")
    if not np.all(np.isfinite(arr)):
        raise ValueError("series coefficients must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class TruncSeries1:
    """Univariate series ``sum_k coeffs[k] u**k`` truncated at order ``M``."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs, 1))

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @classmethod
    def zeros(cls, order: int) -> "TruncSeries1":
        return cls(np.zeros(order + 1, dtype=complex))

    @classmethod
    def one(cls, order: int) -> "TruncSeries1":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = 1.0
        return cls(c)

    def __getitem__(self, k):
        if not 0 <= k <= self.order:
            raise IndexError(f"index {k} outside truncation order {self.order}")
        return self.coeffs[k]

    def _check(self, other):
        if not isinstance(other, TruncSeries1):
            raise TypeError(f"cannot combine TruncSeries1 with {type(other).__name__}")
        if other.order != self.order:
            raise ValueError(f"mismatched truncation orders {self.order} and {other.order}")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            c = self.coeffs.copy()
            c[0] += other
            return TruncSeries1(c)
        self._check(other)
        return TruncSeries1(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries1(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return TruncSeries1(self.coeffs * other)
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return TruncSeries1(self.coeffs / scalar)

    def max_abs_diff(self, other: "TruncSeries1") -> float:
        self._check(other)
        return float(np.max(np.abs(self.coeffs - other.coeffs)))


@dataclass(frozen=True, eq=False)
class TruncSeries2:
    """Bivariate series ``sum_{k,l} coeffs[k, l] u**k v**l`` on the box ``0..M``."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs, 2))

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @classmethod
    def zeros(cls, order: int) -> "TruncSeries2":
        return cls(np.zeros((order + 1, order + 1), dtype=complex))

    @classmethod
    def one(cls, order: int) -> "TruncSeries2":
        c = np.zeros((order + 1, order + 1), dtype=complex)
        c[0, 0] = 1.0
        return cls(c)

    def __getitem__(self, kl):
        k, l = kl
        if not (0 <= k <= self.order and 0 <= l <= self.order):
            raise IndexError(f"index {kl} outside truncation box {self.order}")
        return self.coeffs[k, l]

    def _check(self, other):
        if not isinstance(other, TruncSeries2):
            raise TypeError(f"cannot combine TruncSeries2 with {type(other).__name__}")
        if other.order != self.order:
            raise ValueError(f"mismatched truncation orders {self.order} and {other.order}")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            c = self.coeffs.copy()
            c[0, 0] += other
            return TruncSeries2(c)
        self._check(other)
        return TruncSeries2(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries2(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return TruncSeries2(self.coeffs * other)
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return TruncSeries2(self.coeffs / scalar)

    def max_abs_diff(self, other: "TruncSeries2") -> float:
        self._check(other)
        return float(np.max(np.abs(self.coeffs - other.coeffs)))


def _mul1(a, b):
    m = a.shape[0]
    out = np.zeros(m, dtype=complex)
    for i in np.flatnonzero(a):
        out[i:] += a[i] * b[: m - i]
    return out


def _mul2(a, b):
    m = a.shape[0]
    out = np.zeros((m, m), dtype=complex)
    # loop over the nonzero support of ``a`` only; the powers fed in by exp/log
    # are sparse near the origin
    for i, j in zip(*np.nonzero(a)):
        out[i:, j:] += a[i, j] * b[: m - i, : m - j]
    return out


def mul(a, b):
    """Cauchy product of two truncated series, discarding terms outside the box."""
    if type(a) is not type(b):
        raise TypeError(f"cannot multiply {type(a).__name__} by {type(b).__name__}")
    if a.order != b.order:
        raise ValueError(f"mismatched truncation orders {a.order} and {b.order}")
    if isinstance(a, TruncSeries1):
        return TruncSeries1(_mul1(a.coeffs, b.coeffs))
    return TruncSeries2(_mul2(a.coeffs, b.coeffs))


def _constant(a):
    return a.coeffs[0] if isinstance(a, TruncSeries1) else a.coeffs[0, 0]


def exp_series(a):
    """Truncated exponential of a series with zero constant term.

    The Taylor sum stops as soon as a power of ``a`` vanishes on the box,
    which happens after at most ``2M + 1`` terms (``M`` for one variable).
    """
    if _constant(a) != 0:
        raise ValueError(f"exp_series needs a zero constant term, got {_constant(a)!r}")
    cls = type(a)
    result = cls.one(a.order).coeffs
    term = result.copy()
    k = 0
    while True:
        k += 1
        term = (_mul1 if cls is TruncSeries1 else _mul2)(term, a.coeffs) / k
        if not np.any(term):
            break
        result = result + term
    return cls(result)


def log_series(a):
    """Truncated logarithm of a series with constant term 1.

    Inverse of :func:`exp_series`. Solved by forward substitution on
    ``f * D(log f) = D f`` where ``D`` multiplies the ``u**k v**l`` coefficient
    by ``k + l``; this avoids the cancellation of the Mercator sum when the
    coefficients are large.
    """
    c0 = _constant(a)
    if c0 != 1:
        raise ValueError(f"log_series needs constant term 1, got {c0!r}")
    f = a.coeffs
    if isinstance(a, TruncSeries1):
        m = f.shape[0]
        dg = np.zeros(m, dtype=complex)
        for k in range(1, m):
            dg[k] = k * f[k] - np.dot(f[1 : k + 1], dg[k - 1 :: -1][:k])
        g = np.zeros(m, dtype=complex)
        g[1:] = dg[1:] / np.arange(1, m)
        return TruncSeries1(g)

    m = f.shape[0]
    deg = np.add.outer(np.arange(m), np.arange(m))
    df = deg * f
    dg = np.zeros((m, m), dtype=complex)
    # increasing total degree guarantees every dg entry used is final
    for total in range(1, 2 * m - 1):
        for k in range(max(0, total - m + 1), min(total, m - 1) + 1):
            l = total - k
            acc = df[k, l]
            sub_f = f[: k + 1, : l + 1][::-1, ::-1]
            acc -= np.sum(sub_f * dg[: k + 1, : l + 1]) - f[0, 0] * dg[k, l]
            dg[k, l] = acc
    g = np.zeros((m, m), dtype=complex)
    nz = deg > 0
    g[nz] = dg[nz] / deg[nz]
    return TruncSeries2(g)
