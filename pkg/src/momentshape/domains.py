"""Test shapes and shade functions, with their forward moments.

Four shape families are supported: disks, polynomial conformal images of the
unit disk, unions of intervals on ``[-1, 1]`` and sublevel sets ``{p >= 0}``
in the cube ``[-1, 1]**2``. Moments are computed in closed form where possible
and by the midpoint rule on a uniform grid otherwise.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import shapely
from numpy.polynomial import polynomial as npoly
from shapely.geometry import LinearRing, Polygon

from .linalg import poly_roots, polyval
from .polynomials import RealPoly

__all__ = [
    "Disk",
    "ConformalImage",
    "IntervalUnion",
    "SublevelSet",
    "DomainSpec",
    "ShadeFunction",
    "MomentTable2D",
    "MomentTable1D",
    "Perturbation",
    "OutsideUnitDiskWarning",
    "disk_moments",
    "conformal_moments",
    "grid_moments",
    "interval_moments",
    "sample_shade",
    "perturbation_l1",
    "check_injective",
    "support_distance",
    "grid_l1",
]

ROW_CHUNK = 64


class OutsideUnitDiskWarning(UserWarning):
    """Data of a 2D moment pipeline reaches outside the closed unit disk."""


# --------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0:
            raise ValueError(f"disk radius must be positive, got {self.radius}")

    def contains(self, z):
        return np.abs(np.asarray(z) - self.center) <= self.radius

    def extent(self) -> float:
        return abs(self.center) + self.radius


@dataclass(frozen=True)
class ConformalImage:
    """Image of the closed unit disk under the polynomial ``phi`` (ascending coefficients)."""

    phi: tuple
    boundary_samples: int = 2048

    def __post_init__(self):
        phi = tuple(complex(c) for c in self.phi)
        while len(phi) > 1 and phi[-1] == 0:
            phi = phi[:-1]
        if len(phi) < 2:
            raise ValueError("phi must have degree >= 1")
        object.__setattr__(self, "phi", phi)
        if not check_injective(phi, self.boundary_samples):
            raise ValueError(f"phi={phi} is not injective on the closed unit disk")

    def boundary(self, samples: Optional[int] = None):
        m = samples or self.boundary_samples
        theta = 2 * np.pi * np.arange(m) / m
        return polyval(np.array(self.phi), np.exp(1j * theta))

    def polygon(self) -> Polygon:
        b = self.boundary()
        return Polygon(np.column_stack([b.real, b.imag]))

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return shapely.contains_xy(self.polygon(), z.real, z.imag)

    def extent(self) -> float:
        return float(np.max(np.abs(self.boundary())))


@dataclass(frozen=True)
class IntervalUnion:
    intervals: tuple

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        for a, b in ivs:
            if not (-1.0 <= a < b <= 1.0):
                raise ValueError(f"interval [{a}, {b}] is empty or leaves [-1, 1]")
        for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
            if not b0 < a1:
                raise ValueError("intervals must be sorted and disjoint")
        object.__setattr__(self, "intervals", ivs)


@dataclass(frozen=True)
class SublevelSet:
    """``{x in [-1, 1]**n : p(x) >= 0}``; only ``n = 2`` can be sampled on a grid."""

    poly: RealPoly

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        inside_cube = (np.abs(z.real) <= 1) & (np.abs(z.imag) <= 1)
        return inside_cube & (self.poly(z.real, z.imag) >= 0)

    def extent(self) -> float:
        return math.sqrt(2.0)


DomainSpec = Union[Disk, ConformalImage, IntervalUnion, SublevelSet]


def check_injective(phi, samples=2048) -> bool:
    """Numerical injectivity test of a polynomial map on the closed unit disk.

    The boundary curve must be a simple closed curve and ``phi'`` must not
    vanish on the closed disk.
    """
    phi = np.asarray(phi, dtype=complex)
    dphi = npoly.polyder(phi)
    if dphi.size > 1 and np.any(dphi[1:] != 0):
        crit = poly_roots(np.trim_zeros(dphi, "b"))
        if np.any(np.abs(crit) <= 1.0 + 1e-12):
            return False
    elif dphi[0] == 0:
        return False
    theta = 2 * np.pi * np.arange(samples) / samples
    b = polyval(phi, np.exp(1j * theta))
    return bool(LinearRing(np.column_stack([b.real, b.imag])).is_simple)


# --------------------------------------------------------------------------
# data tables


@dataclass
class MomentTable2D:
    """Complex moments ``s[k, l]`` of ``z**k conj(z)**l``, ``0 <= k, l <= d``."""

    s: np.ndarray
    provenance: str = "closed-form"

    def __post_init__(self):
        self.s = np.array(self.s, dtype=complex)
        if self.s.ndim != 2 or self.s.shape[0] != self.s.shape[1]:
            raise ValueError(f"moment matrix must be square, got {self.s.shape}")

    @property
    def d(self) -> int:
        return self.s.shape[0] - 1

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.s - self.s.conj().T)))

    def is_hermitian(self, rtol=1e-10) -> bool:
        return self.hermitian_defect() <= rtol * max(1.0, float(np.max(np.abs(self.s))))


@dataclass
class MomentTable1D:
    """Real moments ``s[k]`` of ``t**k``, ``0 <= k <= m``."""

    s: np.ndarray

    def __post_init__(self):
        self.s = np.array(self.s, dtype=float)
        if self.s.ndim != 1 or self.s.size == 0:
            raise ValueError("1D moments must be a non-empty vector")

    @property
    def m(self) -> int:
        return self.s.size - 1


@dataclass
class ShadeFunction:
    """Samples of ``g`` in ``[0, 1]`` at the cell centres of an ``N x N`` grid.

    ``values[i, j]`` is the value at ``x = xs[j]``, ``y = ys[i]``; ``bbox`` is
    ``(xmin, xmax, ymin, ymax)``.
    """

    values: np.ndarray
    bbox: tuple = (-1.0, 1.0, -1.0, 1.0)

    def __post_init__(self):
        self.values = np.array(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ValueError(f"shade samples must form a square grid, got {self.values.shape}")
        if self.values.shape[0] < 2:
            raise ValueError("grid resolution N must be >= 2")
        if np.any(self.values < 0) or np.any(self.values > 1) or not np.all(np.isfinite(self.values)):
            raise ValueError("shade values must lie in [0, 1]")
        self.bbox = tuple(float(b) for b in self.bbox)
        xmin, xmax, ymin, ymax = self.bbox
        if not (xmax > xmin and ymax > ymin):
            raise ValueError(f"degenerate bounding box {self.bbox}")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def hx(self) -> float:
        return (self.bbox[1] - self.bbox[0]) / self.n

    @property
    def hy(self) -> float:
        return (self.bbox[3] - self.bbox[2]) / self.n

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def xs(self):
        return self.bbox[0] + (np.arange(self.n) + 0.5) * self.hx

    @property
    def ys(self):
        return self.bbox[2] + (np.arange(self.n) + 0.5) * self.hy

    def centers(self):
        return self.xs[None, :] + 1j * self.ys[:, None]

    def mass(self) -> float:
        return float(self.values.sum() * self.cell_area)

    def same_grid(self, other: "ShadeFunction") -> bool:
        return self.n == other.n and np.allclose(self.bbox, other.bbox, rtol=0, atol=1e-15)


@dataclass(frozen=True)
class Perturbation:
    """A one-parameter deformation of a shape's indicator.

    ``dilation`` grows the shape by ``eps`` (radius for disks, a level shift
    ``{p >= -eps}`` for sublevel sets, a Minkowski buffer otherwise);
    ``translation`` moves it by ``eps * direction`` (for a sublevel set the
    unbounded set ``{p >= 0}`` moves and is clipped to the cube); ``smudge`` subtracts
    ``kappa`` on the axis-aligned square of side ``eps`` centred at ``center``;
    ``noise`` multiplies the indicator by ``1 - eps * U`` with ``U`` uniform
    per cell, seeded.
    """

    kind: str
    eps: float
    direction: complex = 1.0
    center: complex = 0.0
    kappa: float = 0.5
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("dilation", "translation", "smudge", "noise"):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.eps < 0:
            raise ValueError("perturbation size eps must be >= 0")
        if not 0 <= self.kappa <= 1:
            raise ValueError("kappa must lie in [0, 1]")


# --------------------------------------------------------------------------
# closed-form moments


def disk_moments(a, r, d) -> MomentTable2D:
    """Exact moments of the disk ``D(a, r)`` up to order ``d``.

    Shifting ``z = a + w`` and using that only the centred moments with equal
    powers survive, ``int |w|**(2i) dA = pi r**(2i+2) / (i+1)``.
    """
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    a = complex(a)
    if abs(a) + r > 1 + 1e-12:
        warnings.warn(
            f"disk D({a}, {r}) is not contained in the unit disk", OutsideUnitDiskWarning, stacklevel=2
        )
    s = np.zeros((d + 1, d + 1), dtype=complex)
    ac = a.conjugate()
    for k in range(d + 1):
        for l in range(d + 1):
            acc = 0j
            for i in range(min(k, l) + 1):
                acc += (
                    math.comb(k, i)
                    * math.comb(l, i)
                    * a ** (k - i)
                    * ac ** (l - i)
                    * (math.pi * r ** (2 * i + 2) / (i + 1))
                )
            s[k, l] = acc
    return MomentTable2D(s, "closed-form")


def conformal_moments(phi, d, check=True) -> MomentTable2D:
    """Exact moments of ``phi(D)`` for a polynomial ``phi`` injective on the closed disk.

    With ``F_k = phi**k phi'``, the moment ``s_kl`` equals ``int_D F_k conj(F_l) dA``
    and ``int_D zeta**n conj(zeta)**m dA = pi delta_nm / (n + 1)``.
    """
    phi = np.trim_zeros(np.asarray(phi, dtype=complex), "b")
    if check and not check_injective(phi):
        raise ValueError(f"phi={phi} is not injective on the closed unit disk")
    dphi = npoly.polyder(phi)
    F = []
    power = np.array([1.0 + 0j])
    for _ in range(d + 1):
        F.append(npoly.polymul(power, dphi))
        power = npoly.polymul(power, phi)
    size = max(f.size for f in F)
    Fm = np.zeros((d + 1, size), dtype=complex)
    for k, f in enumerate(F):
        Fm[k, : f.size] = f
    weights = np.pi / np.arange(1, size + 1)
    s = (Fm * weights) @ Fm.conj().T
    s = 0.5 * (s + s.conj().T)
    return MomentTable2D(s, "closed-form")


def interval_moments(intervals, m) -> MomentTable1D:
    """``s_k = sum_i (b_i**(k+1) - a_i**(k+1)) / (k + 1)`` for ``k = 0..m``."""
    ivs = intervals.intervals if isinstance(intervals, IntervalUnion) else IntervalUnion(intervals).intervals
    k = np.arange(m + 1)
    s = np.zeros(m + 1)
    for a, b in ivs:
        s += (b ** (k + 1) - a ** (k + 1)) / (k + 1)
    return MomentTable1D(s)


# --------------------------------------------------------------------------
# sampled shade functions


def grid_moments(g: ShadeFunction, d) -> MomentTable2D:
    """Midpoint-rule moments ``sum g(z) z**k conj(z)**l dA`` over the grid.

    Rows are accumulated block by block in a fixed order, so the result does
    not depend on how the work is split.
    """
    xs = g.xs
    s = np.zeros((d + 1, d + 1), dtype=complex)
    outside = False
    for start in range(0, g.n, ROW_CHUNK):
        block = g.values[start : start + ROW_CHUNK]
        mask = block > 0
        if not mask.any():
            continue
        z = (xs[None, :] + 1j * g.ys[start : start + ROW_CHUNK, None])[mask]
        w = block[mask]
        if np.any(np.abs(z) > 1 + 0.5 * math.hypot(g.hx, g.hy)):
            outside = True
        Z = z[None, :] ** np.arange(d + 1)[:, None]
        s += (Z * w) @ Z.conj().T
    if outside:
        warnings.warn("shade support reaches outside the closed unit disk", OutsideUnitDiskWarning, stacklevel=2)
    s *= g.cell_area
    s = 0.5 * (s + s.conj().T)
    return MomentTable2D(s, "grid-quadrature")


def default_bbox(spec: DomainSpec, pad=0.0):
    if isinstance(spec, SublevelSet):
        return (-1.0, 1.0, -1.0, 1.0)
    R = max(1.0, spec.extent() + pad)
    return (-R, R, -R, R)


def _indicator(spec: DomainSpec, z):
    if isinstance(spec, IntervalUnion):
        raise ValueError("interval unions are one-dimensional and cannot be sampled on a 2D grid")
    return spec.contains(z).astype(float)


def sample_shade(spec: DomainSpec, N, bbox=None, perturbation: Optional[Perturbation] = None) -> ShadeFunction:
    """Indicator of ``spec`` (optionally perturbed) sampled at cell centres.

    A cell takes value 1 iff its centre lies in the shape.
    """
    if N < 2:
        raise ValueError("grid resolution N must be >= 2")
    if isinstance(spec, IntervalUnion):
        raise ValueError("interval unions are one-dimensional and cannot be sampled on a 2D grid")
    bbox = bbox or default_bbox(spec, pad=perturbation.eps if perturbation else 0.0)
    proto = ShadeFunction(np.zeros((N, N)), bbox)
    z = proto.centers()
    if perturbation is None:
        return ShadeFunction(_indicator(spec, z), bbox)

    p = perturbation
    if p.kind == "dilation":
        if isinstance(spec, Disk):
            vals = _indicator(Disk(spec.center, spec.radius + p.eps), z)
        elif isinstance(spec, SublevelSet):
            cube = (np.abs(z.real) <= 1) & (np.abs(z.imag) <= 1)
            vals = (cube & (spec.poly(z.real, z.imag) >= -p.eps)).astype(float)
        else:
            grown = spec.polygon().buffer(p.eps, quad_segs=64)
            vals = shapely.contains_xy(grown, z.real, z.imag).astype(float)
    elif p.kind == "translation":
        shifted = z - p.eps * complex(p.direction)
        if isinstance(spec, SublevelSet):
            # move the unbounded set {p >= 0}, then clip to the cube again
            cube = (np.abs(z.real) <= 1) & (np.abs(z.imag) <= 1)
            vals = (cube & (spec.poly(shifted.real, shifted.imag) >= 0)).astype(float)
        else:
            vals = _indicator(spec, shifted)
    elif p.kind == "smudge":
        vals = _indicator(spec, z)
        half = 0.5 * p.eps
        c = complex(p.center)
        square = (np.abs(z.real - c.real) < half) & (np.abs(z.imag - c.imag) < half)
        vals = np.clip(vals - p.kappa * square, 0.0, 1.0)
    else:
        rng = np.random.default_rng(p.seed)
        vals = _indicator(spec, z)
        vals = vals * (1.0 - p.eps * rng.random(vals.shape))
        vals = np.clip(vals, 0.0, 1.0)
    return ShadeFunction(vals, bbox)


def _lens_area(r, t):
    if t >= 2 * r:
        return 0.0
    return 2 * r * r * math.acos(t / (2 * r)) - 0.5 * t * math.sqrt(4 * r * r - t * t)


def perturbation_l1(spec: DomainSpec, p: Perturbation) -> Optional[float]:
    """Closed-form ``||chi - g||_1`` for a perturbation, or ``None`` when unavailable."""
    if isinstance(spec, Disk):
        r = spec.radius
        if p.kind == "dilation":
            return math.pi * ((r + p.eps) ** 2 - r * r)
        if p.kind == "translation":
            t = p.eps * abs(complex(p.direction))
            return 2 * (math.pi * r * r - _lens_area(r, t))
        if p.kind == "smudge":
            h = 0.5 * p.eps
            c = complex(p.center)
            corners = [c + complex(sx * h, sy * h) for sx in (-1, 1) for sy in (-1, 1)]
            if all(abs(q - spec.center) <= r for q in corners):
                return p.kappa * p.eps * p.eps
    return None


def grid_l1(f: ShadeFunction, g: ShadeFunction) -> float:
    if not f.same_grid(g):
        raise ValueError("shade functions live on different grids")
    return float(np.abs(f.values - g.values).sum() * f.cell_area)


def support_distance(g: ShadeFunction, z, *, extra: Optional[ShadeFunction] = None):
    """Distance from ``z`` to the union of closed cells where ``g > 0`` (or ``extra > 0``).

    Returns ``inf`` for an empty support.
    """
    mask = g.values > 0
    if extra is not None:
        if not g.same_grid(extra):
            raise ValueError("shade functions live on different grids")
        mask = mask | (extra.values > 0)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if not mask.any():
        return np.full(z.shape, np.inf)
    iy, ix = np.nonzero(mask)
    cx = g.xs[ix]
    cy = g.ys[iy]
    out = np.empty(z.shape)
    for idx, zz in np.ndenumerate(z):
        dx = np.maximum(np.abs(zz.real - cx) - 0.5 * g.hx, 0.0)
        dy = np.maximum(np.abs(zz.imag - cy) - 0.5 * g.hy, 0.0)
        out[idx] = np.sqrt(np.min(dx * dx + dy * dy))
    return out
