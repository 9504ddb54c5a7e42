"""Desk-scale checks of the stability inequalities.

Three groups of experiments live here:

* the bathtub functional ``Lambda_f`` and its convex dual (``lambda_f``,
  ``fenchel_check``);
* Hoelder ratios ``||chi - g||_1**(|alpha|+1) / gap`` for designed
  perturbations of the sets ``{xy >= 0}`` and ``{x**2 + y**2 >= 1/4}`` in the
  cube (``run_holder_experiment``);
* perturbation bounds for the exponential transform and for defining
  polynomials of quadrature domains (``check_diagonal_bound``,
  ``check_bgap_bound``, ``two_domains_experiment``, ``rational_gap_experiment``).

The universal constants in these inequalities are not known numerically, so
every experiment reports an implied constant instead of testing a guess.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domains import (
    ConformalImage,
    Disk,
    MomentTable2D,
    Perturbation,
    ShadeFunction,
    SublevelSet,
    conformal_moments,
    disk_moments,
    grid_l1,
    grid_moments,
    sample_shade,
    support_distance,
)
from .exptransform import eval_diagonal, eval_polarized, rational_E, s_to_b
from .polynomials import RealPoly
from .reconstruct import reconstruct
from .volume import AdmissibleIndex, find_admissible

__all__ = [
    "SHAPES",
    "FAMILIES",
    "lambda_f",
    "FenchelReport",
    "fenchel_check",
    "HolderConfig",
    "HolderRecord",
    "HolderExperiment",
    "holder_polynomial",
    "closed_form_family",
    "family_shades",
    "run_holder_experiment",
    "C3",
    "PerturbBoundRecord",
    "check_diagonal_bound",
    "check_bgap_bound",
    "random_shade_pair",
    "random_exterior_points",
    "TwoDomainsReport",
    "two_domains_experiment",
    "bidegree",
    "rational_gap_experiment",
    "run_jobs",
]

HOLE_RADIUS = 0.5
SMUDGE_CENTER = 0.75 + 0.75j
SHAPES = ("orthant", "disk-complement")
FAMILIES = ("dilation", "level_shift", "translation", "smudge")
MIN_DISTANCE = 0.1


def _lstsq_slope(x, y):
    x = np.log(np.asarray(x, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


# --------------------------------------------------------------------------
# bathtub functional


def lambda_f(values, eps, cell_volume) -> float:
    """``inf { int f g : 0 <= g <= 1, int g >= eps }`` for a sampled ``f >= 0``.

    The minimiser fills the cells with the smallest values of ``f`` first and
    takes a fraction of the last cell it touches.
    """
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if np.any(v < 0):
        raise ValueError("lambda_f needs a nonnegative function")
    total = v.size * cell_volume
    if not 0 < eps <= total * (1 + 1e-12):
        raise ValueError(f"eps={eps} must lie in (0, {total}]")
    k = min(int(eps // cell_volume), v.size)
    out = cell_volume * float(v[:k].sum())
    if k < v.size:
        out += (eps - k * cell_volume) * float(v[k])
    return out


def _cube_grid(n, N):
    h = 2.0 / N
    axis = -1.0 + h * (np.arange(N) + 0.5)
    return np.meshgrid(*([axis] * n), indexing="ij"), h**n


@dataclass
class FenchelReport:
    eps_grid: list
    s_grid: list
    lam: list  # Lambda_f(eps) per eps
    dual: list  # dual[i][j] = s_j eps_i - int (s_j - f)_+
    min_margin: float
    holds: bool
    tail: list  # int (s - f)_+ per s
    slope: float
    expected_slope: float
    tolerance: float


def fenchel_check(p: RealPoly, eps_grid, s_grid, N=None, tol=1e-12) -> FenchelReport:
    """Check ``Lambda_f(eps) >= s eps - int (s - f)_+`` for ``f = |p|`` on the cube.

    Also fits the log-log slope of ``s -> int (s - |p|)_+`` over ``s_grid``;
    for an admissible ``alpha`` it should be at least ``1 + 1/|alpha|``, and
    equal to it for ``p = x``.
    """
    if p.is_zero():
        raise ValueError("fenchel_check needs a nonzero polynomial")
    if p.n > 2:
        raise ValueError("grid sampling is limited to n <= 2")
    N = N or (200_000 if p.n == 1 else 1024)
    coords, cv = _cube_grid(p.n, N)
    f = np.abs(p(*coords)).ravel()
    eps_grid = [float(e) for e in eps_grid]
    s_grid = [float(s) for s in s_grid]
    tail = [float(np.maximum(s - f, 0.0).sum() * cv) for s in s_grid]
    lam = [lambda_f(f, e, cv) for e in eps_grid]
    dual = [[s * e - t for s, t in zip(s_grid, tail)] for e in eps_grid]
    margins = [lam[i] - max(row) for i, row in enumerate(dual)]
    order = min(a.order for a in find_admissible(p))
    pos = [(s, t) for s, t in zip(s_grid, tail) if s > 0 and t > 0]
    slope = _lstsq_slope(*zip(*pos)) if len(pos) >= 2 else float("nan")
    min_margin = float(min(margins)) if margins else float("inf")
    return FenchelReport(
        eps_grid, s_grid, lam, dual, min_margin, min_margin >= -tol, tail, slope, 1.0 + 1.0 / order, tol
    )


# --------------------------------------------------------------------------
# Hoelder ratio experiments


def holder_polynomial(shape, scale=1.0) -> RealPoly:
    """``scale * x y`` or ``scale * (x**2 + y**2 - 1/4)``."""
    if shape == "orthant":
        return RealPoly(2, {(1, 1): scale})
    if shape == "disk-complement":
        return RealPoly(2, {(2, 0): scale, (0, 2): scale, (0, 0): -scale * HOLE_RADIUS**2})
    raise ValueError(f"unknown shape {shape!r}; expected one of {SHAPES}")


def closed_form_family(shape, family, eps, scale=1.0, kappa=0.5):
    """Exact ``(||chi - g||_1, int p (chi - g))`` for a designed perturbation.

    ``orthant`` is ``{x y >= 0}`` and ``disk-complement`` is ``{|z| >= 1/2}``,
    both inside ``[-1, 1]**2``. Families:

    ``dilation``
        Minkowski buffer of width ``eps`` (orthant); hole radius ``1/2 - eps``.
    ``level_shift``
        ``{p >= -eps}``.
    ``translation``
        shift by ``eps`` along ``y`` (orthant) or ``x`` (hole centre).
    ``smudge``
        subtract ``kappa`` on an ``eps x eps`` square: ``[0, eps]**2`` for the
        orthant, centred at ``0.75 + 0.75i`` for the disk complement.
    """
    c, e, R = float(scale), float(eps), HOLE_RADIUS
    if e == 0:
        return 0.0, 0.0
    if shape == "orthant":
        if family == "dilation":
            return 4 * e - 2 * e * e, c * (e * e - e**4 / 2)
        if family == "level_shift":
            t = e / c
            if t >= 1:
                raise ValueError("level shift swallows the whole cube")
            return 2 * t * (1 + math.log(1 / t)), c * (t * t / 2 + t * t * math.log(1 / t))
        if family == "translation":
            return 2 * e, c * e * e / 2
        if family == "smudge":
            return kappa * e * e, c * kappa * e**4 / 4
    elif shape == "disk-complement":
        if family in ("dilation", "level_shift"):
            A = R * R - (R - e) ** 2 if family == "dilation" else e / c
            if A > R * R:
                raise ValueError("perturbation closes the hole")
            return math.pi * A, c * math.pi / 2 * A * A
        if family == "translation":
            lens = 2 * R * R * math.acos(e / (2 * R)) - 0.5 * e * math.sqrt(4 * R * R - e * e)
            return 2 * (math.pi * R * R - lens), c * math.pi * R * R * e * e
        if family == "smudge":
            m2 = abs(SMUDGE_CENTER) ** 2 - R * R
            return kappa * e * e, c * kappa * (e * e * m2 + e**4 / 6)
    else:
        raise ValueError(f"unknown shape {shape!r}; expected one of {SHAPES}")
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def family_shades(shape, family, eps, N, scale=1.0, kappa=0.5):
    """``(chi, g)`` sampled on the cube at resolution ``N``."""
    p = holder_polynomial(shape, scale)
    spec = SublevelSet(p)
    chi = sample_shade(spec, N)
    if family == "dilation":
        z = chi.centers()
        if shape == "orthant":
            vals = (z.real * z.imag >= 0) | (np.minimum(np.abs(z.real), np.abs(z.imag)) <= eps)
        else:
            vals = np.abs(z) >= HOLE_RADIUS - eps
        return chi, ShadeFunction(vals.astype(float), chi.bbox)
    if family == "level_shift":
        pert = Perturbation("dilation", eps * 1.0)
    elif family == "translation":
        pert = Perturbation("translation", eps, direction=1j if shape == "orthant" else 1.0)
    elif family == "smudge":
        center = complex(eps / 2, eps / 2) if shape == "orthant" else SMUDGE_CENTER
        pert = Perturbation("smudge", eps, center=center, kappa=kappa)
    else:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return chi, sample_shade(spec, N, perturbation=pert)


def _grid_gap(p, chi, g):
    z = chi.centers()
    return float(np.sum(p(z.real, z.imag) * (chi.values - g.values)) * chi.cell_area)


@dataclass
class HolderConfig:
    shape: str = "orthant"
    family: str = "dilation"
    eps_grid: tuple = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
    scale: float = 1.0
    kappa: float = 0.5
    grid_n: int = 0  # 0 skips the grid cross-check
    ball_C: float = 2.0
    seed: int = 42

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        eps = tuple(float(e) for e in self.eps_grid)
        if not eps or any(e <= 0 for e in eps):
            raise ValueError("eps grid must be non-empty and positive")
        if any(a <= b for a, b in zip(eps, eps[1:])):
            raise ValueError("eps grid must be strictly decreasing")
        self.eps_grid = eps
        if not self.scale > 0 or not self.ball_C > 0:
            raise ValueError("scale and ball_C must be positive")


@dataclass
class HolderRecord:
    eps: float
    l1: float
    gap: float
    ratio: float
    in_ball: bool
    source: str = "closed-form"
    grid_l1: Optional[float] = None
    grid_gap: Optional[float] = None


@dataclass
class HolderExperiment:
    p: RealPoly
    alpha: AdmissibleIndex
    family: str
    eps_grid: tuple
    records: list
    ball_radius: float
    max_ratio: float
    implied_C: float
    ratio_slope: float
    gap_slope: float
    bounded: bool
    notes: list = field(default_factory=list)


def run_holder_experiment(cfg: HolderConfig) -> HolderExperiment:
    """Fill one ratio record per ``eps`` and test for blow-up as ``eps -> 0``.

    The sequence counts as bounded when the log-log slope of the ratio
    against ``eps`` is at least ``-0.1`` over the records inside the validity
    ball ``||chi - g||_1 <= ball_C |p_alpha|**(1/|alpha|) / (4 d)``. The
    implied constant solves ``max ratio = C**|alpha| (1 + |alpha|)``.
    """
    p = holder_polynomial(cfg.shape, cfg.scale)
    alpha = min(find_admissible(p), key=lambda a: (a.order, a.alpha))
    k = alpha.order
    radius = cfg.ball_C * abs(alpha.coeff) ** (1 / k) / (4 * p.degree)
    records, notes = [], []
    for eps in cfg.eps_grid:
        l1, gap = closed_form_family(cfg.shape, cfg.family, eps, cfg.scale, cfg.kappa)
        rec = HolderRecord(eps, l1, abs(gap), l1 ** (k + 1) / abs(gap) if gap else 0.0, l1 <= radius)
        if cfg.grid_n:
            chi, g = family_shades(cfg.shape, cfg.family, eps, cfg.grid_n, cfg.scale, cfg.kappa)
            rec.grid_l1 = grid_l1(chi, g)
            rec.grid_gap = abs(_grid_gap(p, chi, g))
        if not rec.in_ball:
            notes.append(f"eps={eps:g}: ||chi-g||_1={l1:.4g} exceeds ball radius {radius:.4g}")
        records.append(rec)
    used = [r for r in records if r.in_ball and r.gap > 0]
    max_ratio = max((r.ratio for r in used), default=0.0)
    slope = _lstsq_slope([r.eps for r in used], [r.ratio for r in used]) if len(used) >= 2 else float("nan")
    gap_slope = _lstsq_slope([r.l1 for r in used], [r.gap for r in used]) if len(used) >= 2 else float("nan")
    bounded = bool(len(used) >= 2 and slope >= -0.1)
    return HolderExperiment(
        p=p,
        alpha=alpha,
        family=cfg.family,
        eps_grid=cfg.eps_grid,
        records=records,
        ball_radius=radius,
        max_ratio=max_ratio,
        implied_C=(max_ratio / (1 + k)) ** (1 / k),
        ratio_slope=slope,
        gap_slope=gap_slope,
        bounded=bounded,
        notes=notes,
    )


# --------------------------------------------------------------------------
# exponential-transform perturbation bounds


def C3(R) -> float:
    """``2 / (pi (R-1)**2) * exp(4 / (pi (R-1)**2))`` for ``R > 1``."""
    if not R > 1:
        raise ValueError("C3(R) needs R > 1")
    a = 2.0 / (math.pi * (R - 1) ** 2)
    return a * math.exp(2 * a)


@dataclass
class PerturbBoundRecord:
    points: np.ndarray  # evaluation points, or (k, l) index pairs for b-gaps
    left: np.ndarray
    right: np.ndarray
    l1: float
    tolerance: float

    @property
    def margin(self):
        return self.right - self.left

    @property
    def violations(self) -> int:
        return int(np.count_nonzero(self.margin < -self.tolerance))

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margin)) if self.margin.size else float("inf")


def check_diagonal_bound(f: ShadeFunction, g: ShadeFunction, zs, tolerance=1e-3) -> PerturbBoundRecord:
    """``|E_f(z, conj z) - E_g(z, conj z)|`` against ``2 ||f - g||_1 / (pi dist(z, K)**2)``.

    ``K`` is the union of both supports; points closer than 0.1 to it are
    rejected.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex)).ravel()
    dist = support_distance(f, zs, extra=g)
    if np.any(dist < MIN_DISTANCE):
        bad = zs[dist < MIN_DISTANCE][0]
        raise ValueError(f"point {bad} is closer than {MIN_DISTANCE} to the support")
    l1 = grid_l1(f, g)
    left = np.abs(eval_diagonal(f, zs) - eval_diagonal(g, zs))
    right = 2.0 * l1 / (np.pi * dist**2)
    return PerturbBoundRecord(zs, left, right, l1, tolerance)


def check_bgap_bound(f, g, R=2.0, d=4, l1=None, tolerance=0.0) -> PerturbBoundRecord:
    """``|b_kl(f) - b_kl(g)|`` against ``C3(R) R**(k+l) ||f - g||_1`` for ``k, l <= d``.

    ``f`` and ``g`` are shade functions on one grid, or moment tables
    together with an explicit ``l1``.
    """
    if isinstance(f, ShadeFunction):
        if l1 is None:
            l1 = grid_l1(f, g)
        sf, sg = grid_moments(f, d), grid_moments(g, d)
    else:
        if l1 is None:
            raise ValueError("moment-table input needs an explicit l1 distance")
        sf, sg = f, g
    bf = s_to_b(_truncate(sf, d)).b
    bg = s_to_b(_truncate(sg, d)).b
    k, l = np.meshgrid(np.arange(d + 1), np.arange(d + 1), indexing="ij")
    left = np.abs(bf - bg).ravel()
    right = (C3(R) * float(R) ** (k + l) * l1).ravel()
    pts = np.column_stack([k.ravel(), l.ravel()])
    return PerturbBoundRecord(pts, left, right, float(l1), tolerance)


def _truncate(s: MomentTable2D, d) -> MomentTable2D:
    if s.d < d:
        raise ValueError(f"need moments up to order {d}, have {s.d}")
    return MomentTable2D(s.s[: d + 1, : d + 1], s.provenance)


def random_shade_pair(seed, N=64, radius=0.75):
    """Two gray shades on ``[-1, 1]**2`` supported in ``|zeta| <= radius``.

    ``f`` is a random gray disk, ``g`` adds a second gray disk and uniform
    noise on ``f``'s support.
    """
    rng = np.random.default_rng(seed)
    proto = ShadeFunction(np.zeros((N, N)))
    z = proto.centers()

    def blob():
        r = rng.uniform(0.1, 0.35)
        c = (radius - r) * rng.uniform(0, 1) * np.exp(2j * np.pi * rng.uniform())
        return np.abs(z - c) <= r

    a, b = blob(), blob()
    fv = a * rng.uniform(0.3, 1.0)
    gv = np.clip(fv + b * rng.uniform(0.0, 0.7) - a * rng.uniform(0, 0.2, size=z.shape), 0, 1)
    return ShadeFunction(fv, proto.bbox), ShadeFunction(gv, proto.bbox)


def random_exterior_points(seed, count=100, rmin=0.9, rmax=3.0):
    rng = np.random.default_rng(seed)
    r = rng.uniform(rmin, rmax, count)
    return r * np.exp(2j * np.pi * rng.uniform(size=count))


# --------------------------------------------------------------------------
# quadrature domains with common nodes


def bidegree(q, tol=1e-10):
    """``(max i, max j)`` over entries ``|q[i, j]| > tol``; ``(-1, -1)`` if none."""
    q = np.asarray(getattr(q, "q", q))
    idx = np.argwhere(np.abs(q) > tol)
    if not idx.size:
        return (-1, -1)
    return int(idx[:, 0].max()), int(idx[:, 1].max())


def _exact_moments(spec, order):
    if isinstance(spec, Disk):
        return disk_moments(spec.center, spec.radius, order)
    if isinstance(spec, ConformalImage):
        return conformal_moments(spec.phi, order)
    raise TypeError(f"{type(spec).__name__} is not a supported quadrature domain")


def _pad(q, size):
    out = np.zeros((size, size), dtype=complex)
    out[: q.shape[0], : q.shape[1]] = q
    return out


@dataclass
class TwoDomainsReport:
    degree: int
    nodes: np.ndarray
    left: float
    integral: complex
    integral_source: str
    right: float
    implied_constant: Optional[float]
    reference_constant: float
    consistent: bool
    difference_bidegree: tuple
    same_weights: bool
    grid_integral: Optional[complex] = None


def _concentric_integral(r1, r2):
    # int (|u|**2 - r1**2) (chi_1 - chi_2) dA over the annulus between r1 and r2
    return complex(-math.pi * (r2 * r2 - r1 * r1) ** 2 / 2 * np.sign(r2 - r1))


def two_domains_experiment(spec1, spec2, order=4, N=512, C=2.0, node_tol=1e-8, sup_samples=401):
    """Compare ``sup_{|z|<2} |Q_1 - Q_2|`` with ``|int Q_1 (chi_1 - chi_2) dA|**(1/(2d+1))``.

    Both domains are reconstructed from exact moments up to ``order``; their
    nodes must agree. The integral is closed-form for concentric disks and a
    midpoint sum on an ``N x N`` grid of the unit square otherwise (the grid
    value is always reported as a cross-check).
    """
    rep1 = reconstruct(_exact_moments(spec1, order))
    rep2 = reconstruct(_exact_moments(spec2, order))
    if rep1.degree != rep2.degree:
        raise ValueError(f"domains have different orders {rep1.degree} and {rep2.degree}")
    n1, n2 = rep1.quadrature, rep2.quadrature
    if n1 is None or n2 is None:
        raise ValueError("could not extract quadrature data for both domains")
    a1, a2 = np.sort_complex(np.repeat(n1.nodes, n1.multiplicities)), np.sort_complex(
        np.repeat(n2.nodes, n2.multiplicities)
    )
    if np.max(np.abs(a1 - a2)) > node_tol:
        raise ValueError(f"node mismatch: {a1} vs {a2}")
    d = rep1.degree
    size = d + 1
    dq = _pad(rep1.Q.q, size) - _pad(rep2.Q.q, size)

    r = np.linspace(0, 2, sup_samples)[:, None]
    th = np.linspace(0, 2 * np.pi, 4 * sup_samples, endpoint=False)[None, :]
    zz = (r * np.exp(1j * th)).ravel()
    k = np.arange(size)
    vals = np.einsum("pi,ij,pj->p", zz[:, None] ** k, dq, np.conj(zz)[:, None] ** k)
    left = float(np.max(np.abs(vals)))

    g1 = sample_shade(spec1, N, bbox=(-1, 1, -1, 1))
    g2 = sample_shade(spec2, N, bbox=(-1, 1, -1, 1))
    u = g1.centers()
    unit = np.abs(u) <= 1
    grid_int = complex(np.sum(rep1.Q(u) * (g1.values - g2.values) * unit) * g1.cell_area)
    if isinstance(spec1, Disk) and isinstance(spec2, Disk) and spec1.center == spec2.center:
        integral, source = _concentric_integral(spec1.radius, spec2.radius), "closed-form"
    else:
        integral, source = grid_int, "grid"
    right = abs(integral) ** (1.0 / (2 * d + 1))
    implied = left / right if right > 0 else None
    reference = 4 * C * 3 ** (2 * d)
    if implied is None:
        consistent = left <= 1e-8
    else:
        consistent = implied <= reference
    same_w = bool(
        np.allclose(n1.weights, n2.weights, atol=1e-8)
        and all(np.allclose(x, y, atol=1e-8) for x, y in zip(n1.derivative_weights, n2.derivative_weights))
    )
    return TwoDomainsReport(
        degree=d,
        nodes=a1,
        left=left,
        integral=integral,
        integral_source=source,
        right=right,
        implied_constant=implied,
        reference_constant=reference,
        consistent=bool(consistent),
        difference_bidegree=bidegree(dq),
        same_weights=same_w,
        grid_integral=grid_int,
    )


def rational_gap_experiment(spec, perturbation: Perturbation, points, order=4, N=512):
    """``|E_g(z, conj w) - Q / (P conj P)|`` for a perturbed quadrature domain ``g``.

    Returns the left sides at ``(z, w)`` pairs, the right side
    ``|int Q (chi - g) dA|**(1/(2d+1))`` and the implied constant.
    """
    rep = reconstruct(_exact_moments(spec, order))
    d = rep.degree
    bbox = (-1, 1, -1, 1)
    chi = sample_shade(spec, N, bbox=bbox)
    g = sample_shade(spec, N, bbox=bbox, perturbation=perturbation)
    pts = np.asarray(points, dtype=complex)
    z, w = (pts[:, 0], pts[:, 1]) if pts.ndim == 2 else (pts, pts)
    left = np.abs(eval_polarized(g, z, w) - rational_E(rep.Q, rep.P, z, w))
    u = chi.centers()
    integral = complex(np.sum(rep.Q(u) * (chi.values - g.values)) * chi.cell_area)
    right = abs(integral) ** (1.0 / (2 * d + 1))
    return {
        "degree": d,
        "left": left,
        "right": right,
        "integral": integral,
        "l1": grid_l1(chi, g),
        "implied_constant": float(np.max(left) / right) if right > 0 else None,
    }


# --------------------------------------------------------------------------
# job runner


def _max_workers():
    env = os.environ.get("MOMENTSHAPE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"MOMENTSHAPE_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def run_jobs(fn, jobs, max_workers=None):
    """Apply ``fn`` to each job on a thread pool; results come back in job order.

    The pool size is capped by ``MOMENTSHAPE_THREADS``. Each job must carry its
    own seed so results do not depend on scheduling.
    """
    jobs = list(jobs)
    if not jobs:
        return []
    workers = min(max_workers or _max_workers(), _max_workers(), len(jobs))
    if workers == 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))
