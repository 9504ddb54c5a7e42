"""Volumes of polynomial sublevel sets ``{|p| < delta}`` in a cube.

``find_admissible`` enumerates the multi-indices that are lexicographically
maximal over the support under some ordering of the coordinates; the
exponent ``1/|alpha|`` of such an index controls how fast the volume of
``{|p| < delta} n [-1, 1]**n`` can shrink. ``mc_sublevel_volume`` and
``check_vol_ratio`` measure that volume by Monte Carlo.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .polynomials import RealPoly

__all__ = [
    "RealPoly",
    "AdmissibleIndex",
    "VolumeEstimate",
    "RatioRow",
    "RatioTable",
    "find_admissible",
    "mc_sublevel_volume",
    "check_vol_ratio",
    "delta_threshold",
]

CHUNK = 1 << 17


@dataclass(frozen=True)
class AdmissibleIndex:
    alpha: tuple
    sigma: tuple  # 0-based coordinate order, most significant first
    coeff: float

    @property
    def order(self) -> int:
        return sum(self.alpha)


@dataclass(frozen=True)
class VolumeEstimate:
    estimate: float
    stderr: float
    samples: int


@dataclass(frozen=True)
class RatioRow:
    delta: float
    volume: float
    stderr: float
    ratio: float
    ratio_stderr: float


@dataclass
class RatioTable:
    alpha: AdmissibleIndex
    rows: list
    bound: float
    bounded: bool


def _dominates(alpha, beta, sigma):
    for i in sigma:
        if alpha[i] != beta[i]:
            return alpha[i] > beta[i]
    return False


def find_admissible(p: RealPoly):
    """All ``(alpha, sigma)`` with ``alpha`` lexicographically above every other support index.

    Exhaustive over the support and all ``n!`` orderings (``n <= 6``).
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no admissible multi-index")
    if p.n > 6:
        raise ValueError("exhaustive permutation search is limited to n <= 6")
    support = p.support
    found = []
    for alpha in support:
        for sigma in itertools.permutations(range(p.n)):
            if all(_dominates(alpha, beta, sigma) for beta in support if beta != alpha):
                found.append(AdmissibleIndex(alpha, sigma, p.terms[alpha]))
    return found


def _uniform_chunks(n, samples, r, seed):
    ss = np.random.SeedSequence(seed)
    nchunks = max(1, math.ceil(samples / CHUNK))
    for k, child in enumerate(ss.spawn(nchunks)):
        size = min(CHUNK, samples - k * CHUNK)
        yield np.random.default_rng(child).uniform(-r, r, size=(size, n))


def _abs_values(p, samples, r, seed):
    return np.concatenate([np.abs(p(*x.T)) for x in _uniform_chunks(p.n, samples, r, seed)])


def _estimate(hits, samples, n, r):
    vol = (2.0 * r) ** n
    frac = hits / samples
    return VolumeEstimate(vol * frac, vol * math.sqrt(frac * (1 - frac) / samples), samples)


def mc_sublevel_volume(p: RealPoly, delta, r=1.0, samples=1_000_000, seed=42) -> VolumeEstimate:
    """Monte Carlo volume of ``{|p| < delta} n [-r, r]**n`` with its binomial standard error.

    Samples are drawn in fixed-size chunks from independent substreams of
    ``seed``, so the estimate does not depend on how chunks are scheduled.
    """
    if not delta > 0 or not r > 0:
        raise ValueError("delta and r must be positive")
    hits = int(np.count_nonzero(_abs_values(p, samples, r, seed) < delta))
    return _estimate(hits, samples, p.n, r)


def delta_threshold(p: RealPoly, alpha: AdmissibleIndex) -> float:
    """Largest admissible ``delta``: ``|p_alpha| / (4 d)**|alpha|``."""
    return abs(alpha.coeff) / (4 * p.degree) ** alpha.order


def check_vol_ratio(p: RealPoly, alpha: AdmissibleIndex, deltas, samples=1_000_000, seed=42) -> RatioTable:
    """Tabulate ``vol(V_delta n [-1,1]**n) / delta**(1/|alpha|)`` over a delta grid.

    All deltas must lie below :func:`delta_threshold`. One sample cloud is
    shared across the grid. The table is flagged unbounded when some ratio,
    lowered by four standard errors, exceeds twice the larger of ``2**n`` and
    the ratio at the largest delta.
    """
    deltas = sorted((float(x) for x in deltas), reverse=True)
    thr = delta_threshold(p, alpha)
    for dl in deltas:
        if not 0 < dl < thr:
            raise ValueError(f"delta={dl} violates 0 < delta < {thr:.4g}")
    absval = _abs_values(p, samples, 1.0, seed)
    gamma = 1.0 / alpha.order
    rows = []
    for dl in deltas:
        est = _estimate(int(np.count_nonzero(absval < dl)), samples, p.n, 1.0)
        scale = dl**gamma
        rows.append(RatioRow(dl, est.estimate, est.stderr, est.estimate / scale, est.stderr / scale))
    bound = 2.0 * max(2.0**p.n, rows[0].ratio)
    bounded = all(row.ratio - 4 * row.ratio_stderr <= bound for row in rows)
    return RatioTable(alpha, rows, bound, bounded)
