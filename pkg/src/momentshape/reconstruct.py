"""Shape from moments for planar quadrature domains.

Pipeline: ``X = [b_kl]`` -> minimal degenerate degree ``d`` -> monic node
polynomial ``P_d`` from the (near) null vector of ``X`` -> defining polynomial
``Q(z, conj(w))`` as the polynomial part of ``P_d(z) conj(P_d(w)) (1 - sum b_kl
z**-(k+1) conj(w)**-(l+1))`` -> lower polynomials ``P_j`` from
``|P_d|**2 - Q`` -> nodes and weights of the quadrature identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as npoly

from .domains import MomentTable2D
from .exptransform import ExpCoeffTable, b_to_s, s_to_b
from .linalg import hermitian_eigen, poly_roots, polyval

__all__ = [
    "HermitianBivarPoly",
    "QuadratureData",
    "StructureReport",
    "NodePolynomial",
    "Degeneracy",
    "ReconstructionReport",
    "NormalizationError",
    "degeneracy_degree",
    "node_polynomial",
    "extract_Q",
    "structure_check",
    "extract_quadrature_data",
    "quadrature_residual",
    "reconstruct",
    "level_set_sign",
    "boundary_samples",
    "hermitian_eigen",
    "poly_roots",
]

DEFAULT_TOL = 1e-8


class NormalizationError(ValueError):
    """The selected eigenvector has (almost) no ``z**d`` component."""

    def __init__(self, message, eigenvector, eigenvalues):
        super().__init__(message)
        self.eigenvector = eigenvector
        self.eigenvalues = eigenvalues


@dataclass
class HermitianBivarPoly:
    """``Q(z, conj(w)) = sum q[i, j] z**i conj(w)**j`` with ``q`` Hermitian."""

    q: np.ndarray

    def __post_init__(self):
        self.q = np.array(self.q, dtype=complex)
        if self.q.ndim != 2 or self.q.shape[0] != self.q.shape[1]:
            raise ValueError(f"coefficient matrix must be square, got {self.q.shape}")

    @property
    def d(self) -> int:
        return self.q.shape[0] - 1

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.q - self.q.conj().T)))

    def leading_polynomial(self):
        """``P_d`` read off the top row: ``q[d, j] = conj(p_j)`` when ``q[d, d] = 1``."""
        return np.conj(self.q[self.d, :]) / self.q[self.d, self.d].real

    def __call__(self, z, w=None):
        z = np.asarray(z, dtype=complex)
        w = z if w is None else np.asarray(w, dtype=complex)
        zz, ww = np.broadcast_arrays(z, w)
        k = np.arange(self.d + 1)
        val = np.einsum("...i,ij,...j->...", zz[..., None] ** k, self.q, np.conj(ww)[..., None] ** k)
        return val


@dataclass
class Degeneracy:
    d_min: Optional[int]
    spectrum: np.ndarray
    degenerate: bool


@dataclass
class NodePolynomial:
    coeffs: np.ndarray  # ascending, monic
    eigenvalue: float
    gap: float
    tie: bool
    eigenvector: np.ndarray


@dataclass
class StructureReport:
    ok: bool
    eigenvalues: np.ndarray
    rank: int
    lower: list  # P_0 ... P_{d-1}, ascending coefficients, None where the pivot vanished
    gamma: float
    top_row_defect: float


@dataclass
class QuadratureData:
    """Nodes with multiplicities and weights of ``int f dA = sum_j sum_r c[j][r] f^(r)(a_j)``.

    ``weights`` holds the point-value weights ``c[j][0]`` (positive);
    ``derivative_weights[j]`` lists ``c[j][1:]`` for a node of multiplicity
    above one.
    """

    nodes: np.ndarray
    weights: np.ndarray
    multiplicities: np.ndarray
    derivative_weights: list
    gamma: float
    area_from_weights: float
    area_from_moments: float
    sign: int
    consistent: bool

    @property
    def d(self) -> int:
        return int(np.sum(self.multiplicities))

    @property
    def multiplicity_case(self) -> bool:
        return bool(np.any(self.multiplicities > 1))

    def apply(self, m):
        """Quadrature value for ``f(z) = z**m``."""
        total = 0j
        for a, c0, rest in zip(self.nodes, self.weights, self.derivative_weights):
            cs = [c0] + list(rest)
            for r, c in enumerate(cs):
                if r <= m:
                    total += c * math.perm(m, r) * a ** (m - r)
        return total


@dataclass
class ReconstructionReport:
    degree: int
    spectrum: np.ndarray
    minimal: bool
    degenerate: bool
    P: np.ndarray
    Q: HermitianBivarPoly
    structure: StructureReport
    quadrature: Optional[QuadratureData]
    diagnostics: dict = field(default_factory=dict)


# --------------------------------------------------------------------------


def _spectrum(X):
    w, V = hermitian_eigen(0.5 * (X + X.conj().T))
    return w, V


def degeneracy_degree(b: ExpCoeffTable, tol=DEFAULT_TOL, max_degree=None) -> Degeneracy:
    """Smallest ``d`` whose leading ``(d+1) x (d+1)`` block of ``X`` is numerically singular.

    Singular means smallest eigenvalue ``< tol *`` largest eigenvalue. If no
    block up to ``max_degree`` qualifies the result is non-degenerate and
    carries the spectrum of the last block examined.
    """
    top = b.d if max_degree is None else min(max_degree, b.d)
    w = np.zeros(0)
    for d in range(top + 1):
        w, _ = _spectrum(b.block(d))
        if w[-1] <= 0.0 or w[0] < tol * w[-1]:
            return Degeneracy(d, w, True)
    return Degeneracy(None, w, False)


def node_polynomial(X, tie_tol=1e-10) -> NodePolynomial:
    """Monic ``P_d`` from the eigenvector of the smallest eigenvalue of ``X``.

    ``u X = 0`` for a row vector ``u`` means ``X conj(u) = 0``, so the
    coefficient vector is the conjugated eigenvector scaled to end in 1.
    When several eigenvalues tie for the minimum the vector of that
    eigenspace with the largest last entry is used and ``tie`` is set.
    """
    X = np.asarray(X, dtype=complex)
    w, V = _spectrum(X)
    scale = max(abs(w[-1]), 1e-300)
    gap = float(w[1] - w[0]) if w.size > 1 else math.inf
    tie = w.size > 1 and gap <= tie_tol * scale
    v = V[:, 0]
    if tie:
        cluster = V[:, w - w[0] <= tie_tol * scale]
        e = np.zeros(X.shape[0], dtype=complex)
        e[-1] = 1.0
        v = cluster @ (cluster.conj().T @ e)
        norm = np.linalg.norm(v)
        if norm < 1e-10:
            raise NormalizationError("minimal eigenspace is orthogonal to the leading coefficient", v, w)
        v = v / norm
    if abs(v[-1]) < 1e-10:
        raise NormalizationError(
            f"eigenvector has last entry {abs(v[-1]):.2e}; cannot normalise to a monic polynomial",
            v,
            w,
        )
    p = np.conj(v) / np.conj(v[-1])
    p[-1] = 1.0
    return NodePolynomial(p, float(w[0]), gap, bool(tie), v)


def extract_Q(b: ExpCoeffTable, P) -> HermitianBivarPoly:
    """Polynomial part of ``P(z) conj(P(w)) (1 - sum b_kl z**-(k+1) conj(w)**-(l+1))``.

    Only ``b_kl`` with ``k, l < d`` reach nonnegative powers.
    """
    p = np.asarray(P, dtype=complex)
    d = p.size - 1
    if d > b.d + 1:
        raise ValueError(f"degree {d} node polynomial needs b up to order {d - 1}, have {b.d}")
    q = np.outer(p, p.conj())
    if d >= 1:
        shift = np.zeros((d + 1, d), dtype=complex)
        for i in range(d + 1):
            for k in range(d):
                if i + k + 1 <= d:
                    shift[i, k] = p[i + k + 1]
        q = q - shift @ b.b[:d, :d] @ shift.conj().T
    q = q / q[d, d].real
    q = 0.5 * (q + q.conj().T)
    return HermitianBivarPoly(q)


def structure_check(Q: HermitianBivarPoly, tol=1e-8) -> StructureReport:
    """Check that ``|P_d|**2 - Q`` is a sum of ``|P_j|**2`` with ``deg P_j = j < d``.

    The difference matrix must be PSD (smallest eigenvalue ``>= -tol`` times
    its scale) with a vanishing ``z**d`` row. The ``P_j`` are peeled off from
    the highest degree down, a Cholesky factorisation in reverse order.
    """
    d = Q.d
    p = Q.leading_polynomial()
    D = np.outer(p, p.conj()) - Q.q
    D = 0.5 * (D + D.conj().T)
    scale = max(1.0, float(np.max(np.abs(Q.q))))
    top_defect = float(np.max(np.abs(D[d, :])))
    w, _ = _spectrum(D[:d, :d]) if d >= 1 else (np.zeros(0), None)
    wmax = float(w[-1]) if w.size else 0.0
    rank = int(np.sum(w > tol * max(wmax, 1e-300))) if wmax > 0 else 0
    ok = bool((w.size == 0 or w[0] >= -tol * scale) and top_defect <= tol * scale)

    lower = [None] * d
    R = D[:d, :d].copy()
    for j in range(d - 1, -1, -1):
        pivot = R[j, j].real
        if pivot <= tol * scale:
            continue
        col = R[: j + 1, j] / math.sqrt(pivot)
        lower[j] = col.copy()
        R[: j + 1, : j + 1] -= np.outer(col, col.conj())
    gamma = float(lower[d - 1][-1].real) if d >= 1 and lower[d - 1] is not None else 0.0
    return StructureReport(ok, w, rank, lower, gamma, top_defect)


def _cluster_roots(roots, tol):
    clusters = []
    for r in roots:
        for c in clusters:
            if abs(np.mean(c) - r) <= tol:
                c.append(r)
                break
        else:
            clusters.append([r])
    centres = np.array([np.mean(c) for c in clusters])
    mults = np.array([len(c) for c in clusters])
    order = np.lexsort((centres.imag, centres.real))
    return centres[order], mults[order]


def _taylor(coeffs, a, m):
    """First ``m`` Taylor coefficients of a polynomial at ``a``."""
    out = np.zeros(m, dtype=complex)
    c = np.asarray(coeffs, dtype=complex)
    for i in range(m):
        out[i] = polyval(c, a) / math.factorial(i) if c.size else 0.0
        c = npoly.polyder(c) if c.size > 1 else np.zeros(0)
    return out


def _series_div(num, den, m):
    out = np.zeros(m, dtype=complex)
    for i in range(m):
        acc = num[i] - np.dot(den[1 : i + 1], out[i - 1 :: -1][:i]) if i else num[0]
        out[i] = acc / den[0]
    return out


def extract_quadrature_data(structure: StructureReport, P, b: ExpCoeffTable, cluster_tol=1e-6) -> QuadratureData:
    """Nodes and weights from ``gamma P_{d-1} / P_d = (1/pi) sum c_j / (z - a_j)``.

    Nodes are the zeros of ``P_d``; roots closer than ``cluster_tol`` merge
    into one node of higher multiplicity, whose derivative weights come from
    the higher-order poles. Both global signs are tried and the one giving
    positive point weights is kept.
    """
    P = np.asarray(P, dtype=complex)
    d = P.size - 1
    if d < 1:
        raise ValueError("node polynomial must have degree >= 1")
    lower = structure.lower[d - 1]
    if lower is None:
        raise ValueError("structure check found no P_{d-1}; cannot extract weights")
    gamma = structure.gamma
    num = gamma * np.asarray(lower, dtype=complex)

    roots = poly_roots(P)
    scale = 1.0 + float(np.max(np.abs(roots)))
    nodes, mults = _cluster_roots(roots, cluster_tol * scale)

    residues = []
    for j, (a, m) in enumerate(zip(nodes, mults)):
        den = np.array([1.0 + 0j])
        for k, (ak, mk) in enumerate(zip(nodes, mults)):
            if k != j:
                den = npoly.polymul(den, npoly.polypow([-ak, 1.0], mk))
        h = _series_div(_taylor(num, a, m), _taylor(den, a, m), m)
        # coefficient of (z - a)**-(r+1) is h[m-1-r]
        residues.append([h[m - 1 - r] for r in range(m)])

    area_moments = float(np.pi * b.b[0, 0].real)
    best = None
    for sign in (1, -1):
        cs = [[sign * np.pi * A / math.factorial(r) for r, A in enumerate(res)] for res in residues]
        point = np.array([c[0] for c in cs])
        positive = np.all(point.real > 0) and np.all(np.abs(point.imag) <= 1e-6 * np.abs(point))
        if positive:
            best = (sign, cs)
            break
    consistent = best is not None
    if best is None:
        best = (1, [[np.pi * A / math.factorial(r) for r, A in enumerate(res)] for res in residues])
    sign, cs = best
    weights = np.array([c[0].real for c in cs])
    derivs = [list(c[1:]) for c in cs]
    area_w = float(np.sum(weights))
    consistent = consistent and abs(area_w - area_moments) <= 1e-6 * max(1.0, area_moments)
    consistent = consistent and abs(gamma**2 - area_moments / np.pi) <= 1e-6 * max(1.0, area_moments)
    return QuadratureData(nodes, weights, mults, derivs, gamma, area_w, area_moments, sign, bool(consistent))


def quadrature_residual(qd: QuadratureData, s: MomentTable2D, max_power=None):
    """``max_m |s_m0 - sum c f(a)|`` over the analytic monomials ``z**m``."""
    top = s.d if max_power is None else min(max_power, s.d)
    return max(abs(s.s[m, 0] - qd.apply(m)) for m in range(top + 1))


def reconstruct(data, tol=DEFAULT_TOL, max_degree=None, mode="null") -> ReconstructionReport:
    """Run the full pipeline on a :class:`MomentTable2D` or :class:`ExpCoeffTable`.

    ``mode="null"`` uses the minimal degenerate degree; when ``X`` is not
    degenerate, or in ``mode="lowest"``, the lowest eigenvector of the block
    at ``max_degree`` (default: the data order) is used and the resulting
    ``Q`` is only an approximate defining polynomial.
    """
    if mode not in ("null", "lowest"):
        raise ValueError(f"mode must be 'null' or 'lowest', got {mode!r}")
    if isinstance(data, MomentTable2D):
        s = data
        b = s_to_b(s)
    else:
        b = data
        s = b_to_s(b)
    top = b.d if max_degree is None else min(max_degree, b.d)
    deg = degeneracy_degree(b, tol, top)
    if mode == "null" and deg.degenerate:
        d = deg.d_min
    else:
        d = top
    diagnostics = {}
    if d == 0:
        raise ValueError("moment data is degenerate at degree 0 (empty shape)")
    node = node_polynomial(b.block(d))
    diagnostics["eigen_gap"] = node.gap
    diagnostics["eigen_tie"] = node.tie
    diagnostics["lowest_eigenvalue"] = node.eigenvalue
    Q = extract_Q(b, node.coeffs)
    structure = structure_check(Q)
    diagnostics["q_hermitian_defect"] = Q.hermitian_defect()
    quad = None
    if structure.ok and structure.lower[d - 1] is not None:
        try:
            quad = extract_quadrature_data(structure, node.coeffs, b)
        except Exception as exc:  # report, do not abort the reconstruction
            diagnostics["quadrature_error"] = str(exc)
        else:
            diagnostics["quadrature_residual"] = float(quadrature_residual(quad, s))
            diagnostics["multiplicity_case"] = quad.multiplicity_case
    spectrum = _spectrum(b.block(d))[0]
    return ReconstructionReport(
        degree=d,
        spectrum=spectrum,
        minimal=bool(deg.degenerate and mode == "null"),
        degenerate=deg.degenerate,
        P=node.coeffs,
        Q=Q,
        structure=structure,
        quadrature=quad,
        diagnostics=diagnostics,
    )


def level_set_sign(Q: HermitianBivarPoly, z):
    """Real part of ``Q(z, conj(z))``; negative inside the reconstructed domain."""
    return np.real(Q(z))


def boundary_samples(Q: HermitianBivarPoly, bbox=(-1.5, 1.5, -1.5, 1.5), n=201):
    """Grid points adjacent to a sign change of ``Q(z, conj(z))``: rows ``(x, y, Q)``."""
    xs = np.linspace(bbox[0], bbox[1], n)
    ys = np.linspace(bbox[2], bbox[3], n)
    Z = xs[None, :] + 1j * ys[:, None]
    val = level_set_sign(Q, Z)
    neg = val < 0
    edge = np.zeros_like(neg)
    edge[:, :-1] |= neg[:, :-1] != neg[:, 1:]
    edge[:-1, :] |= neg[:-1, :] != neg[1:, :]
    iy, ix = np.nonzero(edge)
    return np.column_stack([xs[ix], ys[iy], val[iy, ix]])
