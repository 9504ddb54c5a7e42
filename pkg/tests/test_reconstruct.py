import math

import numpy as np
import pytest

from momentshape.domains import ConformalImage, MomentTable2D, conformal_moments, disk_moments, sample_shade
from momentshape.exptransform import ExpCoeffTable, eval_polarized, rational_E, s_to_b
from momentshape.reconstruct import (
    HermitianBivarPoly,
    NormalizationError,
    boundary_samples,
    degeneracy_degree,
    extract_Q,
    level_set_sign,
    node_polynomial,
    quadrature_residual,
    reconstruct,
    structure_check,
)


def two_disks(d=5):
    return MomentTable2D(disk_moments(-0.5, 0.3, d).s + disk_moments(0.4 + 0.1j, 0.25, d).s)


@pytest.mark.parametrize("a", [0j, 0.2 + 0.1j, -0.35j])
def test_disk_pipeline(a):
    r = 0.5 if a != -0.35j else 0.4
    rep = reconstruct(disk_moments(a, r, 3))
    assert rep.degree == 1 and rep.minimal
    assert np.allclose(rep.P, [-a, 1], atol=1e-10)
    q = np.array([[abs(a) ** 2 - r * r, -a], [-np.conj(a), 1]])
    assert np.allclose(rep.Q.q, q, atol=1e-10)
    qd = rep.quadrature
    assert abs(qd.nodes[0] - a) < 1e-8 and abs(qd.weights[0] - math.pi * r * r) < 1e-8
    assert qd.consistent and not qd.multiplicity_case
    assert abs(qd.gamma - r) < 1e-10


def test_disk_level_set():
    rep = reconstruct(disk_moments(0.2, 0.5, 3))
    assert level_set_sign(rep.Q, 0.2) < 0 and level_set_sign(rep.Q, 0.9) > 0
    assert abs(level_set_sign(rep.Q, 0.7)) < 1e-12
    rows = boundary_samples(rep.Q, n=11)
    assert rows.shape[1] == 3


def test_two_disk_union():
    # a union of disjoint disks has nodes at the centres and weights pi r**2
    rep = reconstruct(two_disks())
    assert rep.degree == 2 and rep.structure.ok and rep.structure.rank == 2
    qd = rep.quadrature
    assert np.allclose(qd.nodes, [-0.5, 0.4 + 0.1j], atol=1e-8)
    assert np.allclose(qd.weights, [math.pi * 0.09, math.pi * 0.0625], atol=1e-8)
    assert quadrature_residual(qd, two_disks()) < 1e-12


def test_conformal_double_node():
    # phi = z + c z**2: P_2 = z**2, int f = pi (1 + 2|c|**2) f(0) + pi conj(c) f'(0)
    c = 0.3
    s = conformal_moments([0, 1, c], 4)
    rep = reconstruct(s)
    assert rep.degree == 2
    assert np.allclose(rep.P, [0, 0, 1], atol=1e-10)
    qd = rep.quadrature
    assert qd.multiplicity_case and list(qd.multiplicities) == [2]
    assert abs(qd.weights[0] - math.pi * (1 + 2 * c * c)) < 1e-8
    assert abs(qd.derivative_weights[0][0] - math.pi * c) < 1e-8
    assert quadrature_residual(qd, s, 5) < 1e-12


def test_degeneracy_degree_and_spectrum():
    b = s_to_b(two_disks())
    deg = degeneracy_degree(b)
    assert deg.d_min == 2 and deg.degenerate
    assert abs(deg.spectrum[0]) < 1e-12
    # a single block of a non-degenerate table
    deg = degeneracy_degree(ExpCoeffTable(np.eye(3)))
    assert deg.d_min is None and not deg.degenerate


def test_node_polynomial_conjugation():
    # X = |u|**2-type rank-one data with a complex null vector
    a = 0.3 + 0.4j
    X = np.array([[1, np.conj(a)], [a, abs(a) ** 2]]) * 0.25
    node = node_polynomial(X)
    assert np.allclose(node.coeffs, [-a, 1], atol=1e-12)


def test_node_polynomial_tie_and_failure():
    node = node_polynomial(np.diag([1.0, 0.0, 0.0]))
    assert node.tie and np.allclose(node.coeffs, [0, 0, 1])
    with pytest.raises(NormalizationError):
        node_polynomial(np.diag([0.0, 0.0, 1.0]))
    with pytest.raises(NormalizationError):
        node_polynomial(np.diag([0.0, 1.0]))


def test_extract_Q_disk():
    b = s_to_b(disk_moments(0, 0.5, 2))
    Q = extract_Q(b, [0, 1])
    assert np.allclose(Q.q, [[-0.25, 0], [0, 1]], atol=1e-14)
    with pytest.raises(ValueError):
        extract_Q(ExpCoeffTable(np.zeros((1, 1))), [0, 0, 0, 1])


def test_structure_check_rejects_indefinite():
    # |z|**2 + 1 would need a negative square
    rep = structure_check(HermitianBivarPoly(np.array([[1.0, 0], [0, 1.0]])))
    assert not rep.ok


def test_rational_form_matches_grid():
    spec = ConformalImage((0, 0.6, 0.15))
    rep = reconstruct(conformal_moments(spec.phi, 4))
    g = sample_shade(spec, 512, (-1, 1, -1, 1))
    z = np.array([1.3, -1.2j, 1 + 1j])
    w = np.array([1.4j, 1.25, -1.1])
    assert np.max(np.abs(rational_E(rep.Q, rep.P, z, w) - eval_polarized(g, z, w))) < 5e-3


def test_reconstruct_modes():
    with pytest.raises(ValueError):
        reconstruct(disk_moments(0, 0.5, 2), mode="bogus")
    rep = reconstruct(s_to_b(disk_moments(0, 0.5, 3)), mode="lowest", max_degree=2)
    assert rep.degree == 2 and not rep.minimal
