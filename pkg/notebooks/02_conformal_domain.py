"""
A quadrature domain with a double node
======================================

phi(z) = z + 0.3 z**2 maps the unit disk onto a cardioid-like domain.
Pulling integrals back through phi gives

    int f dA = pi (1 + 2 * 0.09) f(0) + pi * 0.3 f'(0),

one node of multiplicity two. The reconstruction finds P_2 = z**2 and
both weights, and the rational form of the transform agrees with direct
quadrature on a grid.
"""
import warnings

import numpy as np

from momentshape import ConformalImage, OutsideUnitDiskWarning, conformal_moments, reconstruct, sample_shade
from momentshape.exptransform import eval_polarized, rational_E
from momentshape.reconstruct import quadrature_residual

warnings.simplefilter("ignore", OutsideUnitDiskWarning)  # the image pokes out of the unit disk

spec = ConformalImage((0, 1, 0.3))
s = conformal_moments(spec.phi, 4)
rep = reconstruct(s)
qd = rep.quadrature

print("degree:", rep.degree, " P:", np.round(rep.P, 10))
print("nodes:", qd.nodes, " multiplicities:", qd.multiplicities)
print("point weight / pi:", qd.weights[0] / np.pi, "(expected 1.18)")
print("derivative weight / pi:", qd.derivative_weights[0][0] / np.pi, "(expected 0.3)")
print("quadrature residual on z^m, m <= 4:", quadrature_residual(qd, s))

# the structure matrix |P_2|^2 - Q is a sum of two squares
print("structure eigenvalues:", rep.structure.eigenvalues)

g = sample_shade(spec, 512)
rng = np.random.default_rng(0)
z = 2.0 * np.exp(2j * np.pi * rng.uniform(size=6))
w = 1.7 * np.exp(2j * np.pi * rng.uniform(size=6))
exact = rational_E(rep.Q, rep.P, z, w)
grid = eval_polarized(g, z, w)
for zi, wi, e, q in zip(z, w, exact, grid):
    print(f"z={zi:.2f} w={wi:.2f}  rational {e:.5f}  grid {q:.5f}")
