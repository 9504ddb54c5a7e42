"""
Perturbing the exponential transform
====================================

Away from the support, E_f(z, conj z) moves by at most
2 ||f - g||_1 / (pi dist(z, K)**2). Each coefficient b_kl moves by at most
C3(R) R**(k+l) ||f - g||_1. For two quadrature domains with the same nodes,
the defining polynomials differ by a controlled power of an integral.
"""
import numpy as np

from momentshape import Disk, Perturbation
from momentshape.stability import (
    C3,
    check_bgap_bound,
    check_diagonal_bound,
    random_exterior_points,
    random_shade_pair,
    rational_gap_experiment,
    two_domains_experiment,
)

f, g = random_shade_pair(seed=3)
rec = check_diagonal_bound(f, g, random_exterior_points(4, 100))
print(f"||f - g||_1 = {rec.l1:.4f}; worst left/right = {np.max(rec.left / rec.right):.3f}; violations {rec.violations}")

b = check_bgap_bound(f, g, R=2.0, d=4)
print(f"C3(2) = {C3(2.0):.4f}; b-gap worst left/right = {np.max(b.left / b.right):.3f}; violations {b.violations}")

rep = two_domains_experiment(Disk(0, 0.4), Disk(0, 0.5))
print(f"\nconcentric disks: left {rep.left:.4f}, integral {rep.integral.real:.6f}, right {rep.right:.4f}")
print(f"implied constant {rep.implied_constant:.3f}, reference 4*2*3^(2d) = {rep.reference_constant:g}")

for e in (0.08, 0.04, 0.02, 0.01):
    out = rational_gap_experiment(Disk(0, 0.5), Perturbation("dilation", e), [1.5, 2j, -1.2 + 1.2j], N=512)
    print(f"dilation {e}: max |E_g - Q/PP*| = {out['left'].max():.2e}, right {out['right']:.3f}, ratio {out['implied_constant']:.3f}")
