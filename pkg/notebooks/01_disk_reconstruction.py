"""
Recovering a disk from its moments
==================================

A disk is the simplest quadrature domain: the mean value property says
int f dA = pi r**2 f(a) for every analytic f. Its exponential transform is
rational of degree one, and the whole pipeline can be checked by hand.
"""
import numpy as np

from momentshape import disk_moments, reconstruct, s_to_b

a, r = 0.2 + 0.1j, 0.5
s = disk_moments(a, r, 3)
print("moments s_kl (k, l <= 3):")
print(np.round(s.s, 5))

# The transform coefficients are r**2 a**k conj(a)**l, a rank-one matrix.
b = s_to_b(s)
k = np.arange(4)
print("max |b - r^2 a^k conj(a)^l| =", np.abs(b.b - r * r * np.outer(a**k, np.conj(a) ** k)).max())

# Rank one means the 2 x 2 block is already singular, so d = 1.
rep = reconstruct(s)
print("degree:", rep.degree)
print("P_1 coefficients (ascending):", np.round(rep.P, 12))
print("Q(z, conj w) coefficients:")
print(np.round(rep.Q.q, 12))

qd = rep.quadrature
print("node:", qd.nodes[0], " weight / pi:", qd.weights[0] / np.pi)

# Q(z, conj z) < 0 exactly inside the disk
for z in (a, a + 0.49, a + 0.51):
    print(f"Q at {z:.2f}: {rep.Q(z).real:+.4f}")
