"""
Intervals from moments in one dimension
=======================================

For a union of d intervals the transform is prod (z - b_i) / (z - a_i),
so the Hankel matrix of its coefficients has rank d. The null vector gives
the left endpoints, a Pade step gives the right ones.
"""
import numpy as np

from momentshape import endpoints, hankel_rank, interval_moments, pade_recover, s_to_t
from momentshape.markov1d import hankel_matrix

ivs = [(-0.9, -0.6), (-0.2, 0.05), (0.4, 0.95)]
s = interval_moments(ivs, 9)
t = s_to_t(s)
print("t_k:", np.round(t.t, 6))

for d in range(5):
    w = np.linalg.eigvalsh(hankel_matrix(t.t, d))
    print(f"Hankel block {d + 1}x{d + 1}: smallest |eigenvalue| {np.abs(w).min():.2e}")

d = hankel_rank(t)
rat = pade_recover(t, d)
print("rank:", d)
print("P (ascending):", np.round(rat.P, 6))
print("Q (ascending):", np.round(rat.Q, 6))
print("recovered:", [(round(a, 12), round(b, 12)) for a, b in endpoints(rat)])

# the unit interval: moments 1, 1/2, 1/3, ... give t = (1, 0, 0, ...)
print("t for [0, 1]:", np.round(s_to_t(interval_moments([(0, 1)], 6)).t, 14))
