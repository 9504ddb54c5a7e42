"""
Hoelder stability of sublevel sets
==================================

Perturb chi = 1{p >= 0} into g and compare ||chi - g||_1 with the moment gap
int p (chi - g). The ratio ||chi - g||_1**(|alpha|+1) / gap stays bounded as
the perturbation shrinks. Every family has closed forms, and the grid
confirms them.

The bathtub functional Lambda_f and its dual bound are checked at the end.
"""
import numpy as np

from momentshape import RealPoly
from momentshape.stability import FAMILIES, HolderConfig, fenchel_check, lambda_f, run_holder_experiment

eps = tuple(np.geomspace(1e-1, 1e-3, 7))
for shape in ("orthant", "disk-complement"):
    for family in FAMILIES:
        ex = run_holder_experiment(HolderConfig(shape, family, eps_grid=eps))
        ratios = " ".join(f"{r.ratio:.2e}" for r in ex.records)
        print(f"{shape:16s} {family:12s} ratios {ratios}  slope {ex.ratio_slope:+.2f}  bounded {ex.bounded}")

# an annulus around a smooth boundary: gap grows like ||chi - g||_1 squared
ex = run_holder_experiment(HolderConfig("disk-complement", "dilation", eps_grid=eps))
print("\nlog-log slope of gap against l1 (annulus):", round(ex.gap_slope, 3))

ex = run_holder_experiment(HolderConfig("orthant", "translation", eps_grid=(0.1, 0.05), grid_n=1000))
for r in ex.records:
    print(f"eps={r.eps}: l1 {r.l1:.5f} (grid {r.grid_l1:.5f}), gap {r.gap:.6f} (grid {r.grid_gap:.6f})")

n = 2000
x = -1 + (np.arange(n) + 0.5) * 2 / n
print("\nLambda_|x|(1) =", lambda_f(np.abs(x), 1.0, 2 / n), "(exact 1/4)")
rep = fenchel_check(RealPoly(1, {(1,): 1.0}), [0.1, 1.0], [1e-3, 1e-2, 1e-1])
print("int (s - |x|)_+ :", rep.tail, " slope", round(rep.slope, 4))
print("dual inequality holds:", rep.holds, " min margin", rep.min_margin)
