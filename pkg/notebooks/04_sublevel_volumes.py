"""
How thin can {|p| < delta} get?
================================

For an admissible multi-index alpha, vol({|p| < delta} in the cube) is at
most a constant times delta**(1/|alpha|). Monte Carlo estimates of the ratio
stay bounded as delta shrinks. For p = xy the true volume is
4 delta (1 + ln(1/delta)), well inside the delta**(1/2) bound.
"""
import math

from momentshape import RealPoly, check_vol_ratio, find_admissible

polys = {
    "x": RealPoly(1, {(1,): 1.0}),
    "x^2": RealPoly(1, {(2,): 1.0}),
    "xy": RealPoly(2, {(1, 1): 1.0}),
    "x^2+y^2-1": RealPoly(2, {(2, 0): 1.0, (0, 2): 1.0, (0, 0): -1.0}),
}

for name, p in polys.items():
    adm = find_admissible(p)
    alpha = min(adm, key=lambda a: (a.order, a.alpha))
    print(f"\n{name}: admissible {[a.alpha for a in adm]}, using {alpha.alpha}")
    tab = check_vol_ratio(p, alpha, [1e-2, 1e-3, 1e-4, 1e-5], samples=1_000_000, seed=42)
    for row in tab.rows:
        print(f"  delta={row.delta:.0e}  vol={row.volume:.3e}  ratio={row.ratio:.3f} +- {row.ratio_stderr:.3f}")
    print("  bounded:", tab.bounded)

d = 1e-3
print("\nxy exact volume at 1e-3:", 4 * d * (1 + math.log(1 / d)))
