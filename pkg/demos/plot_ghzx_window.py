"""
Death and rebirth of a damped GHZ-X state
=========================================

A biased GHZ state alpha|0...0> + beta|1...1> under local amplitude damping
leaves the stabilizer polytope for a window of damping strengths and then
falls back in. This walks through the window edges, the regime labels and
how fast the window closes with n.
"""

import numpy as np

from adstab import ghzx, stabset

# %%
# Thresholds for a single configuration. gamma_e marks where the PT
# determinant changes sign; its position relative to the window sets the regime.
th = ghzx.thresholds(3, 0.3)
print(f"n=3 alpha=0.3: window [{th.gamma_minus:.6f}, {th.gamma_plus:.6f}], "
      f"gamma_e={th.gamma_e:.6f}, regime {th.regime}")

# %%
# Closed-form membership against the LP over all 1080 three-qubit stabilizer states.
dic = stabset.stabilizer_dictionary(3)
for g in np.linspace(0.0, 1.0, 11):
    pt = ghzx.ghzx_point(3, 0.3, float(g))
    lp = stabset.membership_lp(pt.density(), dic)
    print(f"gamma={g:.1f}  closed={ghzx.membership_closed(pt)!s:5}  lp={lp.inside!s:5}  slack={lp.slack:.2e}")

# %%
# Regime map across alpha.
a1, a2 = ghzx.alpha_boundaries(4)
print(f"n=4 regime boundaries: alpha1={a1:.6f}, alpha2={a2:.6f}")
for alpha in (0.1, 0.3, 0.5, 0.65, 0.8):
    print(f"  alpha={alpha:.2f}: {ghzx.thresholds(4, alpha).regime}")

# %%
# The window shrinks exponentially in n and the bound tightens.
for n in range(2, 11):
    d, b = ghzx.window_width_and_bound(n, 0.3)
    print(f"n={n:2d}  width={d:.3e}  bound={b:.3e}")
