"""
Other families under damping
============================

Dicke, anti-W and two-term cat states behave differently from GHZ-X: some
enter the polytope at a finite damping, some never leave it, some stay
outside until the ground state.
"""

import math

from adstab import families, stabset

# %%
# Anti-W states enter at (sqrt 3 - 1)/2 for n = 3 and at 1/2 for n = 4.
for n in (3, 4):
    thr = families.antiw_threshold(n)
    print(f"anti-W n={n}: threshold {thr:.6f}")
terms = families.antiw3_decomposition(0.5)
print("n=3 decomposition at gamma=0.5:", [round(w, 4) for w, _ in terms])

# %%
# Interior Dicke states stay outside for every gamma < 1.
ob = families.interior_dicke_obstruction(4, 2, 0.5)
print(f"D_4^2 at 0.5: inside={ob.inside}, failing row {ob.failing_row}, "
      f"reduction probability {ob.reduction_probability:.4f}")

# %%
# Classification of stabilizer states as insulators or generators.
for n in (2, 3):
    print(f"n={n}:", families.classify_all(n))

# %%
# A comparable two-term cat and its thresholds.
out = families.two_term_cat_analysis("001", "111", 0.3, 0.4)
print("cat 001/111:", out["thresholds"], "inside at 0.4:", out["membership"])

# %%
# Haar-random inputs at the endpoint of the damping.
rep = families.haar_endpoint_test(3, 500, seed=7)
print(f"Haar n=3: {rep['violating']}/{rep['samples']} violate, bound {rep['bound']}, passes={rep['passes']}")
print("robustness of the anti-W n=3 state at 0.2:",
      round(stabset.robustness_lp(families.dicke_trajectory(3, 2, 0.2)).value, 6),
      "closed", round(families.antiw3_rom_upper(0.2), 6), "sqrt3", round(math.sqrt(3), 3))
