"""Insert the midpoint of v0 and v2 into the unit pentagon and tabulate the Betti changes."""

import numpy as np

from crocker_stability.churn import apply_event, churn_budget
from crocker_stability.crocker import ScaleGrid, betti_table
from crocker_stability.models import pentagon_insertion_scenario

sc = pentagon_insertion_scenario()
after = apply_event(sc.base, sc.event)
print(f"v* = ({sc.inserted[0]:.7f}, {sc.inserted[1]:.7f})")
for lo, hi, d0, d1 in sc.expected_transitions:
    print(f"[{lo:.6f}, {hi:.6f}): d_beta0 = {d0:+d}, d_beta1 = {d1:+d}")

grid = ScaleGrid(0.0005 + 0.001 * np.arange(2500))
diff = betti_table(after, grid, 2) - betti_table(sc.base, grid, 2)
print("max |d_beta_k| observed:", [int(np.abs(diff[k]).max()) for k in range(3)])
for k in range(3):
    b = churn_budget(sc.base, sc.event, grid, k)
    print(f"k={k}: geometry-aware {b.geometry_aware_betti}, worst case {b.worst_case_betti}")
