"""Grid clearance of the breathing pentagon on the 0.1 j grid as the sampling varies.

Prints both time conventions (t_i = 2 pi i / n_t and t_i = 2 pi i / (n_t - 1))
together with the cell that attains the minimum.
"""

import argparse

from crocker_stability.crocker import ScaleGrid
from crocker_stability.models import BreathingPolygonSpec, breathing_polygon
from crocker_stability.stability import clearance_report

p = argparse.ArgumentParser()
p.add_argument("--nt", type=int, nargs="+", default=[11, 21, 26, 51, 52, 101])
args = p.parse_args()

grid = ScaleGrid.multiples(0.1, 15)
print(f"{'n_t':>4} {'half-open':>10} {'closed':>10}  argmin (time pos, scale)")
for n_t in args.nt:
    row = []
    for closed in (False, True):
        rep = clearance_report(breathing_polygon(BreathingPolygonSpec(m=5, n_t=n_t, closed=closed)), grid)
        row.append(rep)
    i, j = row[0].argmin_cells[0]
    print(f"{n_t:>4} {row[0].gamma_grid:10.5f} {row[1].gamma_grid:10.5f}  ({i}, {grid.thresholds[j]:.1f})")
