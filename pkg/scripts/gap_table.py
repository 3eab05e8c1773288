"""Minimal chord gap of breathing m-gons: closed form vs 721-sample pipeline."""

import argparse

from crocker_stability.geometry import min_gap_delta
from crocker_stability.models import BreathingPolygonSpec, breathing_polygon, min_gap_closed_form

p = argparse.ArgumentParser()
p.add_argument("--m", type=int, nargs="+", default=[4, 5, 6, 7, 8])
p.add_argument("--nt", type=int, default=721)
args = p.parse_args()

print(f"{'m':>3} {'ell*':>4} {'closed':>8} {'sampled':>8}")
for m in args.m:
    cf = min_gap_closed_form(m)
    num = min_gap_delta(breathing_polygon(BreathingPolygonSpec(m=m, n_t=args.nt)))
    print(f"{m:>3} {cf['ell_star']:>4} {cf['delta']:8.4f} {num:8.4f}")
