"""Beta_1 Crocker diagram of the breathing pentagon, written as CSV and SVG."""

import argparse
from pathlib import Path

from crocker_stability.crocker import ScaleGrid, build_crocker
from crocker_stability.formats import emit_heatmap_svg, serialize_crocker
from crocker_stability.models import BreathingPolygonSpec, breathing_polygon

p = argparse.ArgumentParser()
p.add_argument("--nt", type=int, default=20)
p.add_argument("--out", default="out/pentagon_band")
args = p.parse_args()

out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
series = breathing_polygon(BreathingPolygonSpec(m=5, n_t=args.nt))
b0, b1 = build_crocker(series, ScaleGrid.multiples(0.2, 15), 1)
for dg in (b0, b1):
    (out / f"b{dg.k}.csv").write_bytes(serialize_crocker(dg))
    (out / f"b{dg.k}.svg").write_bytes(emit_heatmap_svg(dg))
print(f"band cells: {int(b1.matrix.sum())} of {b1.matrix.size}; files in {out}")
