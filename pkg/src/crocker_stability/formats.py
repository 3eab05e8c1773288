"""Point-cloud CSV, Crocker CSV/JSON and SVG heat maps."""

from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from xml.sax.saxutils import escape

import numpy as np

from .crocker import CrockerDiagram, ScaleGrid
from .geometry import DomainError, PointCloudFrame, PointCloudSeries


class ParseError(DomainError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def fmt(x: float) -> str:
    """Shortest round-trip decimal, locale independent."""
    return repr(float(x))


def parse_point_cloud_csv(data: bytes | str, name: str = "csv") -> PointCloudSeries:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ParseError("empty file", 1)
    header = [h.strip() for h in rows[0]]
    if len(header) < 3 or header[0] != "t" or header[1] != "id":
        raise ParseError("header must be t,id,x0,...,x{d-1}", 1)
    d = len(header) - 2
    if header[2:] != [f"x{k}" for k in range(d)]:
        raise ParseError("coordinate columns must be named x0..x{d-1} in order", 1)
    by_time: dict[float, dict[str, tuple[float, ...]]] = defaultdict(dict)
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != d + 2:
            raise ParseError(f"expected {d + 2} fields, got {len(row)}", lineno)
        try:
            t = float(row[0])
            coords = tuple(float(c) for c in row[2:])
        except ValueError:
            raise ParseError("non-numeric time or coordinate", lineno) from None
        if not all(np.isfinite(coords)) or not np.isfinite(t):
            raise ParseError("non-finite value", lineno)
        pid = row[1].strip()
        if not pid:
            raise ParseError("empty point id", lineno)
        if pid in by_time[t]:
            raise ParseError(f"duplicate (t, id) = ({row[0]}, {pid})", lineno)
        by_time[t][pid] = coords
    if not by_time:
        raise ParseError("no data rows", 2)
    frames = []
    for idx, t in enumerate(sorted(by_time), start=1):
        pts = by_time[t]
        ids = list(pts)
        frames.append(PointCloudFrame(idx, t, ids, np.array([pts[i] for i in ids]).reshape(len(ids), d), dim=d))
    return PointCloudSeries(tuple(frames), name=name)


def serialize_point_cloud_csv(series: PointCloudSeries) -> bytes:
    out = ["t,id," + ",".join(f"x{k}" for k in range(series.dim))]
    for f in series:
        for pid, c in zip(f.ids, f.coords):
            out.append(",".join([fmt(f.time_value), pid, *(fmt(x) for x in c)]))
    return ("\n".join(out) + "\n").encode("utf-8")


def crocker_to_dict(diagram: CrockerDiagram) -> dict:
    return {
        "k": diagram.k,
        "scales": list(diagram.grid.thresholds),
        "times": list(diagram.time_values),
        "matrix": diagram.matrix.tolist(),
        "provenance": diagram.provenance,
    }


def crocker_from_dict(data: dict) -> CrockerDiagram:
    return CrockerDiagram(
        k=int(data["k"]),
        matrix=np.array(data["matrix"], dtype=np.int64).reshape(len(data["scales"]), len(data["times"])),
        grid=ScaleGrid(data["scales"]),
        time_values=tuple(data["times"]),
        provenance=dict(data.get("provenance", {})),
    )


def serialize_crocker(diagram: CrockerDiagram, format: str = "csv") -> bytes:
    format = format.lower()
    if format == "json":
        return (json.dumps(crocker_to_dict(diagram), sort_keys=True) + "\n").encode("utf-8")
    if format != "csv":
        raise DomainError(f"unknown format {format!r}")
    lines = ["scale," + ",".join(fmt(t) for t in diagram.time_values)]
    for eps, row in zip(diagram.grid, diagram.matrix):
        lines.append(",".join([fmt(eps), *(str(int(v)) for v in row)]))
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_crocker(data: bytes | str, k: int = 0) -> CrockerDiagram:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if text.lstrip().startswith("{"):
        return crocker_from_dict(json.loads(text))
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    times = [float(x) for x in rows[0][1:]]
    scales = [float(r[0]) for r in rows[1:]]
    mat = [[int(x) for x in r[1:]] for r in rows[1:]]
    return CrockerDiagram(k=k, matrix=np.array(mat, dtype=np.int64).reshape(len(scales), len(times)), grid=ScaleGrid(scales), time_values=tuple(times))


LOW = (255, 250, 220)
HIGH = (65, 105, 180)
POS = (200, 50, 50)
NEG = (50, 150, 50)
NEUTRAL = (255, 255, 255)


def _mix(a, b, w: float) -> str:
    r, g, bl = (round(x + (y - x) * w) for x, y in zip(a, b))
    return f"#{r:02x}{g:02x}{bl:02x}"


def cell_color(value: int, vmax: int, signed: bool) -> str:
    if signed:
        if value == 0 or vmax == 0:
            return _mix(NEUTRAL, NEUTRAL, 0)
        return _mix(NEUTRAL, POS if value > 0 else NEG, abs(value) / vmax)
    return _mix(LOW, HIGH, value / vmax if vmax else 0.0)


def emit_heatmap_svg(
    data,
    signed: bool | None = None,
    scales=None,
    times=None,
    title: str | None = None,
    cell: int = 14,
) -> bytes:
    """One <rect> per cell; scale increases upward, time to the right.

    Counts use a light-to-blue ramp; signed matrices (diff maps) use white
    for zero, red for gains and green for losses.
    """
    if isinstance(data, CrockerDiagram):
        mat = np.asarray(data.matrix)
        scales = data.grid.thresholds if scales is None else scales
        times = data.time_values if times is None else times
        title = title or f"beta_{data.k}"
    else:
        mat = np.asarray(data, dtype=np.int64)
    if mat.ndim != 2:
        raise DomainError("heatmap needs a 2-D matrix")
    if signed is None:
        signed = bool((mat < 0).any())
    n_e, n_t = mat.shape
    vmax = int(np.abs(mat).max()) if mat.size else 0
    left, top, bottom = 50, 24 if title else 8, 30
    width = left + n_t * cell + 10
    height = top + n_e * cell + bottom
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">'
    ]
    if title:
        parts.append(f'<text x="{left}" y="16" font-size="12">{escape(title)}</text>')
    for j in range(n_e):
        y = top + (n_e - 1 - j) * cell
        for i in range(n_t):
            v = int(mat[j, i])
            parts.append(
                f'<rect x="{left + i * cell}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{cell_color(v, vmax, signed)}" data-value="{v}"/>'
            )
    base = top + n_e * cell
    parts.append(f'<text x="{left + n_t * cell / 2:g}" y="{base + 22}" font-size="12" text-anchor="middle">t</text>')
    parts.append(f'<text x="12" y="{top + n_e * cell / 2:g}" font-size="12" text-anchor="middle">ε</text>')
    if scales is not None and len(scales):
        parts.append(f'<text x="{left - 4}" y="{base}" font-size="9" text-anchor="end">{fmt(scales[0])}</text>')
        parts.append(f'<text x="{left - 4}" y="{top + 9}" font-size="9" text-anchor="end">{fmt(scales[-1])}</text>')
    if times is not None and len(times):
        parts.append(f'<text x="{left}" y="{base + 11}" font-size="9">{fmt(times[0])}</text>')
        parts.append(f'<text x="{left + n_t * cell}" y="{base + 11}" font-size="9" text-anchor="end">{fmt(times[-1])}</text>')
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")
