"""Analytic test beds: breathing polygons, pentagon insertion, epithelial arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .churn import INSERT, ChurnEvent
from .geometry import DomainError, PointCloudFrame, PointCloudSeries
from .stability import budget_from_lambdas, per_point_betti_budget


def breathing_radius(t):
    return 1 + 0.5 * np.sin(t)


@dataclass(frozen=True)
class BreathingPolygonSpec:
    m: int
    n_t: int
    closed: bool = False  # True: t_i = 2 pi i / (n_t - 1), both endpoints sampled

    def __post_init__(self):
        if self.m < 3:
            raise DomainError("breathing polygon needs m >= 3")
        if self.n_t < 1:
            raise DomainError("n_t must be >= 1")

    def times(self) -> np.ndarray:
        if self.closed and self.n_t > 1:
            return np.linspace(0, 2 * np.pi, self.n_t)
        return 2 * np.pi * np.arange(self.n_t) / self.n_t


def polygon_vertices(m: int, a: float) -> np.ndarray:
    ang = 2 * np.pi * np.arange(m) / m
    return np.column_stack([a * np.cos(ang), a * np.sin(ang)])


def vertex_ids(m: int) -> list[str]:
    return [f"v{v}" for v in range(m)]


def breathing_polygon(spec: BreathingPolygonSpec) -> PointCloudSeries:
    """Regular m-gon with circumradius 1 + sin(t)/2; frames indexed 1..n_t."""
    ids = vertex_ids(spec.m)
    frames = [
        PointCloudFrame(i + 1, float(t), ids, polygon_vertices(spec.m, float(breathing_radius(t))))
        for i, t in enumerate(spec.times())
    ]
    return PointCloudSeries(tuple(frames), name=f"breathing-{spec.m}gon")


def static_series(ids, coords, n_t: int = 1, name: str = "static") -> PointCloudSeries:
    frames = [PointCloudFrame(i + 1, float(i), ids, coords) for i in range(n_t)]
    return PointCloudSeries(tuple(frames), name=name)


def chord_lengths(m: int, a: float) -> list[float]:
    if m < 3:
        raise DomainError("m must be >= 3")
    if a <= 0:
        raise DomainError("radius must be positive")
    return [2 * a * math.sin(math.pi * ell / m) for ell in range(1, m // 2 + 1)]


def narrowest_chord_gap_index(m: int) -> int:
    if m == 3:
        raise DomainError("gap undefined: a triangle has only one distance")
    if m < 3:
        raise DomainError("m must be >= 3")
    return 1 if m == 4 else m // 2 - 1


def min_gap_closed_form(m: int) -> dict:
    """Smallest gap between consecutive chord lengths at the minimum radius 1/2."""
    ell = narrowest_chord_gap_index(m)
    a_min = 0.5
    theta = math.pi / m
    delta = 2 * a_min * (math.sin((ell + 1) * theta) - math.sin(ell * theta))
    return {"delta": delta, "ell_star": ell}


# Pentagon with unit circumradius plus one point at the midpoint of v0 and v2.
INSERTED_ID = "v*"


@dataclass(frozen=True)
class PentagonInsertion:
    base: PointCloudSeries
    event: ChurnEvent
    inserted: tuple[float, float]
    # (lower scale, upper scale, delta beta_0, delta beta_1) on [lower, upper)
    expected_transitions: list[tuple[float, float, int, int]] = field(default_factory=list)


def pentagon_insertion_scenario(n_t: int = 1) -> PentagonInsertion:
    verts = polygon_vertices(5, 1.0)
    v_star = (verts[0] + verts[2]) / 2
    ids = vertex_ids(5)
    base = static_series(ids, verts, n_t=n_t, name="pentagon")
    event = ChurnEvent(time_index=1, kind=INSERT, affected_ids=(INSERTED_ID,), inserted_coords=(tuple(v_star),))
    d = np.linalg.norm(verts - v_star, axis=1)
    r1 = float(d[1])  # v1, ~0.691
    r02 = float(d[0])  # v0 and v2, ~0.951
    r3 = float(d[3])  # v3 and v4, ~1.263
    c1, c2 = chord_lengths(5, 1.0)  # ~1.176, ~1.902
    # On [r02, c1) v* glues v0, v1, v2 together while the sides are still absent.
    transitions = [
        (0.0, r1, +1, 0),
        (r1, r02, 0, 0),
        (r02, c1, -2, 0),
        (c1, r3, 0, 0),
        (r3, c2, 0, -1),
        (c2, math.inf, 0, 0),
    ]
    return PentagonInsertion(base=base, event=event, inserted=(float(v_star[0]), float(v_star[1])), expected_transitions=transitions)


def hexagonal_density(j: int) -> int:
    """Points of a hexagonal packing within j rings of a centre point."""
    if j < 1:
        raise DomainError("ring index must be >= 1")
    return 1 + 3 * j * (j + 1)


@dataclass(frozen=True)
class FeasibilitySpec:
    m: int = 500
    n_t: int = 51
    rings: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    pixel_size: float = 0.44  # micrometres per pixel
    pixel_error: float = 3.0  # pixels
    k: int = 1

    def __post_init__(self):
        if self.m < 1 or self.n_t < 1 or not self.rings or min(self.rings) < 1:
            raise DomainError("feasibility spec needs positive m, n_t and ring indices")
        if self.pixel_size <= 0 or self.pixel_error <= 0 or self.k < 0:
            raise DomainError("pixel size/error must be positive and k nonnegative")


def epithelial_feasibility(spec: FeasibilitySpec, lambdas: list[int] | None = None) -> dict:
    """Bounded-change budget for an m-cell sheet imaged over n_t frames.

    Ring index j stands in for the scale index; converting physical scales
    to ring counts is left to the caller. ``lambdas`` overrides the
    hexagonal-packing densities (e.g. with delta-inflated counts).
    """
    delta_um = spec.pixel_error * spec.pixel_size
    lams = list(lambdas) if lambdas is not None else [hexagonal_density(j) for j in spec.rings]
    per_scale = [per_point_betti_budget(lam, spec.k) for lam in lams]
    inner = sum(per_scale)
    total = budget_from_lambdas(lams, spec.m, spec.n_t, spec.k)
    cells = len(lams) * spec.n_t
    return {
        "m": spec.m,
        "n_t": spec.n_t,
        "rings": list(spec.rings),
        "k": spec.k,
        "pixel_size_um": spec.pixel_size,
        "pixel_error_px": spec.pixel_error,
        "delta_um": delta_um,
        "lambdas": lams,
        "per_scale_budgets": per_scale,
        "inner_sum": inner,
        "global_budget": total,
        "per_cell_average": total / cells,
    }
