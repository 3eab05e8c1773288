"""Crocker diagrams: Betti counts on a scale x time grid."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .flag import build_vr_from_distances
from .geometry import DomainError, PointCloudSeries, distance_matrix
from .homology import betti_numbers


@dataclass(frozen=True)
class ScaleGrid:
    thresholds: tuple[float, ...]

    def __init__(self, thresholds: Sequence[float]):
        vals = tuple(float(x) for x in thresholds)
        if not vals:
            raise DomainError("scale grid is empty")
        if any(v <= 0 for v in vals):
            raise DomainError("grid thresholds must be positive")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise DomainError("grid thresholds must be strictly increasing")
        object.__setattr__(self, "thresholds", vals)

    @classmethod
    def linspace(cls, start: float, stop: float, count: int) -> "ScaleGrid":
        if count < 1:
            raise DomainError("grid count must be >= 1")
        if count == 1:
            return cls([start])
        return cls(np.linspace(start, stop, count))

    @classmethod
    def multiples(cls, step: float, count: int) -> "ScaleGrid":
        """step * j for j = 1..count."""
        return cls([step * j for j in range(1, count + 1)])

    @classmethod
    def parse(cls, spec: str) -> "ScaleGrid":
        """Either "start:stop:count" (inclusive linspace) or a comma list."""
        spec = spec.strip()
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise DomainError(f"bad grid spec {spec!r}; expected start:stop:count")
            return cls.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
        return cls([float(x) for x in spec.split(",") if x.strip()])

    def __len__(self) -> int:
        return len(self.thresholds)

    def __iter__(self):
        return iter(self.thresholds)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.thresholds)


@dataclass(frozen=True, eq=False)
class CrockerDiagram:
    """Betti matrix for one homology dimension; rows are scales, columns times."""

    k: int
    matrix: np.ndarray
    grid: ScaleGrid
    time_values: tuple[float, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.int64, copy=True)
        if mat.shape != (len(self.grid), len(self.time_values)):
            raise DomainError(
                f"matrix shape {mat.shape} does not match grid x times {(len(self.grid), len(self.time_values))}"
            )
        if (mat < 0).any():
            raise DomainError("Betti counts must be nonnegative")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "time_values", tuple(float(t) for t in self.time_values))

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, CrockerDiagram):
            return NotImplemented
        return (
            self.k == other.k
            and self.grid == other.grid
            and self.time_values == other.time_values
            and np.array_equal(self.matrix, other.matrix)
        )


def betti_table(series: PointCloudSeries, grid: ScaleGrid, k_max: int = 1) -> np.ndarray:
    """Array of shape (k_max + 1, n_eps, n_t)."""
    if k_max < 0:
        raise DomainError("k_max must be nonnegative")
    out = np.zeros((k_max + 1, len(grid), len(series)), dtype=np.int64)
    for i, frame in enumerate(series):
        if frame.m == 0:
            raise DomainError(f"empty frame at time index {frame.time_index}")
        dists = distance_matrix(frame)
        for j, eps in enumerate(grid):
            cx = build_vr_from_distances(frame.ids, dists, eps, k_max + 1)
            out[:, j, i] = betti_numbers(cx, k_max).values
    return out


def build_crocker(series: PointCloudSeries, grid: ScaleGrid, k_max: int = 1) -> list[CrockerDiagram]:
    table = betti_table(series, grid, k_max)
    prov = {"series": series.name, "k_max": k_max, "n_t": len(series)}
    return [
        CrockerDiagram(k=k, matrix=table[k], grid=grid, time_values=series.time_values, provenance=dict(prov))
        for k in range(k_max + 1)
    ]


def _check_same_shape(a: CrockerDiagram, b: CrockerDiagram) -> None:
    if a.k != b.k:
        raise DomainError(f"homology dimensions differ: {a.k} vs {b.k}")
    if a.grid != b.grid:
        raise DomainError("scale grids differ")
    if len(a.time_values) != len(b.time_values):
        raise DomainError("time counts differ")


def diff_map(a: CrockerDiagram, b: CrockerDiagram) -> np.ndarray:
    """Signed per-cell change b - a."""
    _check_same_shape(a, b)
    return b.matrix - a.matrix


def l1_distance(a: CrockerDiagram, b: CrockerDiagram) -> int:
    return int(np.abs(diff_map(a, b)).sum())
