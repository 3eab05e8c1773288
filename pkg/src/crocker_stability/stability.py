"""Deterministic stability: clearances, local density, certificates and budgets."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .crocker import ScaleGrid
from .geometry import (
    DEFAULT_DEDUP_TOL,
    DomainError,
    PointCloudSeries,
    distance_matrix,
    merge_sorted_values,
    pair_distance_array,
)

CERTIFIED_EXACT = "CERTIFIED_EXACT"
NOT_CERTIFIED = "NOT_CERTIFIED"
INT64_CEILING = 2**63 - 1


@dataclass(frozen=True, eq=False)
class ClearanceReport:
    """Grid clearance quantities.

    ``per_cell`` and ``in_gap`` are indexed ``[time position, scale position]``.
    A cell whose grid value sits within ``dedup_tol`` of a critical distance
    is an in-gap violation and gets clearance 0.
    """

    per_cell: np.ndarray
    in_gap: np.ndarray
    gamma: float
    gamma_grid: float
    delta_gap: float | None
    delta_grid_gap: float
    grid: ScaleGrid
    time_indices: tuple[int, ...]
    dedup_tol: float

    @property
    def in_gap_ok(self) -> bool:
        return bool(self.in_gap.all())

    @property
    def violations(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(~self.in_gap))]

    @property
    def argmin_cells(self) -> list[tuple[int, int]]:
        g = self.per_cell
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(g == g.min()))]

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "gamma_grid": self.gamma_grid,
            "delta_gap": self.delta_gap,
            "delta_grid_gap": _finite_or_none(self.delta_grid_gap),
            "gamma_le_half_delta_grid": self.gamma <= self.delta_grid_gap / 2 + 1e-15,
            "in_gap_ok": self.in_gap_ok,
            "in_gap_violations": self.violations,
            "argmin_cells": self.argmin_cells,
            "grid": list(self.grid.thresholds),
            "time_indices": list(self.time_indices),
            "dedup_tol": self.dedup_tol,
            "per_cell": self.per_cell.tolist(),
        }


def _finite_or_none(x: float):
    return None if not np.isfinite(x) else float(x)


def clearance_report(series: PointCloudSeries, grid: ScaleGrid, dedup_tol: float = DEFAULT_DEDUP_TOL) -> ClearanceReport:
    eps = grid.as_array()
    n_t, n_e = len(series), len(eps)
    per_cell = np.zeros((n_t, n_e))
    in_gap = np.ones((n_t, n_e), dtype=bool)
    gamma_grid = np.inf
    delta_gap = np.inf
    delta_grid = np.inf
    for i, frame in enumerate(series):
        if frame.m == 0:
            raise DomainError(f"empty frame at time index {frame.time_index}")
        raw = np.sort(pair_distance_array(frame))
        crit, _ = merge_sorted_values(raw, dedup_tol)
        if crit.size >= 2:
            delta_gap = min(delta_gap, float(np.diff(crit).min()))
        if raw.size:
            pos = np.searchsorted(raw, eps)
            below = np.where(pos > 0, eps - raw[np.maximum(pos - 1, 0)], np.inf)
            above = np.where(pos < raw.size, raw[np.minimum(pos, raw.size - 1)] - eps, np.inf)
            gamma_grid = min(gamma_grid, float(np.minimum(np.abs(below), np.abs(above)).min()))
        ext = np.concatenate([[0.0], crit, [np.inf]])
        for j, e in enumerate(eps):
            if crit.size and np.abs(crit - e).min() <= dedup_tol:
                in_gap[i, j] = False
                per_cell[i, j] = 0.0
                continue
            r = int(np.searchsorted(ext, e)) - 1  # ext[r] < e < ext[r + 1]
            lo, hi = ext[r], ext[r + 1]
            per_cell[i, j] = min(e - lo, hi - e)
            delta_grid = min(delta_grid, hi - lo)
    return ClearanceReport(
        per_cell=per_cell,
        in_gap=in_gap,
        gamma=float(per_cell.min()),
        gamma_grid=float(gamma_grid),
        delta_gap=_finite_or_none(delta_gap),
        delta_grid_gap=float(delta_grid),
        grid=grid,
        time_indices=tuple(f.time_index for f in series),
        dedup_tol=float(dedup_tol),
    )


@dataclass(frozen=True)
class LocalDensityProfile:
    delta: float
    lambda_per_scale: dict[float, int]

    @property
    def values(self) -> list[int]:
        return list(self.lambda_per_scale.values())


def local_density_values(series: PointCloudSeries, radii: Sequence[float]) -> list[int]:
    """Max neighbour count (self included) at each radius over all frames and points."""
    radii = np.asarray(radii, dtype=float)
    best = np.ones(radii.size, dtype=np.int64)
    for frame in series:
        if frame.m == 0:
            continue
        dists = np.sort(distance_matrix(frame), axis=1)
        # counts[a, r] = #{l : dist(a, l) <= radii[r]}
        counts = np.stack([np.searchsorted(row, radii, side="right") for row in dists])
        best = np.maximum(best, counts.max(axis=0))
    return [int(x) for x in best]


def local_density(series: PointCloudSeries, grid: ScaleGrid, delta: float = 0.0) -> LocalDensityProfile:
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    radii = [e + 2 * delta for e in grid]
    lams = local_density_values(series, radii)
    return LocalDensityProfile(delta=float(delta), lambda_per_scale=dict(zip(grid.thresholds, lams)))


@dataclass(frozen=True)
class StabilityCertificate:
    verdict: str
    delta_input: float
    gamma: float
    threshold: float
    failing_cells: list[tuple[int, int]] = field(default_factory=list)
    violations: list[tuple[int, int]] = field(default_factory=list)
    reason: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED_EXACT

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "delta": self.delta_input,
            "gamma": self.gamma,
            "threshold": self.threshold,
            "failing_cells": self.failing_cells,
            "in_gap_violations": self.violations,
            "reason": self.reason,
        }


def certify_exact(report: ClearanceReport, delta: float) -> StabilityCertificate:
    """Exact-stability verdict: certified iff the in-gap condition holds and delta < gamma / 2."""
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    threshold = report.gamma / 2
    if not report.in_gap_ok:
        return StabilityCertificate(
            verdict=NOT_CERTIFIED,
            delta_input=float(delta),
            gamma=report.gamma,
            threshold=threshold,
            failing_cells=report.violations,
            violations=report.violations,
            reason="in-gap condition violated: a grid value coincides with a critical distance",
        )
    ok = delta < threshold
    return StabilityCertificate(
        verdict=CERTIFIED_EXACT if ok else NOT_CERTIFIED,
        delta_input=float(delta),
        gamma=report.gamma,
        threshold=threshold,
        failing_cells=report.argmin_cells,
        reason="delta < gamma/2" if ok else "delta >= gamma/2",
    )


def per_point_betti_budget(lam: int, k: int) -> int:
    """Largest change of beta_k one displaced point can cause: C(lam, k+1)."""
    if lam < 1:
        raise DomainError("local density must be >= 1")
    if k < 0:
        raise DomainError("k must be nonnegative")
    return comb(lam, k + 1)


def budget_from_lambdas(lambdas: Sequence[int], m_star: int, n_t: int, k: int) -> int:
    if m_star < 0 or n_t < 0:
        raise DomainError("m_star and n_t must be nonnegative")
    return n_t * m_star * sum(per_point_betti_budget(lam, k) for lam in lambdas)


def global_change_budget(series: PointCloudSeries, grid: ScaleGrid, delta: float, m_star: int, k: int) -> int:
    m = max(f.m for f in series)
    if m_star > m:
        raise DomainError(f"m_star={m_star} exceeds point count {m}")
    prof = local_density(series, grid, delta)
    return budget_from_lambdas(prof.values, m_star, len(series), k)


def saturate(value: int, ceiling: int = INT64_CEILING) -> tuple[int, bool]:
    """Clamp to ``ceiling``; the flag reports whether clamping happened."""
    return (ceiling, True) if value > ceiling else (value, False)
