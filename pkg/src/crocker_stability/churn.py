"""Point insertion / deletion: simplex-change counts and Betti budgets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Mapping, Sequence

import numpy as np

from .crocker import ScaleGrid
from .geometry import DomainError, PointCloudFrame, PointCloudSeries
from .stability import local_density

INSERT = "INSERT"
DELETE = "DELETE"


@dataclass(frozen=True)
class ChurnEvent:
    """Points inserted or deleted from ``time_index`` onward (a step in time)."""

    time_index: int
    kind: str
    affected_ids: tuple[str, ...]
    inserted_coords: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        kind = str(self.kind).upper()
        if kind not in (INSERT, DELETE):
            raise DomainError(f"unknown event kind {self.kind!r}")
        ids = tuple(str(i) for i in self.affected_ids)
        if not ids:
            raise DomainError("event must affect at least one point (q >= 1)")
        if len(set(ids)) != len(ids):
            raise DomainError("duplicate ids in event")
        coords = tuple(tuple(float(x) for x in c) for c in self.inserted_coords)
        if kind == INSERT and len(coords) != len(ids):
            raise DomainError("INSERT needs one coordinate vector per inserted id")
        if kind == DELETE and coords:
            raise DomainError("DELETE takes no coordinates")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "affected_ids", ids)
        object.__setattr__(self, "inserted_coords", coords)

    @property
    def q(self) -> int:
        return len(self.affected_ids)

    def to_dict(self) -> dict:
        out = {"time_index": self.time_index, "kind": self.kind, "affected_ids": list(self.affected_ids)}
        if self.kind == INSERT:
            out["inserted_coords"] = [list(c) for c in self.inserted_coords]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> "ChurnEvent":
        try:
            return cls(
                time_index=int(data["time_index"]),
                kind=data["kind"],
                affected_ids=tuple(data["affected_ids"]),
                inserted_coords=tuple(tuple(c) for c in data.get("inserted_coords", ())),
            )
        except KeyError as exc:
            raise DomainError(f"event JSON missing field {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "ChurnEvent":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ChurnBudget:
    worst_case_simplex_counts: dict[int, int]
    worst_case_betti: int
    geometry_aware_betti: int
    global_l1: int
    lambdas: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "worst_case_simplex_counts": {str(k): v for k, v in self.worst_case_simplex_counts.items()},
            "worst_case_betti": self.worst_case_betti,
            "geometry_aware_betti": self.geometry_aware_betti,
            "global_l1": self.global_l1,
            "lambdas": self.lambdas,
        }


def _sigma(kind: str) -> int:
    kind = kind.upper()
    if kind == INSERT:
        return 0
    if kind == DELETE:
        return 1
    raise DomainError(f"unknown event kind {kind!r}")


def exact_simplex_change_count(q: int, m: int, k: int, kind: str) -> int:
    """Number of k-simplices that can appear or vanish when q vertices are added or removed.

    Counts simplices made only of modified vertices plus mixed ones with i
    modified and k+1-i unmodified vertices, the unmodified pool being m
    points for insertion and m - q for deletion.
    """
    s = _sigma(kind)
    if q < 1:
        raise DomainError("q must be >= 1")
    if k < 0:
        raise DomainError("k must be nonnegative")
    if m < 0:
        raise DomainError("m must be nonnegative")
    if s == 1 and q > m:
        raise DomainError(f"cannot delete q={q} points from m={m}")
    if k == 0:
        return q
    rest = m - s * q
    return comb(q, k + 1) + sum(comb(q, i) * comb(rest, k + 1 - i) for i in range(1, k + 1))


def worst_case_betti_budget(q: int, m: int, k: int, kind: str = INSERT) -> int:
    """Combinatorial cap on |delta beta_k|: k-simplex plus (k+1)-simplex changes."""
    return exact_simplex_change_count(q, m, k, kind) + exact_simplex_change_count(q, m, k + 1, kind)


def worst_case_betti_budget_proportion(p: float, m: int, k: int, kind: str = INSERT) -> int:
    """Same budget with q written as a fraction p of m (q = round(p m), at least 1)."""
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    return worst_case_betti_budget(max(1, round(p * m)), m, k, kind)


def geometry_aware_budget(q: int, lam: int, k: int) -> int:
    if q < 1:
        raise DomainError("q must be >= 1")
    if lam < 1:
        raise DomainError("lambda must be >= 1")
    if k < 0:
        raise DomainError("k must be nonnegative")
    return q * comb(lam, k + 1)


def global_churn_bound(n_t: int, event_index: int, q: int, lambdas: Mapping[float, int] | Sequence[int], k: int) -> int:
    """(n_t - i + 1) * q * sum_j C(lambda_j, k+1) for an event at 1-based frame i.

    Several events: sum the per-event values.
    """
    if not 1 <= event_index <= n_t:
        raise DomainError(f"event index {event_index} outside 1..{n_t}")
    lams = list(lambdas.values()) if isinstance(lambdas, Mapping) else list(lambdas)
    return (n_t - event_index + 1) * sum(geometry_aware_budget(q, lam, k) for lam in lams)


def apply_event(series: PointCloudSeries, event: ChurnEvent) -> PointCloudSeries:
    frames = []
    touched = False
    for f in series:
        if f.time_index < event.time_index:
            frames.append(f)
            continue
        touched = True
        if event.kind == INSERT:
            clash = set(event.affected_ids) & set(f.ids)
            if clash:
                raise DomainError(f"inserted id {sorted(clash)[0]!r} already present at time index {f.time_index}")
            new = np.asarray(event.inserted_coords, dtype=float)
            if new.shape[1] != f.dim:
                raise DomainError(f"inserted coordinates have dimension {new.shape[1]}, series has {f.dim}")
            frames.append(f.replace(ids=f.ids + event.affected_ids, coords=np.vstack([f.coords, new])))
        else:
            keep = [a for a, pid in enumerate(f.ids) if pid not in event.affected_ids]
            missing = set(event.affected_ids) - set(f.ids)
            if missing:
                raise DomainError(f"deleted id {sorted(missing)[0]!r} not present at time index {f.time_index}")
            frames.append(f.replace(ids=[f.ids[a] for a in keep], coords=f.coords[keep]))
    if not touched:
        raise DomainError(f"event time index {event.time_index} is after the last frame")
    return PointCloudSeries(tuple(frames), name=f"{series.name}+{event.kind.lower()}")


def churn_lambdas(before: PointCloudSeries, after: PointCloudSeries, grid: ScaleGrid) -> list[int]:
    """Local density per scale taken over both the pre- and post-event clouds."""
    a = local_density(before, grid).values
    b = local_density(after, grid).values
    return [max(x, y) for x, y in zip(a, b)]


def event_frame_position(series: PointCloudSeries, event: ChurnEvent) -> int:
    """1-based position of the first frame the event touches."""
    for pos, f in enumerate(series, start=1):
        if f.time_index >= event.time_index:
            return pos
    raise DomainError(f"event time index {event.time_index} is after the last frame")


def churn_budget(series: PointCloudSeries, event: ChurnEvent, grid: ScaleGrid, k: int) -> ChurnBudget:
    after = apply_event(series, event)
    pos = event_frame_position(series, event)
    m = series[pos - 1].m
    lams = churn_lambdas(series, after, grid)
    lam_max = max(lams)
    return ChurnBudget(
        worst_case_simplex_counts={
            kk: exact_simplex_change_count(event.q, m, kk, event.kind) for kk in (k, k + 1)
        },
        worst_case_betti=worst_case_betti_budget(event.q, m, k, event.kind),
        geometry_aware_betti=geometry_aware_budget(event.q, lam_max, k),
        global_l1=global_churn_bound(len(series), pos, event.q, lams, k),
        lambdas=lams,
    )
