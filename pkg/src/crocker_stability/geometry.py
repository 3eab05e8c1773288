"""Point clouds, pairwise distances and critical-distance spectra."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_DEDUP_TOL = 1e-9


class DomainError(ValueError):
    """Raised when an operation's precondition is violated."""


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PointCloudFrame:
    """One observation time of a labeled point cloud.

    Points are stored sorted by id so that index order and id order agree;
    every downstream simplex tuple relies on that.
    """

    time_index: int
    time_value: float
    ids: tuple[str, ...]
    coords: np.ndarray

    def __init__(self, time_index: int, time_value: float, ids: Iterable, coords, dim: int | None = None):
        ids = tuple(str(i) for i in ids)
        try:
            arr = np.asarray(coords, dtype=float)
        except ValueError:
            raise DomainError("coords are ragged: every vector needs the same length") from None
        if arr.size == 0:
            arr = arr.reshape(0, dim if dim is not None else 0)
        if arr.ndim != 2:
            raise DomainError("coords must be an (m, d) array")
        if len(ids) != arr.shape[0]:
            raise DomainError("ids and coords have different lengths")
        if dim is not None and arr.shape[1] != dim:
            raise DomainError(f"coords have dimension {arr.shape[1]}, expected {dim}")
        if len(set(ids)) != len(ids):
            raise DomainError(f"duplicate point ids in frame {time_index}")
        if time_index < 0:
            raise DomainError("time_index must be nonnegative")
        order = sorted(range(len(ids)), key=ids.__getitem__)
        object.__setattr__(self, "time_index", int(time_index))
        object.__setattr__(self, "time_value", float(time_value))
        object.__setattr__(self, "ids", tuple(ids[k] for k in order))
        object.__setattr__(self, "coords", _frozen_array(arr[order] if order else arr))

    @property
    def dim(self) -> int:
        return int(self.coords.shape[1])

    @property
    def m(self) -> int:
        return len(self.ids)

    @property
    def points(self) -> list[tuple[str, np.ndarray]]:
        return list(zip(self.ids, self.coords))

    def index_of(self, point_id: str) -> int:
        return self.ids.index(point_id)

    def replace(self, ids=None, coords=None) -> "PointCloudFrame":
        return PointCloudFrame(
            self.time_index,
            self.time_value,
            self.ids if ids is None else ids,
            self.coords if coords is None else coords,
            dim=self.dim,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointCloudFrame):
            return NotImplemented
        return (
            self.time_index == other.time_index
            and self.time_value == other.time_value
            and self.ids == other.ids
            and np.array_equal(self.coords, other.coords)
        )

    def __repr__(self) -> str:
        return f"PointCloudFrame(time_index={self.time_index}, time_value={self.time_value}, m={self.m}, d={self.dim})"


@dataclass(frozen=True)
class PointCloudSeries:
    """Ordered frames sharing an ambient dimension."""

    frames: tuple[PointCloudFrame, ...]
    name: str = field(default="series", compare=False)

    def __post_init__(self):
        frames = tuple(self.frames)
        object.__setattr__(self, "frames", frames)
        if not frames:
            raise DomainError("series has no frames")
        dims = {f.dim for f in frames}
        if len(dims) != 1:
            raise DomainError(f"frames disagree on ambient dimension: {sorted(dims)}")
        for prev, cur in zip(frames, frames[1:]):
            if cur.time_index <= prev.time_index:
                raise DomainError("time_index must be strictly increasing")
            if cur.time_value < prev.time_value:
                raise DomainError("time_value must be nondecreasing")

    @property
    def dim(self) -> int:
        return self.frames[0].dim

    @property
    def n_t(self) -> int:
        return len(self.frames)

    @property
    def time_values(self) -> tuple[float, ...]:
        return tuple(f.time_value for f in self.frames)

    @property
    def fixed_cardinality(self) -> bool:
        first = self.frames[0].ids
        return all(f.ids == first for f in self.frames)

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, i) -> PointCloudFrame:
        return self.frames[i]


@dataclass(frozen=True)
class DistanceSpectrum:
    frame_time_index: int
    sorted_distinct: tuple[float, ...]
    multiplicities: tuple[int, ...]
    dedup_tol: float


def distance_matrix(frame: PointCloudFrame) -> np.ndarray:
    """Dense Euclidean distance matrix in index (= sorted id) order."""
    x = frame.coords
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _upper_pairs(m: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(m, k=1)


def pair_distance_array(frame: PointCloudFrame) -> np.ndarray:
    """Distances of all unordered pairs, in lexicographic index-pair order."""
    iu, ju = _upper_pairs(frame.m)
    return distance_matrix(frame)[iu, ju]


def pairwise_distances(frame: PointCloudFrame) -> list[tuple[tuple[str, str], float]]:
    if frame.m == 0:
        raise DomainError("empty frame")
    iu, ju = _upper_pairs(frame.m)
    dists = distance_matrix(frame)[iu, ju]
    ids = frame.ids
    return [((ids[a], ids[b]), float(d)) for a, b, d in zip(iu, ju, dists)]


def merge_sorted_values(values: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Merge chains of sorted values whose consecutive gap is <= tol.

    Returns cluster means and cluster sizes.
    """
    if tol < 0:
        raise DomainError("dedup_tol must be nonnegative")
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        return v, np.zeros(0, dtype=int)
    breaks = np.flatnonzero(np.diff(v) > tol) + 1
    starts = np.concatenate([[0], breaks])
    sizes = np.diff(np.concatenate([starts, [v.size]]))
    means = np.add.reduceat(v, starts) / sizes
    return means, sizes


def critical_distances(frame: PointCloudFrame, dedup_tol: float = DEFAULT_DEDUP_TOL) -> DistanceSpectrum:
    if dedup_tol < 0:
        raise DomainError("dedup_tol must be nonnegative")
    if frame.m == 0:
        raise DomainError("empty frame")
    means, sizes = merge_sorted_values(pair_distance_array(frame), dedup_tol)
    return DistanceSpectrum(
        frame_time_index=frame.time_index,
        sorted_distinct=tuple(float(x) for x in means),
        multiplicities=tuple(int(s) for s in sizes),
        dedup_tol=float(dedup_tol),
    )


def min_gap_delta(series: PointCloudSeries, dedup_tol: float = DEFAULT_DEDUP_TOL) -> float:
    """Smallest spacing between consecutive critical distances over all frames."""
    best = np.inf
    for frame in series:
        crit = np.asarray(critical_distances(frame, dedup_tol).sorted_distinct)
        if crit.size < 2:
            raise DomainError(f"gap undefined: frame {frame.time_index} has fewer than 2 distinct distances")
        best = min(best, float(np.diff(crit).min()))
    return best


def _check_comparable(a: PointCloudSeries, b: PointCloudSeries) -> None:
    if len(a) != len(b):
        raise DomainError("series not comparable: frame counts differ")
    if not (a.fixed_cardinality and b.fixed_cardinality):
        raise DomainError("series not comparable: churn-mode series")
    for fa, fb in zip(a, b):
        if fa.ids != fb.ids or fa.time_index != fb.time_index:
            raise DomainError("series not comparable: ids or time indices differ")


def max_displacement(original: PointCloudSeries, perturbed: PointCloudSeries) -> float:
    _check_comparable(original, perturbed)
    best = 0.0
    for fa, fb in zip(original, perturbed):
        if fa.m:
            best = max(best, float(np.linalg.norm(fb.coords - fa.coords, axis=1).max()))
    return best


def series_from_arrays(coords: Sequence, times: Sequence[float] | None = None, ids=None, name="series") -> PointCloudSeries:
    """Build a fixed-cardinality series from an (n_t, m, d) array."""
    arr = np.asarray(coords, dtype=float)
    if arr.ndim == 2:
        arr = arr[None]
    n_t, m, _ = arr.shape
    if times is None:
        times = range(n_t)
    if ids is None:
        ids = [f"p{k}" for k in range(m)]
    frames = [PointCloudFrame(i + 1, t, ids, arr[i]) for i, t in enumerate(times)]
    return PointCloudSeries(tuple(frames), name=name)
