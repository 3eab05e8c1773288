"""Vietoris-Rips flag complexes of a single frame at a single scale."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import DomainError, PointCloudFrame, distance_matrix


@dataclass(frozen=True)
class FlagComplex:
    """VR complex with simplices enumerated up to ``dim_cap``.

    ``simplices_idx[k]`` holds sorted index tuples of the k-simplices; since
    frame indices follow sorted id order, the id tuples in
    ``simplices_by_dim`` are sorted too.
    """

    scale: float
    vertices: tuple[str, ...]
    dim_cap: int
    simplices_idx: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def edges(self) -> frozenset[tuple[str, str]]:
        v = self.vertices
        return frozenset((v[a], v[b]) for a, b in self.simplices_idx[1]) if self.dim_cap >= 1 else frozenset()

    @property
    def simplices_by_dim(self) -> tuple[tuple[tuple[str, ...], ...], ...]:
        v = self.vertices
        return tuple(tuple(tuple(v[i] for i in s) for s in level) for level in self.simplices_idx)

    def count(self, k: int) -> int:
        if k < 0:
            return 0
        if k > self.dim_cap:
            raise DomainError(f"simplices not enumerated: dimension {k} exceeds dim_cap {self.dim_cap}")
        return len(self.simplices_idx[k])

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.simplices_idx)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def adjacency_masks(dists: np.ndarray, scale: float) -> list[int]:
    """Bitmask of higher-index neighbours (closed threshold) for each vertex."""
    m = dists.shape[0]
    adj = dists <= scale
    masks = []
    for a in range(m):
        row = np.flatnonzero(adj[a, a + 1:]) + a + 1
        mask = 0
        for b in row:
            mask |= 1 << int(b)
        masks.append(mask)
    return masks


def enumerate_cliques(higher: list[int], dim_cap: int) -> list[list[tuple[int, ...]]]:
    """All cliques with at most dim_cap + 1 vertices by ordered neighbour intersection."""
    levels: list[list[tuple[int, ...]]] = [[] for _ in range(dim_cap + 1)]

    def expand(clique: tuple[int, ...], cand: int) -> None:
        levels[len(clique) - 1].append(clique)
        if len(clique) > dim_cap:
            return
        for u in _bits(cand):
            expand(clique + (u,), cand & higher[u])

    for v in range(len(higher)):
        expand((v,), higher[v])
    for level in levels:
        level.sort()
    return levels


def build_vr_from_distances(ids: tuple[str, ...], dists: np.ndarray, scale: float, dim_cap: int) -> FlagComplex:
    if dim_cap < 1:
        raise DomainError("dim_cap must be >= 1")
    if scale < 0:
        raise DomainError("scale must be nonnegative")
    levels = enumerate_cliques(adjacency_masks(dists, scale), dim_cap)
    return FlagComplex(
        scale=float(scale),
        vertices=tuple(ids),
        dim_cap=int(dim_cap),
        simplices_idx=tuple(tuple(level) for level in levels),
    )


def build_vr(frame: PointCloudFrame, scale: float, dim_cap: int = 2) -> FlagComplex:
    if dim_cap < 1:
        raise DomainError("dim_cap must be >= 1")
    return build_vr_from_distances(frame.ids, distance_matrix(frame), scale, dim_cap)


def neighbor_counts(frame: PointCloudFrame, radius: float) -> dict[str, int]:
    """Points within ``radius`` of each point, the point itself included."""
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    counts = (distance_matrix(frame) <= radius).sum(axis=1)
    return {pid: int(c) for pid, c in zip(frame.ids, counts)}
