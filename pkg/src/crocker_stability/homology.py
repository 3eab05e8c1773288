"""Betti numbers over GF(2) by column elimination on bitset columns."""

from __future__ import annotations

from dataclasses import dataclass

from .flag import FlagComplex
from .geometry import DomainError


@dataclass(frozen=True)
class BoundaryMatrix:
    """GF(2) boundary map; column c is an int whose set bits are row indices."""

    k: int
    rows: tuple[tuple[int, ...], ...]
    cols: tuple[tuple[int, ...], ...]
    columns: tuple[int, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def to_dense(self) -> list[list[int]]:
        dense = [[0] * len(self.cols) for _ in self.rows]
        for c, col in enumerate(self.columns):
            for r in range(len(self.rows)):
                if col >> r & 1:
                    dense[r][c] = 1
        return dense

    def rank(self) -> int:
        return gf2_rank(self.columns)


@dataclass(frozen=True)
class BettiVector:
    values: tuple[int, ...]

    def __getitem__(self, k: int) -> int:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def gf2_rank(columns) -> int:
    """Rank of a set of GF(2) column bitsets (pivot on the highest set bit)."""
    pivots: dict[int, int] = {}
    rank = 0
    for col in columns:
        while col:
            top = col.bit_length() - 1
            other = pivots.get(top)
            if other is None:
                pivots[top] = col
                rank += 1
                break
            col ^= other
    return rank


def _boundary_columns(lower: tuple[tuple[int, ...], ...], upper: tuple[tuple[int, ...], ...]) -> list[int]:
    row_of = {s: r for r, s in enumerate(lower)}
    columns = []
    for s in upper:
        col = 0
        for drop in range(len(s)):
            col |= 1 << row_of[s[:drop] + s[drop + 1:]]
        columns.append(col)
    return columns


def boundary_matrix(complex_: FlagComplex, k: int) -> BoundaryMatrix:
    if k < 1:
        raise DomainError("boundary_matrix needs k >= 1")
    if k > complex_.dim_cap:
        raise DomainError(f"simplices not enumerated: k={k} exceeds dim_cap {complex_.dim_cap}")
    lower = complex_.simplices_idx[k - 1]
    upper = complex_.simplices_idx[k]
    return BoundaryMatrix(k=k, rows=lower, cols=upper, columns=tuple(_boundary_columns(lower, upper)))


def betti_numbers(complex_: FlagComplex, k_max: int = 1) -> BettiVector:
    if k_max < 0:
        raise DomainError("k_max must be nonnegative")
    if complex_.dim_cap < k_max + 1:
        raise DomainError(f"dim_cap {complex_.dim_cap} too small for k_max={k_max}; need {k_max + 1}")
    ranks = [0]  # rank of the zero map out of 0-chains
    for k in range(1, k_max + 2):
        ranks.append(gf2_rank(_boundary_columns(complex_.simplices_idx[k - 1], complex_.simplices_idx[k])))
    values = tuple(
        len(complex_.simplices_idx[k]) - ranks[k] - ranks[k + 1] for k in range(k_max + 1)
    )
    return BettiVector(values)


class UnionFind:
    """Disjoint sets with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.components = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.components -= 1
        return True


def betti0_union_find(complex_: FlagComplex) -> int:
    uf = UnionFind(len(complex_.vertices))
    for a, b in complex_.simplices_idx[1]:
        uf.union(a, b)
    return uf.components
