"""Independent oracles and randomized suites that exercise the stability theorems."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .churn import (
    DELETE,
    INSERT,
    ChurnEvent,
    apply_event,
    churn_lambdas,
    event_frame_position,
    geometry_aware_budget,
    global_churn_bound,
)
from .crocker import ScaleGrid, betti_table
from .geometry import DomainError, PointCloudFrame, PointCloudSeries, distance_matrix, max_displacement
from .homology import BettiVector
from .models import BreathingPolygonSpec, breathing_polygon
from .stability import certify_exact, clearance_report, global_change_budget

BRUTE_FORCE_MAX_POINTS = 12


def _dense_gf2_rank(mat: np.ndarray) -> int:
    """Row echelon form over GF(2), pivoting on the leftmost column."""
    a = (np.asarray(mat, dtype=np.uint8) & 1).copy()
    n_rows, n_cols = a.shape
    rank = 0
    for c in range(n_cols):
        if rank == n_rows:
            break
        hits = np.flatnonzero(a[rank:, c]) + rank
        if hits.size == 0:
            continue
        p = hits[0]
        if p != rank:
            a[[rank, p]] = a[[p, rank]]
        below = np.flatnonzero(a[:, c])
        below = below[below != rank]
        a[below] ^= a[rank]
        rank += 1
    return rank


def brute_force_betti_oracle(frame: PointCloudFrame, scale: float, k_max: int = 1) -> BettiVector:
    """Betti numbers from exhaustive subset filtering and dense elimination."""
    m = frame.m
    if m > BRUTE_FORCE_MAX_POINTS:
        raise DomainError(f"brute-force oracle limited to {BRUTE_FORCE_MAX_POINTS} points, got {m}")
    d = distance_matrix(frame)
    ok = d <= scale
    simplices = []
    for size in range(1, k_max + 3):
        level = [s for s in combinations(range(m), size) if all(ok[a, b] for a, b in combinations(s, 2))]
        simplices.append(level)
    ranks = [0]
    for k in range(1, k_max + 2):
        lower = {s: r for r, s in enumerate(simplices[k - 1])}
        mat = np.zeros((len(simplices[k - 1]), len(simplices[k])), dtype=np.uint8)
        for c, s in enumerate(simplices[k]):
            for face in combinations(s, k):
                mat[lower[face], c] = 1
        ranks.append(_dense_gf2_rank(mat) if mat.size else 0)
    return BettiVector(tuple(len(simplices[k]) - ranks[k] - ranks[k + 1] for k in range(k_max + 1)))


def uniform_in_ball(rng: np.random.Generator, n: int, d: int, radius: float) -> np.ndarray:
    direction = rng.standard_normal((n, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / d)
    return direction * r[:, None]


def perturb_in_ball(series: PointCloudSeries, radius: float, rng: np.random.Generator, ids=None) -> PointCloudSeries:
    """Move each selected point, independently per frame, uniformly inside a ball."""
    frames = []
    for f in series:
        shift = uniform_in_ball(rng, f.m, f.dim, radius)
        if ids is not None:
            mask = np.array([pid in ids for pid in f.ids])
            shift[~mask] = 0.0
        frames.append(PointCloudFrame(f.time_index, f.time_value, f.ids, f.coords + shift))
    return PointCloudSeries(tuple(frames), name=f"{series.name}+ball({radius:g})")


def pentagon_noise_setup() -> tuple[PointCloudSeries, ScaleGrid]:
    """Breathing pentagon, 51 half-open time samples, grid 0.1 j for j = 1..15."""
    return breathing_polygon(BreathingPolygonSpec(m=5, n_t=51)), ScaleGrid.multiples(0.1, 15)


def certificate_soundness_suite(
    seeds: int,
    master_seed: int = 0,
    factor: float = 0.49,
    series: PointCloudSeries | None = None,
    grid: ScaleGrid | None = None,
    k_max: int = 1,
) -> dict:
    """Perturb by ``factor * gamma`` in the ball and count certified cases that changed."""
    if seeds < 1:
        raise DomainError("seeds must be >= 1")
    if series is None or grid is None:
        series, grid = pentagon_noise_setup()
    report = clearance_report(series, grid)
    delta = factor * report.gamma
    base = betti_table(series, grid, k_max)
    rng_root = np.random.SeedSequence(master_seed)
    certified = changed = violations = 0
    l1s = []
    for child in rng_root.spawn(seeds):
        rng = np.random.default_rng(child)
        pert = perturb_in_ball(series, delta, rng)
        cert = certify_exact(report, max_displacement(series, pert))
        l1 = int(np.abs(betti_table(pert, grid, k_max) - base).sum())
        l1s.append(l1)
        certified += cert.certified
        changed += l1 > 0
        violations += cert.certified and l1 > 0
    return {
        "seeds": seeds,
        "master_seed": master_seed,
        "gamma": report.gamma,
        "delta": delta,
        "factor": factor,
        "in_gap_ok": report.in_gap_ok,
        "certified": certified,
        "changed": changed,
        "violations": violations,
        "l1": l1s,
    }


def _random_series(rng: np.random.Generator, m: int, n_t: int, d: int) -> PointCloudSeries:
    start = rng.random((m, d))
    frames = []
    coords = start
    ids = [f"p{a:02d}" for a in range(m)]
    for i in range(n_t):
        frames.append(PointCloudFrame(i + 1, float(i), ids, coords))
        coords = coords + 0.05 * rng.standard_normal((m, d))
    return PointCloudSeries(tuple(frames), name="random")


def _random_grid(rng: np.random.Generator, n: int = 6) -> ScaleGrid:
    vals = np.unique(np.round(rng.uniform(0.05, 1.2, size=n), 6))
    return ScaleGrid(vals)


def _perturbation_scenario(rng, k_max: int) -> dict:
    m = int(rng.integers(4, 11))
    n_t = int(rng.integers(1, 4))
    d = int(rng.choice([2, 3]))
    series = _random_series(rng, m, n_t, d)
    grid = _random_grid(rng)
    m_star = int(rng.integers(1, m + 1))
    chosen = set(rng.choice(series[0].ids, size=m_star, replace=False).tolist())
    delta = float(rng.uniform(0.02, 0.3))
    pert = perturb_in_ball(series, delta, rng, ids=chosen)
    diff = np.abs(betti_table(pert, grid, k_max) - betti_table(series, grid, k_max))
    out = {"kind": "perturbation", "m": m, "n_t": n_t, "m_star": m_star, "delta": delta, "observed": [], "bound": []}
    for k in range(k_max + 1):
        out["observed"].append(int(diff[k].sum()))
        out["bound"].append(global_change_budget(series, grid, delta, m_star, k))
    return out


def _churn_scenario(rng, k_max: int) -> dict:
    m = int(rng.integers(3, 10))
    n_t = int(rng.integers(1, 4))
    d = 2
    series = _random_series(rng, m, n_t, d)
    grid = _random_grid(rng)
    event_index = int(rng.integers(1, n_t + 1))
    if rng.random() < 0.5:
        q = int(rng.integers(1, min(3, BRUTE_FORCE_MAX_POINTS - m) + 1))
        new = rng.random((q, d))
        event = ChurnEvent(event_index, INSERT, tuple(f"n{a}" for a in range(q)), tuple(map(tuple, new)))
    else:
        q = int(rng.integers(1, min(3, m - 1) + 1))
        gone = rng.choice(series[0].ids, size=q, replace=False).tolist()
        event = ChurnEvent(event_index, DELETE, tuple(gone))
    after = apply_event(series, event)
    diff = np.abs(betti_table(after, grid, k_max) - betti_table(series, grid, k_max))
    lams = churn_lambdas(series, after, grid)
    pos = event_frame_position(series, event)
    out = {"kind": f"churn-{event.kind.lower()}", "m": m, "n_t": n_t, "q": q, "observed": [], "bound": [], "cell_ok": True}
    for k in range(k_max + 1):
        out["observed"].append(int(diff[k].sum()))
        out["bound"].append(global_churn_bound(n_t, pos, q, lams, k))
        cell_caps = np.array([geometry_aware_budget(q, lam, k) for lam in lams])[:, None]
        out["cell_ok"] &= bool((diff[k] <= cell_caps).all())
    return out


def bound_dominance_suite(seeds: int, master_seed: int = 0, k_max: int = 1) -> dict:
    """Alternate random perturbation and churn scenarios; record observed vs bound."""
    if seeds < 1:
        raise DomainError("seeds must be >= 1")
    scenarios = []
    for s, child in enumerate(np.random.SeedSequence(master_seed).spawn(seeds)):
        rng = np.random.default_rng(child)
        sc = _perturbation_scenario(rng, k_max) if s % 2 == 0 else _churn_scenario(rng, k_max)
        sc["seed_index"] = s
        scenarios.append(sc)
    violations = [
        sc for sc in scenarios
        if any(o > b for o, b in zip(sc["observed"], sc["bound"])) or not sc.get("cell_ok", True)
    ]
    nonzero = sum(any(o > 0 for o in sc["observed"]) for sc in scenarios)
    return {
        "seeds": seeds,
        "master_seed": master_seed,
        "scenarios": scenarios,
        "violations": len(violations),
        "violating": [sc["seed_index"] for sc in violations],
        "nonzero": nonzero,
    }
