"""Probabilistic stability under isotropic Gaussian noise."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from math import comb

import numpy as np

from .crocker import ScaleGrid, betti_table
from .geometry import DomainError, PointCloudFrame, PointCloudSeries, pair_distance_array
from .stability import clearance_report


@dataclass(frozen=True)
class NoiseModel:
    """Per-coordinate N(0, sigma^2) noise, independent across points and frames.

    sigma = 0 is accepted as the no-noise control; bound formulas still
    require sigma > 0.
    """

    sigma: float
    d: int
    seed: int = 0
    temporal_independence: bool = True

    def __post_init__(self):
        if self.sigma < 0:
            raise DomainError("sigma must be nonnegative")
        if self.d < 1:
            raise DomainError("d must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class ProbBoundReport:
    gamma_grid: float | None
    tau_star: float
    activation_ok: bool
    pair_bound: float
    global_bound: float
    prefactor: int
    log_raw: float
    vacuous: bool

    @property
    def raw(self) -> float:
        return math.exp(self.log_raw) if self.log_raw < 700 else math.inf

    def to_dict(self) -> dict:
        return {
            "gamma_grid": self.gamma_grid,
            "tau_star": self.tau_star,
            "activation_ok": self.activation_ok,
            "pair_bound": self.pair_bound,
            "global_bound": self.global_bound,
            "prefactor": self.prefactor,
            "raw_product": self.raw,
            "log10_raw_product": self.log_raw / math.log(10),
            "vacuous": self.vacuous,
        }


def tau_star(gamma_grid: float, sigma: float, d: int) -> float:
    """Clearance-to-noise margin in units of sqrt(2) sigma, minus sqrt(d)."""
    if sigma <= 0:
        raise DomainError("sigma must be > 0")
    if d < 1:
        raise DomainError("d must be >= 1")
    return gamma_grid / (math.sqrt(2) * sigma) - math.sqrt(d)


def pair_crossing_bound(tau: float) -> float:
    if tau <= 0:
        return 1.0
    return min(1.0, math.exp(-tau * tau / 2))


def union_prefactor(m: int, n_t: int) -> int:
    return comb(m, 2) * n_t


def global_prob_bound(m: int, n_t: int, tau: float, gamma_grid: float | None = None) -> ProbBoundReport:
    if m < 2:
        raise DomainError("need m >= 2 points")
    if n_t < 1:
        raise DomainError("need n_t >= 1")
    prefactor = union_prefactor(m, n_t)
    active = tau > 0
    log_pair = -tau * tau / 2 if active else 0.0
    log_raw = math.log(prefactor) + log_pair
    return ProbBoundReport(
        gamma_grid=gamma_grid,
        tau_star=tau,
        activation_ok=active,
        pair_bound=pair_crossing_bound(tau),
        global_bound=min(1.0, math.exp(log_raw)) if log_raw < 0 else 1.0,
        prefactor=prefactor,
        log_raw=log_raw,
        vacuous=(not active) or log_raw >= 0,
    )


def required_tau_for_confidence(m: int, n_t: int, target_prob: float) -> float:
    """Smallest tau with C(m,2) n_t exp(-tau^2/2) <= target_prob."""
    if not 0 < target_prob < 1:
        raise DomainError("target_prob must lie in (0, 1)")
    ratio = math.log(union_prefactor(m, n_t)) - math.log(target_prob)
    return math.sqrt(2 * ratio) if ratio > 0 else 0.0


def pair_difference_mean(sigma: float, d: int) -> float:
    """E||xi_a - xi_b|| for independent N(0, sigma^2 I_d) vectors."""
    return math.sqrt(2) * sigma * chi_mean(d)


def chi_mean(d: int) -> float:
    """Mean of the chi distribution with d degrees of freedom."""
    return math.sqrt(2) * math.exp(math.lgamma((d + 1) / 2) - math.lgamma(d / 2))


def derive_seed(seed: int, *key: int) -> int:
    """Independent 64-bit seed for a sub-stream identified by ``key``."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def frame_generator(seed: int, time_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(int(time_index),))
    return np.random.Generator(np.random.Philox(ss))


def sample_perturbation(series: PointCloudSeries, model: NoiseModel) -> PointCloudSeries:
    """Add N(0, sigma^2) to every coordinate; one Philox stream per (seed, frame)."""
    if model.d != series.dim:
        raise DomainError(f"noise dimension {model.d} does not match series dimension {series.dim}")
    frames = []
    for f in series:
        if model.sigma == 0 or f.m == 0:
            frames.append(f)
            continue
        xi = frame_generator(model.seed, f.time_index).normal(0.0, model.sigma, size=f.coords.shape)
        frames.append(PointCloudFrame(f.time_index, f.time_value, f.ids, f.coords + xi))
    return PointCloudSeries(tuple(frames), name=f"{series.name}+N(0,{model.sigma}^2)")


def _crossings(series: PointCloudSeries, perturbed: PointCloudSeries, eps: np.ndarray) -> bool:
    for fa, fb in zip(series, perturbed):
        da = pair_distance_array(fa)[:, None] <= eps[None, :]
        db = pair_distance_array(fb)[:, None] <= eps[None, :]
        if (da != db).any():
            return True
    return False


def mc_stability_experiment(
    series: PointCloudSeries,
    grid: ScaleGrid,
    model: NoiseModel,
    trials: int,
    k_max: int = 1,
) -> dict:
    """Empirical diagram-change and threshold-crossing frequencies under noise.

    Trial t uses seed ``derive_seed(model.seed, t)``, so any subset of trials
    can be rerun on its own.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if not series.fixed_cardinality:
        raise DomainError("Monte Carlo experiment needs a fixed-cardinality series")
    base = betti_table(series, grid, k_max)
    eps = grid.as_array()
    changed = 0
    crossed = 0
    l1_total = 0
    for t in range(trials):
        pert = sample_perturbation(series, replace(model, seed=derive_seed(model.seed, t)))
        diff = int(np.abs(betti_table(pert, grid, k_max) - base).sum())
        l1_total += diff
        changed += diff > 0
        crossed += _crossings(series, pert, eps)

    m = series[0].m
    report = clearance_report(series, grid)
    if model.sigma == 0:
        tau, bound = math.inf, 0.0
    else:
        tau = tau_star(report.gamma_grid, model.sigma, model.d)
        bound = global_prob_bound(m, len(series), tau).global_bound if m >= 2 else 0.0
    return {
        "trials": trials,
        "seed": model.seed,
        "sigma": model.sigma,
        "k_max": k_max,
        "change_rate": changed / trials,
        "crossing_rate": crossed / trials,
        "mean_l1": l1_total / trials,
        "theoretical_bound": bound,
        "tau_star": tau if math.isfinite(tau) else None,
        "gamma_grid": report.gamma_grid,
        "grid": list(grid.thresholds),
    }
