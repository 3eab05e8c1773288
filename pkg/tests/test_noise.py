import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crocker_stability.crocker import ScaleGrid
from crocker_stability.geometry import DomainError
from crocker_stability.models import BreathingPolygonSpec, breathing_polygon
from crocker_stability.noise import (
    NoiseModel,
    chi_mean,
    derive_seed,
    global_prob_bound,
    mc_stability_experiment,
    pair_crossing_bound,
    pair_difference_mean,
    required_tau_for_confidence,
    sample_perturbation,
    tau_star,
    union_prefactor,
)


@pytest.mark.parametrize("sigma,expected", [(0.002, 9.9), (0.008, 1.42)])
def test_tau_star_worked_numbers(sigma, expected):
    assert tau_star(0.032, sigma, 2) == pytest.approx(expected, abs=0.01)


def test_tau_star_activation_boundary():
    assert tau_star(math.sqrt(2) * 0.01 * math.sqrt(3), 0.01, 3) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        tau_star(0.1, 0.0, 2)


def test_pair_bound():
    assert pair_crossing_bound(9.9) == pytest.approx(5.2e-22, rel=0.02)
    assert pair_crossing_bound(0.0) == 1.0
    assert pair_crossing_bound(-3.0) == 1.0
    assert pair_crossing_bound(1.42) == pytest.approx(math.exp(-1.42**2 / 2))
    assert pair_crossing_bound(1.42) == pytest.approx(0.365, abs=1e-3)


def test_global_bound_worked_numbers():
    rep = global_prob_bound(5, 51, 9.9)
    assert 1e-20 < rep.global_bound < 1e-18
    assert not rep.vacuous
    rep = global_prob_bound(5, 51, 1.42)
    assert rep.raw == pytest.approx(186, rel=0.01)
    assert rep.global_bound == 1.0 and rep.vacuous
    assert union_prefactor(500, 51) == 6_362_250


def test_global_bound_log_space_no_underflow():
    rep = global_prob_bound(5, 51, 60.0)
    assert rep.global_bound > 0.0 or rep.log_raw < -700
    assert rep.log_raw == pytest.approx(math.log(510) - 1800)


@given(st.integers(2, 1000), st.integers(1, 500), st.floats(0, 30))
def test_global_bound_invariants(m, n_t, tau):
    rep = global_prob_bound(m, n_t, tau)
    assert 0 <= rep.global_bound <= 1
    assert rep.global_bound == pytest.approx(min(1.0, rep.prefactor * rep.pair_bound), rel=1e-9, abs=1e-300)
    assert rep.activation_ok == (tau > 0)


def test_required_tau():
    assert required_tau_for_confidence(500, 51, 0.01) == pytest.approx(6.4, abs=0.05)
    assert required_tau_for_confidence(2, 1, math.exp(-2)) == pytest.approx(2.0)
    tau = required_tau_for_confidence(5, 51, 1e-19)
    assert global_prob_bound(5, 51, tau).global_bound == pytest.approx(1e-19, rel=1e-9)


def test_chi_mean_values():
    # numerical integration of r * chi_d density as an independent check
    r = np.linspace(0, 40, 400001)
    for d in (1, 2, 3, 5):
        dens = r ** (d - 1) * np.exp(-r * r / 2) / (2 ** (d / 2 - 1) * math.gamma(d / 2))
        assert chi_mean(d) == pytest.approx(np.trapezoid(r * dens, r), rel=1e-6)
    assert chi_mean(2) == pytest.approx(math.sqrt(math.pi / 2))


def test_pair_difference_mean_empirical():
    rng = np.random.default_rng(11)
    sigma = 0.002
    xi = rng.normal(0, sigma, size=(100_000, 2, 2))
    emp = np.linalg.norm(xi[:, 0] - xi[:, 1], axis=1).mean()
    assert emp == pytest.approx(pair_difference_mean(sigma, 2), rel=0.01)


def test_sampling_determinism_and_std():
    s = breathing_polygon(BreathingPolygonSpec(m=5, n_t=3))
    model = NoiseModel(0.01, 2, seed=42)
    a, b = sample_perturbation(s, model), sample_perturbation(s, model)
    assert all(np.array_equal(x.coords, y.coords) for x, y in zip(a, b))
    big = breathing_polygon(BreathingPolygonSpec(m=10_000, n_t=5))
    pert = sample_perturbation(big, model)
    xi = np.concatenate([p.coords - q.coords for p, q in zip(pert, big)]).ravel()
    assert xi.std() == pytest.approx(0.01, rel=0.02)


def test_sampling_depends_on_seed_and_frame():
    s = breathing_polygon(BreathingPolygonSpec(m=5, n_t=2))
    a = sample_perturbation(s, NoiseModel(0.01, 2, seed=1))
    b = sample_perturbation(s, NoiseModel(0.01, 2, seed=2))
    assert not np.array_equal(a[0].coords, b[0].coords)
    assert not np.array_equal(a[0].coords - s[0].coords, a[1].coords - s[1].coords)
    assert derive_seed(5, 1) != derive_seed(5, 2)


def test_noise_model_validation():
    with pytest.raises(DomainError):
        NoiseModel(-0.1, 2)
    s = breathing_polygon(BreathingPolygonSpec(m=5, n_t=2))
    with pytest.raises(DomainError):
        sample_perturbation(s, NoiseModel(0.1, 3))


def test_mc_zero_noise():
    s = breathing_polygon(BreathingPolygonSpec(m=5, n_t=11))
    rep = mc_stability_experiment(s, ScaleGrid.multiples(0.1, 15), NoiseModel(0.0, 2), 5)
    assert rep["change_rate"] == 0 and rep["mean_l1"] == 0


def test_mc_huge_noise():
    s = breathing_polygon(BreathingPolygonSpec(m=5, n_t=11))
    rep = mc_stability_experiment(s, ScaleGrid.multiples(0.1, 15), NoiseModel(0.5, 2, seed=9), 50)
    assert rep["change_rate"] > 0.9
    assert rep["theoretical_bound"] == 1.0


def test_mc_rate_below_union_bound_when_bound_is_informative():
    # a well-separated configuration: two points at distance 1, grid far from 1
    from crocker_stability.models import static_series

    s = static_series(["a", "b"], np.array([[0.0, 0.0], [1.0, 0.0]]), n_t=10)
    grid = ScaleGrid([0.5, 1.5])
    rep = mc_stability_experiment(s, grid, NoiseModel(0.05, 2, seed=3), 200)
    assert rep["theoretical_bound"] < 0.01
    assert rep["change_rate"] <= rep["theoretical_bound"]
    assert rep["crossing_rate"] >= rep["change_rate"]
