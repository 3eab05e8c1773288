import numpy as np
import pytest

from crocker_stability.churn import churn_budget
from crocker_stability.crocker import ScaleGrid, betti_table
from crocker_stability.flag import build_vr
from crocker_stability.geometry import DomainError, distance_matrix, series_from_arrays
from crocker_stability.homology import betti_numbers
from crocker_stability.models import INSERTED_ID, pentagon_insertion_scenario
from crocker_stability.oracles import (
    bound_dominance_suite,
    brute_force_betti_oracle,
    certificate_soundness_suite,
    uniform_in_ball,
)
from crocker_stability.stability import global_change_budget


def test_oracle_pentagon(pentagon, pentagon_plus):
    assert tuple(brute_force_betti_oracle(pentagon[0], 1.5, 1)) == (1, 1)
    f = pentagon_plus[0]
    r3 = distance_matrix(f)[f.index_of(INSERTED_ID)].max()
    assert tuple(brute_force_betti_oracle(f, r3, 1)) == (1, 0)


def test_oracle_size_cap():
    f = series_from_arrays([np.random.default_rng(0).random((13, 2))])[0]
    with pytest.raises(DomainError):
        brute_force_betti_oracle(f, 0.5)


@pytest.mark.parametrize("seed", range(30))
def test_oracle_agrees_with_reduction(seed):
    rng = np.random.default_rng(1000 + seed)
    f = series_from_arrays([rng.random((8, 2))])[0]
    for eps in rng.uniform(0.05, 1.2, 20):
        assert tuple(brute_force_betti_oracle(f, eps, 2)) == tuple(betti_numbers(build_vr(f, eps, 3), 2))


def test_ball_samples_inside_and_reach_boundary():
    rng = np.random.default_rng(5)
    x = uniform_in_ball(rng, 20000, 3, 0.2)
    r = np.linalg.norm(x, axis=1)
    assert r.max() <= 0.2
    assert (r > 0.19).mean() == pytest.approx(1 - 0.95**3, abs=0.01)


def test_soundness_suite_small():
    rep = certificate_soundness_suite(10, master_seed=3)
    assert rep["violations"] == 0 and rep["certified"] == 10 and rep["changed"] == 0


def test_soundness_adversarial_never_certified():
    rep = certificate_soundness_suite(20, master_seed=3, factor=2.0)
    assert rep["certified"] == 0
    assert rep["violations"] == 0
    assert rep["changed"] > 0


def test_dominance_suite_small():
    rep = bound_dominance_suite(40, master_seed=1)
    assert rep["violations"] == 0
    assert rep["nonzero"] > 0
    kinds = {sc["kind"] for sc in rep["scenarios"]}
    assert {"perturbation", "churn-insert", "churn-delete"} <= kinds


def test_suites_reproducible():
    a = bound_dominance_suite(10, master_seed=7)
    b = bound_dominance_suite(10, master_seed=7)
    assert a == b


def test_pentagon_insertion_within_budget():
    sc = pentagon_insertion_scenario()
    grid = ScaleGrid([1.3])
    from crocker_stability.churn import apply_event

    diff = betti_table(apply_event(sc.base, sc.event), grid, 1) - betti_table(sc.base, grid, 1)
    assert abs(diff[1, 0, 0]) == 1
    assert abs(diff[1, 0, 0]) <= churn_budget(sc.base, sc.event, grid, 1).geometry_aware_betti == 15


def test_zero_perturbation_observed_zero(pentagon):
    grid = ScaleGrid([0.5, 1.5])
    assert not (betti_table(pentagon, grid, 1) - betti_table(pentagon, grid, 1)).any()
    assert global_change_budget(pentagon, grid, 0.0, 1, 1) >= 0
