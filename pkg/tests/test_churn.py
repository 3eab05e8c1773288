from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crocker_stability.churn import (
    DELETE,
    INSERT,
    ChurnEvent,
    apply_event,
    churn_budget,
    exact_simplex_change_count,
    geometry_aware_budget,
    global_churn_bound,
    worst_case_betti_budget,
    worst_case_betti_budget_proportion,
)
from crocker_stability.crocker import ScaleGrid, betti_table
from crocker_stability.geometry import DomainError, series_from_arrays
from crocker_stability.models import pentagon_insertion_scenario, static_series


def enumerate_touching(q, m, k, kind):
    """Count (k+1)-subsets of a complete vertex set that touch a modified vertex."""
    total = m + q if kind == INSERT else m
    modified = set(range(q))
    return sum(1 for s in combinations(range(total), k + 1) if modified & set(s))


@pytest.mark.parametrize("kind", [INSERT, DELETE])
@pytest.mark.parametrize("q,m,k", [(1, 5, 1), (2, 10, 1), (3, 7, 2), (2, 6, 0), (1, 4, 3), (4, 8, 2)])
def test_exact_count_matches_enumeration(q, m, k, kind):
    assert exact_simplex_change_count(q, m, k, kind) == enumerate_touching(q, m, k, kind)


def test_exact_count_examples():
    assert exact_simplex_change_count(1, 5, 1, INSERT) == 5
    assert exact_simplex_change_count(1, 17, 0, INSERT) == 1
    assert exact_simplex_change_count(2, 10, 1, DELETE) == 17
    with pytest.raises(DomainError):
        exact_simplex_change_count(5, 3, 1, DELETE)


def test_worst_case_budget():
    assert worst_case_betti_budget(1, 5, 1, INSERT) == 15
    assert worst_case_betti_budget(7, 7, 0, DELETE) == 7 + comb(7, 2)
    assert exact_simplex_change_count(7, 7, 0, DELETE) == 7
    for m in (100, 200, 400):
        ratio = worst_case_betti_budget(2, 2 * m, 1) / worst_case_betti_budget(2, m, 1)
        assert 3.5 < ratio < 4.5
    assert worst_case_betti_budget_proportion(0.1, 50, 1) == worst_case_betti_budget(5, 50, 1)


@pytest.mark.parametrize("k,value", [(1, 15), (0, 6), (2, 20)])
def test_geometry_aware_budget(k, value):
    assert geometry_aware_budget(1, 6, k) == value


@given(st.integers(1, 5), st.integers(1, 20), st.integers(0, 3))
def test_geometry_budget_below_worst_case_for_insert(q, m, k):
    for lam in range(1, m + 1):
        assert geometry_aware_budget(q, lam, k) <= worst_case_betti_budget(q, m, k, INSERT)


@given(st.integers(1, 5), st.integers(1, 20), st.integers(0, 3))
def test_geometry_budget_below_worst_case_for_delete(q, extra, k):
    m = q + extra
    for lam in range(1, m - q + 1):
        assert geometry_aware_budget(q, lam, k) <= worst_case_betti_budget(q, m, k, DELETE)


def test_global_churn_bound():
    assert global_churn_bound(5, 5, 1, [6], 1) == 15
    assert global_churn_bound(10, 3, 1, [6], 1) == 8 * 15
    assert global_churn_bound(4, 1, 2, {0.5: 2, 1.0: 3}, 1) == 4 * 2 * (1 + 3)
    a = global_churn_bound(6, 2, 1, [3, 4], 1)
    b = global_churn_bound(6, 5, 2, [5, 2], 1)
    assert a + b == 5 * (3 + 6) + 2 * 2 * (10 + 1)
    with pytest.raises(DomainError):
        global_churn_bound(4, 5, 1, [2], 1)


def test_bound_scales_with_persistence():
    grid = ScaleGrid([1.3])
    one = churn_budget(pentagon_insertion_scenario(n_t=1).base, pentagon_insertion_scenario().event, grid, 1).global_l1
    for r in (2, 5):
        sc = pentagon_insertion_scenario(n_t=r)
        assert churn_budget(sc.base, sc.event, grid, 1).global_l1 == r * one


def test_insert_every_frame():
    sc = pentagon_insertion_scenario(n_t=4)
    after = apply_event(sc.base, sc.event)
    assert all(f.m == 6 for f in after)


def test_late_event_leaves_early_frames():
    sc = pentagon_insertion_scenario(n_t=4)
    ev = ChurnEvent(3, INSERT, ("v*",), sc.event.inserted_coords)
    after = apply_event(sc.base, ev)
    assert [f.m for f in after] == [5, 5, 6, 6]


def test_delete_then_reinsert_roundtrip():
    s = series_from_arrays([np.arange(8.0).reshape(4, 2)] * 3)
    gone = apply_event(s, ChurnEvent(2, DELETE, ("p1",)))
    back = apply_event(gone, ChurnEvent(2, INSERT, ("p1",), ((2.0, 3.0),)))
    assert all(a == b for a, b in zip(s, back))


def test_event_errors():
    s = series_from_arrays([np.zeros((2, 2)) + [[0, 0], [1, 1]]])
    with pytest.raises(DomainError, match="not present"):
        apply_event(s, ChurnEvent(1, DELETE, ("zz",)))
    with pytest.raises(DomainError, match="already present"):
        apply_event(s, ChurnEvent(1, INSERT, ("p0",), ((5.0, 5.0),)))
    with pytest.raises(DomainError):
        ChurnEvent(1, "MOVE", ("p0",))
    with pytest.raises(DomainError):
        ChurnEvent(1, INSERT, ())


def test_event_json_roundtrip():
    ev = ChurnEvent(3, "insert", ("a", "b"), ((0.0, 1.0), (2.0, 3.5)))
    assert ChurnEvent.from_json(ev.to_json()) == ev
    ev = ChurnEvent(1, DELETE, ("x",))
    assert ChurnEvent.from_json(ev.to_json()) == ev


@pytest.mark.parametrize("seed", range(10))
def test_random_deletion_within_bounds(seed):
    rng = np.random.default_rng(seed)
    frames = [rng.random((10, 2)) for _ in range(3)]
    s = series_from_arrays(frames)
    grid = ScaleGrid(np.sort(rng.uniform(0.1, 0.9, 5)))
    gone = tuple(rng.choice(s[0].ids, 2, replace=False))
    ev = ChurnEvent(2, DELETE, gone)
    after = apply_event(s, ev)
    diff = np.abs(betti_table(after, grid, 1) - betti_table(s, grid, 1))
    for k in (0, 1):
        b = churn_budget(s, ev, grid, k)
        assert diff[k].sum() <= b.global_l1
        # both caps hold; the geometry-aware one need not be the smaller for deletions
        assert diff[k].max() <= b.geometry_aware_betti
        assert diff[k].max() <= b.worst_case_betti
