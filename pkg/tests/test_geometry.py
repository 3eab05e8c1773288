import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from crocker_stability.geometry import (
    DomainError,
    PointCloudFrame,
    PointCloudSeries,
    critical_distances,
    max_displacement,
    merge_sorted_values,
    min_gap_delta,
    pairwise_distances,
    series_from_arrays,
)
from crocker_stability.models import BreathingPolygonSpec, breathing_polygon, polygon_vertices, static_series, vertex_ids
from crocker_stability.noise import NoiseModel, sample_perturbation


def test_unit_square_distances(unit_square):
    d = sorted(v for _, v in pairwise_distances(unit_square[0]))
    assert d[:4] == [1.0] * 4
    assert d[4:] == pytest.approx([math.sqrt(2)] * 2)


def test_single_point_has_no_pairs():
    f = PointCloudFrame(1, 0.0, ["a"], [[0.3, 0.4]])
    assert pairwise_distances(f) == []


def test_empty_frame_rejected():
    f = PointCloudFrame(1, 0.0, [], np.zeros((0, 2)))
    with pytest.raises(DomainError, match="empty frame"):
        pairwise_distances(f)


def test_pair_order_is_lexicographic_on_ids():
    f = PointCloudFrame(1, 0.0, ["c", "a", "b"], [[0, 0], [1, 0], [0, 2]])
    assert [p for p, _ in pairwise_distances(f)] == [("a", "b"), ("a", "c"), ("b", "c")]


def test_pentagon_chords():
    f = static_series(vertex_ids(5), polygon_vertices(5, 1.0))[0]
    d = np.array(sorted(v for _, v in pairwise_distances(f)))
    assert d[:5] == pytest.approx([2 * math.sin(math.pi / 5)] * 5)
    assert d[5:] == pytest.approx([2 * math.sin(2 * math.pi / 5)] * 5)
    assert d[0] == pytest.approx(1.17557, abs=1e-5)
    assert d[-1] == pytest.approx(1.90211, abs=1e-5)


def test_square_spectrum(unit_square):
    spec = critical_distances(unit_square[0], 1e-9)
    assert spec.sorted_distinct == pytest.approx([1.0, math.sqrt(2)])
    assert list(spec.multiplicities) == [4, 2]


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7, 8, 11])
@pytest.mark.parametrize("a", [0.5, 1.0, 1.5])
def test_polygon_spectrum_has_floor_m_half_families(m, a):
    spec = critical_distances(static_series(vertex_ids(m), polygon_vertices(m, a))[0], 1e-9)
    assert len(spec.sorted_distinct) == m // 2
    expected = [2 * a * math.sin(math.pi * ell / m) for ell in range(1, m // 2 + 1)]
    assert spec.sorted_distinct == pytest.approx(expected)
    assert sum(spec.multiplicities) == m * (m - 1) // 2


def test_random_cloud_distances_generic():
    # box side 1000 keeps all gaps far above the tolerance
    rng = np.random.default_rng(20240601)
    pts = rng.uniform(0, 1000, size=(500, 2))
    f = series_from_arrays([pts])[0]
    spec = critical_distances(f, 1e-9)
    raw = np.sort(np.array([v for _, v in pairwise_distances(f)]))
    assert np.diff(raw).min() > 1e-9
    assert len(spec.sorted_distinct) == len(raw) == 124750


@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=40), st.sampled_from([1e-9, 1e-3, 0.1]))
def test_merge_properties(values, tol):
    vals = np.sort(np.array(values))
    means, sizes = merge_sorted_values(vals, tol)
    assert sizes.sum() == len(vals)
    assert np.all(np.diff(means) > tol)
    # each raw value lies in its cluster's span
    edges = np.cumsum(sizes)
    start = 0
    for mu, end in zip(means, edges):
        chunk = vals[start:end]
        assert chunk.min() - 1e-12 <= mu <= chunk.max() + 1e-12
        start = end


@pytest.mark.parametrize("m,expected", [(6, 0.134), (5, 0.363)])
def test_min_gap_breathing(m, expected):
    s = breathing_polygon(BreathingPolygonSpec(m=m, n_t=721))
    assert min_gap_delta(s) == pytest.approx(expected, abs=1e-3)


def test_min_gap_static_square(unit_square):
    assert min_gap_delta(unit_square) == pytest.approx(math.sqrt(2) - 1)


def test_min_gap_undefined_for_triangle():
    s = breathing_polygon(BreathingPolygonSpec(m=3, n_t=4))
    with pytest.raises(DomainError, match="gap undefined"):
        min_gap_delta(s)


def test_max_displacement_identity_and_345(unit_square):
    assert max_displacement(unit_square, unit_square) == 0.0
    f = unit_square[0]
    moved = f.coords.copy()
    moved[2] += (0.003, 0.004)
    pert = PointCloudSeries((f.replace(coords=moved),))
    assert max_displacement(unit_square, pert) == pytest.approx(0.005)


def test_max_displacement_matches_stored_noise():
    s = breathing_polygon(BreathingPolygonSpec(m=5, n_t=10))
    pert = sample_perturbation(s, NoiseModel(0.002, 2, seed=7))
    disp = np.stack([b.coords - a.coords for a, b in zip(s, pert)])
    assert max_displacement(s, pert) == pytest.approx(np.linalg.norm(disp, axis=2).max())


def test_max_displacement_rejects_mismatch(unit_square):
    other = static_series(["a", "b", "c", "e"], unit_square[0].coords)
    with pytest.raises(DomainError, match="not comparable"):
        max_displacement(unit_square, other)


def test_frame_invariants():
    with pytest.raises(DomainError):
        PointCloudFrame(1, 0.0, ["a", "a"], [[0, 0], [1, 1]])
    with pytest.raises(DomainError):
        PointCloudFrame(1, 0.0, ["a", "b"], [[0, 0], [1, 1, 2]])
    f = PointCloudFrame(1, 0.0, ["b", "a"], [[1, 1], [0, 0]])
    assert f.ids == ("a", "b")
    with pytest.raises(ValueError):
        f.coords[0, 0] = 5.0


def test_series_invariants():
    a = PointCloudFrame(1, 0.0, ["a"], [[0, 0]])
    b = PointCloudFrame(1, 1.0, ["a"], [[0, 0]])
    with pytest.raises(DomainError):
        PointCloudSeries((a, b))
    c = PointCloudFrame(2, 1.0, ["a"], [[0, 0, 0]])
    with pytest.raises(DomainError):
        PointCloudSeries((a, c))


@given(arrays(np.float64, (6, 3), elements=st.floats(-5, 5)))
def test_spectrum_counts_all_pairs(coords):
    f = series_from_arrays([coords])[0]
    spec = critical_distances(f, 1e-9)
    assert sum(spec.multiplicities) == 15
    assert np.all(np.diff(spec.sorted_distinct) > 1e-9)
