import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from crocker_stability.models import pentagon_insertion_scenario, polygon_vertices, static_series, vertex_ids
from crocker_stability.churn import apply_event

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def pentagon():
    return static_series(vertex_ids(5), polygon_vertices(5, 1.0))


@pytest.fixture
def pentagon_plus():
    sc = pentagon_insertion_scenario()
    return apply_event(sc.base, sc.event)


@pytest.fixture
def unit_square():
    return static_series(["a", "b", "c", "d"], np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=float))


def pytest_terminal_summary(terminalreporter):
    from tests.test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
