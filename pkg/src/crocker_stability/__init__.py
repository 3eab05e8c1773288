"""Crocker diagrams for evolving point clouds, with stability certificates and change budgets."""

from .churn import (
    DELETE,
    INSERT,
    ChurnBudget,
    ChurnEvent,
    apply_event,
    churn_budget,
    exact_simplex_change_count,
    geometry_aware_budget,
    global_churn_bound,
    worst_case_betti_budget,
)
from .crocker import CrockerDiagram, ScaleGrid, betti_table, build_crocker, diff_map, l1_distance
from .flag import FlagComplex, build_vr
from .formats import emit_heatmap_svg, parse_crocker, parse_point_cloud_csv, serialize_crocker, serialize_point_cloud_csv
from .geometry import (
    DomainError,
    PointCloudFrame,
    PointCloudSeries,
    critical_distances,
    max_displacement,
    min_gap_delta,
    pairwise_distances,
    series_from_arrays,
)
from .homology import BettiVector, betti0_union_find, betti_numbers, boundary_matrix
from .models import (
    BreathingPolygonSpec,
    FeasibilitySpec,
    breathing_polygon,
    epithelial_feasibility,
    min_gap_closed_form,
    pentagon_insertion_scenario,
)
from .noise import NoiseModel, global_prob_bound, mc_stability_experiment, tau_star
from .stability import (
    CERTIFIED_EXACT,
    NOT_CERTIFIED,
    ClearanceReport,
    StabilityCertificate,
    certify_exact,
    clearance_report,
    global_change_budget,
    local_density,
)

__version__ = "0.1.0"
