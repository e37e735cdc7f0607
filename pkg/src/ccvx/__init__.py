"""Distances, minimal bases, and verified invariant-metric estimates on
C-convex domains in C^n."""

from .bergman import BergmanEstimate, GramModel, build_gram, kernel_at, metric_at
from .bounds import (EstimateConstants, MetricBound, bergman_distance_bound,
                     estimate_constants, exponent_experiment,
                     frame_comparison_check, frame_sum_bounds,
                     kernel_product_bounds, metric_sandwich_bounds)
from .domains import (Ball, ComplexEllipsoid, Domain, KoebeSlitPlane, LinearImage,
                      Polydisc, Product, SymmetryInfo, WeightedDiamond, from_json,
                      sample_uniform, unit_disc)
from .geometry import (DirectionalDistance, MinimalBasisFrame, boundary_distance,
                       decompose, diamond_inclusion_check, directional_distance,
                       minimal_basis)
from .harness import CheckRecord, Report, Scenario, report_emit, run_scenario
from .linalg import (basis_comparability_check, complete_to_unitary,
                     hermitian_inner)
from .oracles import (MetricValue, bergman_metric_oracle, bergman_oracle,
                      gamma_kappa_oracle, koebe_map, koebe_map_inverse)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
