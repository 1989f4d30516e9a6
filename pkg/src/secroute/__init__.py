"""Secure multi-hop routing and transmit power optimization under randomly
located eavesdroppers, with optional friendly jamming.

The package covers the full pipeline: closed-form outage analytics for a
route, closed-form power allocation under a secrecy outage budget, optimal
route selection by weighted shortest path, jammer-assisted power optimization
solved globally (outer polyblock approximation plus one-dimensional jammer
search) and locally (successive convex approximation), and a Monte Carlo
engine validating every closed form.
"""

from .geometry import (
    NetworkInstance,
    Region,
    SystemParams,
    db_to_linear,
    distance,
    farthest_pair,
    pairwise_distances,
    random_instance,
    sample_ppp,
    sample_rayleigh_power,
    substream,
)
from .jamming import FeasibilityReport, FeasibleRegion, JammerConfig
from .montecarlo import SimReport, simulate_cop, simulate_sop, simulate_sop_jamming
from .outage import DerivedConstants, Route, cop, omega, psi, sop, sop_budget
from .polyblock import polyblock_solve, solve_with_jammer_search
from .power import PowerSolution, allocate_powers, min_cop_for_route
from .quadrature import FieldQuadrature, QuadratureError
from .routing import (
    WeightedGraph,
    enumerate_all_routes,
    find_optimal_route,
    link_weight,
    run_algorithm_1,
)
from .sca import ScaIterate, initial_point_from_polyblock, multistart_sca, sca_solve

__version__ = "0.1.0"

__all__ = [
    "DerivedConstants",
    "FeasibilityReport",
    "FeasibleRegion",
    "FieldQuadrature",
    "JammerConfig",
    "NetworkInstance",
    "PowerSolution",
    "QuadratureError",
    "Region",
    "Route",
    "ScaIterate",
    "SimReport",
    "SystemParams",
    "WeightedGraph",
    "allocate_powers",
    "cop",
    "db_to_linear",
    "distance",
    "enumerate_all_routes",
    "farthest_pair",
    "find_optimal_route",
    "initial_point_from_polyblock",
    "link_weight",
    "min_cop_for_route",
    "multistart_sca",
    "omega",
    "pairwise_distances",
    "polyblock_solve",
    "psi",
    "random_instance",
    "run_algorithm_1",
    "sample_ppp",
    "sample_rayleigh_power",
    "sca_solve",
    "simulate_cop",
    "simulate_sop",
    "simulate_sop_jamming",
    "solve_with_jammer_search",
    "sop",
    "sop_budget",
    "substream",
]
