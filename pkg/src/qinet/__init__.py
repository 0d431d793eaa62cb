"""Stationary analysis of production-inventory networks with a shared supplier.

Several make-to-order production sites each hold a local base-stock
inventory; one shared supplier rebuilds the stocks item by item, always
routing to the site(s) with the largest deficit (ties split evenly).  The
joint stationary law factorizes into independent geometric-tailed queue
marginals and a finite inventory measure, which this package computes by
four mutually cross-validating routes: a direct linear-algebra solve, a
closed form for unit base stocks, a recursive balance-equation
elimination for two locations, and event-driven simulation.
"""

from .analysis import (
    ErgodicityReport,
    HeterogeneousCutReport,
    LocationDiagnostic,
    QueueMarginal,
    check_cut_heterogeneous,
    check_cut_homogeneous,
    check_symmetry,
    ergodicity_check,
    inventory_marginal,
    queue_marginal,
    total_variation,
)
from .closed_form import theta_unit_base_stock, unit_base_stock_weights
from .errors import (
    ConfigError,
    DegenerateEliminationError,
    ErgodicityError,
    PreconditionError,
    QinetError,
    ReducibilityError,
    SequencingError,
    SolverError,
)
from .exact import PiWindow, ThetaMeasure, solve_pi_truncated, solve_theta_exact
from .generator import ReducedGenerator, build_reduced_generator, full_transitions
from .model import (
    FullState,
    InventoryState,
    NetworkConfig,
    ServiceRateProfile,
    enumerate_inventory_states,
    routing_prob,
    routing_probs,
)
from .recursive import AffineKappa, ThetaTable, gbe_residual, solve_theta_recursive
from .simulate import SimulationResult, decoupling_test, merge_results, simulate

__version__ = "0.1.0"

__all__ = [
    "AffineKappa",
    "ConfigError",
    "DegenerateEliminationError",
    "ErgodicityError",
    "ErgodicityReport",
    "FullState",
    "HeterogeneousCutReport",
    "InventoryState",
    "LocationDiagnostic",
    "NetworkConfig",
    "PiWindow",
    "PreconditionError",
    "QinetError",
    "QueueMarginal",
    "ReducedGenerator",
    "ReducibilityError",
    "SequencingError",
    "ServiceRateProfile",
    "SimulationResult",
    "SolverError",
    "ThetaMeasure",
    "ThetaTable",
    "build_reduced_generator",
    "check_cut_heterogeneous",
    "check_cut_homogeneous",
    "check_symmetry",
    "decoupling_test",
    "enumerate_inventory_states",
    "ergodicity_check",
    "full_transitions",
    "gbe_residual",
    "inventory_marginal",
    "merge_results",
    "queue_marginal",
    "routing_prob",
    "routing_probs",
    "simulate",
    "solve_pi_truncated",
    "solve_theta_exact",
    "solve_theta_recursive",
    "theta_unit_base_stock",
    "total_variation",
    "unit_base_stock_weights",
]
