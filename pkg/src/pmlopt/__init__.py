"""Privacy mechanisms that are utility-optimal under pointwise maximal leakage."""

from .closed_form import (binary_branches, binary_optimal, high_privacy_limit, high_privacy_optimal,
                          uniform_optimal, uniform_optimal_mi)
from .core import (DesignReport, Mechanism, Method, OutputDistribution, Prior, canonicalize, equivalent,
                   identity_mechanism, make_mechanism, make_prior, output_distribution)
from .design import choose_method, design
from .errors import PMLError
from .leakage import (RegionTable, epsilon_m, max_zeros_per_column, pml_of_outcome, pml_per_outcome, region_of,
                      region_table, satisfies)
from .lp import LiftSet, enumerate_lift_vertices, lift_count_bound, lp_optimal, reconstruct, solve_weights
from .polytope import ConstraintSystem, build_constraints, enumerate_vertices, oracle_optimum
from .rr import calibrate, randomized_response, rr_pml_per_outcome, rr_worst_case
from .utility import (ColumnUtility, UtilityKind, column_utility, empirical_mi, lift_utility, mechanism_utility,
                      mi_utility, mutual_information, pearson, tv_utility)

__version__ = "0.1.0"

__all__ = [
    "ColumnUtility", "ConstraintSystem", "DesignReport", "LiftSet", "Mechanism", "Method", "OutputDistribution",
    "PMLError", "Prior", "RegionTable", "UtilityKind", "binary_branches", "binary_optimal", "build_constraints",
    "calibrate", "canonicalize", "choose_method", "column_utility", "design", "empirical_mi", "enumerate_lift_vertices",
    "enumerate_vertices", "epsilon_m", "equivalent", "high_privacy_limit", "high_privacy_optimal",
    "identity_mechanism", "lift_count_bound", "lift_utility", "lp_optimal", "make_mechanism", "make_prior",
    "max_zeros_per_column", "mechanism_utility", "mi_utility", "mutual_information", "output_distribution", "pearson",
    "pml_of_outcome", "pml_per_outcome", "randomized_response", "reconstruct", "region_of", "region_table",
    "rr_pml_per_outcome", "rr_worst_case", "satisfies", "solve_weights", "oracle_optimum", "tv_utility",
    "uniform_optimal", "uniform_optimal_mi",
]
