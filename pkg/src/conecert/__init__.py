"""Certificates for finite set-valued vector optimization problems over polyhedral cones."""

from .cones import DEFAULT_MARGIN, PolyhedralCone, cone_contains, dual_constraints, interior_point
from .convexity import Sampling, Verdict, check_condition_a1, check_condition_b1, check_set_convexity, classify
from .errors import ConecertError, DegenerateConeError, DimensionError, InstanceError
from .generators import generate_quarter_annulus, generate_random_instance
from .instance import SetValuedMap, VPInstance, feasible_set, shift_objective
from .io import parse_instance, write_instance
from .lagrangian import VectorLagrangianPair, construct, lagrangian_map, lagrangian_roundtrip, vpst_weak_efficiency
from .lp import DEFAULT_TOL, LinearSystem, Relation, Status, maximize_margin, solve, verify_farkas
from .multipliers import (
    MultiplierCertificate,
    check_nnamcq,
    check_scq,
    find_multipliers,
    scalarize_and_solve,
    solve_system_i,
    necessity_pipeline,
    sufficiency_check,
    characterization_check,
    verify_certificate,
    weak_efficiency_bruteforce,
)

__version__ = "0.1.0"

__all__ = [
    "ConecertError",
    "DEFAULT_MARGIN",
    "DEFAULT_TOL",
    "DegenerateConeError",
    "DimensionError",
    "InstanceError",
    "LinearSystem",
    "MultiplierCertificate",
    "PolyhedralCone",
    "Relation",
    "Sampling",
    "SetValuedMap",
    "Status",
    "VPInstance",
    "VectorLagrangianPair",
    "Verdict",
    "check_condition_a1",
    "check_condition_b1",
    "check_nnamcq",
    "check_scq",
    "check_set_convexity",
    "classify",
    "cone_contains",
    "construct",
    "dual_constraints",
    "feasible_set",
    "find_multipliers",
    "generate_quarter_annulus",
    "generate_random_instance",
    "interior_point",
    "lagrangian_map",
    "maximize_margin",
    "parse_instance",
    "scalarize_and_solve",
    "shift_objective",
    "solve",
    "solve_system_i",
    "necessity_pipeline",
    "sufficiency_check",
    "characterization_check",
    "lagrangian_roundtrip",
    "verify_certificate",
    "verify_farkas",
    "vpst_weak_efficiency",
    "weak_efficiency_bruteforce",
    "write_instance",
]
