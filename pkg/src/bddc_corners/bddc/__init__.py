"""Substructuring solver: Schur reduction, constraints, BDDC and PCG."""

from .constraints import MODES, ConstraintSet, build_constraints, normalize_mode
from .factor import PIVOT_TOL, factorize
from .pcg import SolveReport, pcg, solve_interface
from .preconditioner import BddcOperator, Diagnosis, apply_preconditioner, build_preconditioner, check_invertibility
from .schur import SchurSystem, reduce_to_schur

__all__ = [
    "MODES",
    "PIVOT_TOL",
    "BddcOperator",
    "ConstraintSet",
    "Diagnosis",
    "SchurSystem",
    "SolveReport",
    "apply_preconditioner",
    "build_constraints",
    "build_preconditioner",
    "check_invertibility",
    "factorize",
    "normalize_mode",
    "pcg",
    "reduce_to_schur",
    "solve_interface",
]
