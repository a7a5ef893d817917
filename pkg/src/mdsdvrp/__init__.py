"""Approximation algorithms for the multi-depot split delivery vehicle routing problem."""

from .instance import (
    SCALE,
    AuditReport,
    MetricInstance,
    Solution,
    Tour,
    check_solution,
    generate_instance,
    parse_instance,
    validate_instance,
    write_instance,
)
from .oracle import audit_ratio, solve_exact
from .solvers import SOLVER_NAMES, SolverResult, run_solver

__all__ = [
    "SCALE",
    "SOLVER_NAMES",
    "AuditReport",
    "MetricInstance",
    "Solution",
    "SolverResult",
    "Tour",
    "audit_ratio",
    "check_solution",
    "generate_instance",
    "parse_instance",
    "run_solver",
    "solve_exact",
    "validate_instance",
    "write_instance",
]
