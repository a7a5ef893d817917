"""End-to-end solvers and a name-based dispatcher."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from ..instance import MetricInstance
from ..mdtsp import MDTSP_SOLVERS
from .alg1 import alg1
from .alg2 import alg2
from .alg3 import alg3, alg3_iteration, depot_demand_tuples
from .alg4 import CmdVrpContractError, alg4, nearest_depot_cmdvrp
from .alg5 import alg5, scale_instance
from .common import SolverDiagnostic, SolverResult, TransformCertificate, WrongSolverError
from .sdvrp import sdvrp

SOLVER_NAMES = ("alg1", "alg2", "alg3", "alg4", "alg5", "sdvrp")
BIFACTOR = ("alg4", "alg5")


def run_solver(
    name: str,
    inst: MetricInstance,
    eps: Fraction | int | str = 1,
    mdtsp: str = "forest2",
    max_iters: Optional[int] = None,
) -> SolverResult:
    eps = Fraction(eps)
    if name == "alg1":
        return alg1(inst, MDTSP_SOLVERS[mdtsp](), max_iters)
    if name == "alg2":
        return alg2(inst, MDTSP_SOLVERS[mdtsp](), max_iters)
    if name == "alg3":
        return alg3(inst, max_iters)
    if name == "alg4":
        return alg4(inst, eps)
    if name == "alg5":
        return alg5(inst, eps, max_iters)
    if name == "sdvrp":
        return sdvrp(inst)
    raise ValueError(f"unknown solver {name!r}")


__all__ = [
    "SOLVER_NAMES",
    "BIFACTOR",
    "CmdVrpContractError",
    "SolverDiagnostic",
    "SolverResult",
    "TransformCertificate",
    "WrongSolverError",
    "alg1",
    "alg2",
    "alg3",
    "alg3_iteration",
    "alg4",
    "alg5",
    "depot_demand_tuples",
    "nearest_depot_cmdvrp",
    "run_solver",
    "scale_instance",
    "sdvrp",
]
