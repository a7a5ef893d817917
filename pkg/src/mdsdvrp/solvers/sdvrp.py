"""Single-depot split delivery: Christofides tour cut by the best-start partition."""

from __future__ import annotations

from fractions import Fraction

from ..graphprims import christofides_cycle
from ..instance import MetricInstance
from ..partition import partition_cost_bound, partition_depot_cycle
from ..transform import to_solution
from .common import SolverResult, WrongSolverError, empty_result, tours_cost


def sdvrp(inst: MetricInstance) -> SolverResult:
    claimed = Fraction(5, 2)
    if inst.k != 1:
        raise WrongSolverError(f"sdvrp needs exactly one depot, instance has k={inst.k}")
    if inst.n == 0:
        return empty_result("sdvrp", claimed)
    depot = 0
    tour = christofides_cycle(range(inst.size), inst.cost, depot)
    members = list(tour[1:])
    demands = [inst.demand(v) for v in members]
    tours = partition_depot_cycle(inst.cost, depot, members, demands, inst.Q)
    if len(tours) > inst.m:
        raise RuntimeError("more tours than vehicles")
    out = [(depot, t) for t in tours]
    cost = tours_cost(inst, out)
    bound = partition_cost_bound(inst.cost, depot, members, demands, inst.Q)
    return SolverResult(
        solver="sdvrp",
        solution=to_solution(inst, out),
        cost=cost,
        claimed_ratio=claimed,
        notes=(f"partition_bound={bound}",),
    )
