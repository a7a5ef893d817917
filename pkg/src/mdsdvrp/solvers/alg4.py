"""Bi-factor solver: capacitated multi-depot routing, re-cut per depot."""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from math import floor
from typing import Callable, Optional, Sequence

from ..graphprims import christofides_cycle, edge_key, eulerian_tour, shortcut
from ..instance import MetricInstance
from ..partition import DepotTour, partition_depot_cycle
from ..transform import to_solution
from .common import SolverResult, as_fraction, empty_result, tours_cost


class CmdVrpContractError(ValueError):
    """A capacitated multi-depot plug-in returned tours violating its contract."""


CmdVrpSolver = Callable[[MetricInstance, Fraction], Sequence[tuple[int, DepotTour]]]


def depot_allowance(inst: MetricInstance, eps: Fraction) -> list[int]:
    """Integer demand each depot may serve: floor((r_u + eps) * Q)."""
    return [floor((r + eps) * inst.Q) for r in inst.fleets]


def nearest_depot_cmdvrp(inst: MetricInstance, eps: Fraction) -> list[tuple[int, DepotTour]]:
    """Default plug-in: nearest-depot assignment under the depot allowance
    (overflow spills to the next-nearest depot), then one Christofides tour per
    depot cut into capacity-Q tours.  No approximation certificate."""
    room = depot_allowance(inst, eps)
    c = inst.cost
    share: list[dict[int, int]] = [dict() for _ in inst.depots]
    for v in inst.customers:
        left = inst.demand(v)
        for u in sorted(inst.depots, key=lambda d: (c[d][v], d)):
            take = min(left, room[u])
            if take:
                share[u][v] = take
                room[u] -= take
                left -= take
            if not left:
                break
        if left:
            raise CmdVrpContractError("depot allowances cannot absorb total demand")
    out: list[tuple[int, DepotTour]] = []
    for u in inst.depots:
        if not share[u]:
            continue
        cyc = christofides_cycle([u, *share[u]], c, u)
        members = list(cyc[1:])
        for t in partition_depot_cycle(c, u, members, [share[u][v] for v in members], inst.Q):
            out.append((u, t))
    return out


def check_cmdvrp_output(inst: MetricInstance, eps: Fraction, tours: Sequence[tuple[int, DepotTour]]) -> None:
    problems: list[str] = []
    served: dict[int, int] = defaultdict(int)
    per_depot = [0] * inst.k
    for i, (u, t) in enumerate(tours):
        if not 0 <= u < inst.k:
            problems.append(f"tour {i}: unknown depot {u}")
            continue
        if len(t.seq) < 2 or t.seq[0] != u or t.seq[-1] != u:
            problems.append(f"tour {i}: does not start and end at depot {u}")
        visited = set(t.seq)
        load = 0
        for v, a in t.load.items():
            if not isinstance(a, int) or a < 0:
                problems.append(f"tour {i}: bad amount {a!r} for {v}")
                continue
            if a and (v not in visited or inst.is_depot(v) or not 0 <= v < inst.size):
                problems.append(f"tour {i}: serves {v} without visiting it")
            served[v] += a
            load += a
        if load > inst.Q:
            problems.append(f"tour {i}: load {load} > Q={inst.Q}")
        per_depot[u] += load
    for u in inst.depots:
        if per_depot[u] > (inst.fleets[u] + eps) * inst.Q:
            problems.append(f"depot {u}: serves {per_depot[u]} > (r_u + eps) Q")
    for v in inst.customers:
        if served[v] != inst.demand(v):
            problems.append(f"customer {v}: served {served[v]} of {inst.demand(v)}")
    if problems:
        raise CmdVrpContractError("; ".join(problems))


def alg4(inst: MetricInstance, eps=Fraction(1), cmdvrp: Optional[CmdVrpSolver] = None) -> SolverResult:
    eps = as_fraction(eps)
    gamma = 1 + eps
    if inst.n == 0:
        return empty_result("alg4", None, gamma)
    cmdvrp = cmdvrp or nearest_depot_cmdvrp
    raw = list(cmdvrp(inst, eps))
    check_cmdvrp_output(inst, eps, raw)
    # integral capacity: floor((1+eps)Q) keeps every load integral, and
    # ceil(floor((r+eps)Q) / floor((1+eps)Q)) <= r still holds
    cap = floor(gamma * inst.Q)
    c = inst.cost
    out: list[tuple[int, DepotTour]] = []
    for u in inst.depots:
        mine = [t for d, t in raw if d == u]
        lam: dict[int, int] = defaultdict(int)
        edges = []
        for t in mine:
            edges.extend(edge_key(a, b) for a, b in zip(t.seq, t.seq[1:]) if a != b)
            for v, a in t.load.items():
                lam[v] += a
        keep = {v for v, a in lam.items() if a > 0}
        if not keep:
            continue
        walk = eulerian_tour(edges, u)
        members = [v for v in shortcut(walk, keep | {u}) if v != u]
        tours = partition_depot_cycle(c, u, members, [lam[v] for v in members], cap)
        if len(tours) > inst.fleets[u]:
            raise RuntimeError(f"depot {u} needs {len(tours)} tours but owns {inst.fleets[u]}")
        out.extend((u, t) for t in tours)
    return SolverResult(
        solver="alg4",
        solution=to_solution(inst, out),
        cost=tours_cost(inst, out),
        claimed_ratio=None,
        gamma=gamma,
        notes=("heuristic plug-in: no certified ratio", f"capacity={cap}"),
    )
