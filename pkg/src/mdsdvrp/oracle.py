"""Exact brute-force optimum for tiny instances, lower bounds, ratio audits.

The oracle shares no routing code with the solvers: tours are priced by
permutation enumeration, feasibility of a tour multiset is decided by the
transportation (Hall) condition over customer subsets, and the witness
assignment is found by backtracking over integral splits.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Optional, Sequence, Union

from .instance import MetricInstance, Solution, Tour, check_solution


class OracleRefusal(ValueError):
    """The instance exceeds the configured oracle limits."""


@dataclass(frozen=True)
class OracleLimits:
    n: int = 5
    Q: int = 6
    m: int = 4
    demand_factor: int = 2

    @classmethod
    def from_env(cls) -> "OracleLimits":
        """Read ``MDSDVRP_ORACLE_LIMITS`` like ``n=6,Q=8,m=4,demand_factor=2``."""
        raw = os.environ.get("MDSDVRP_ORACLE_LIMITS", "").strip()
        if not raw:
            return cls()
        fields = {}
        for part in raw.split(","):
            key, _, val = part.partition("=")
            key = key.strip()
            if key not in ("n", "Q", "m", "demand_factor") or not val.strip().isdigit():
                raise ValueError(f"bad MDSDVRP_ORACLE_LIMITS entry {part!r}")
            fields[key] = int(val)
        return cls(**fields)

    def check(self, inst: MetricInstance) -> None:
        over = []
        if inst.n > self.n:
            over.append(f"n={inst.n} > {self.n}")
        if inst.Q > self.Q:
            over.append(f"Q={inst.Q} > {self.Q}")
        if inst.m > self.m:
            over.append(f"m={inst.m} > {self.m}")
        if inst.demands and max(inst.demands) > self.demand_factor * inst.Q:
            over.append(f"max q={max(inst.demands)} > {self.demand_factor}*Q")
        if over:
            raise OracleRefusal("oracle limits exceeded: " + ", ".join(over))


@dataclass(frozen=True)
class OracleResult:
    opt_cost: int
    witness: Solution
    explored: int


def _tour_by_permutation(cost, depot: int, members: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    best = None
    for perm in permutations(members):
        seq = (depot, *perm, depot)
        c = sum(cost[a][b] for a, b in zip(seq, seq[1:]))
        if best is None or c < best[0]:
            best = (c, seq)
    assert best is not None
    return best


def _assign(demands: list[int], masks: list[int], Q: int, n: int) -> Optional[list[dict[int, int]]]:
    """Backtracking integral split of each customer's demand over the tours
    visiting it, with per-tour capacity Q."""
    room = [Q] * len(masks)
    plan: list[dict[int, int]] = [dict() for _ in masks]

    def place(v: int) -> bool:
        if v == n:
            return True
        options = [i for i, msk in enumerate(masks) if msk >> v & 1]
        return spread(v, demands[v], options, 0)

    def spread(v: int, left: int, options: list[int], j: int) -> bool:
        if left == 0:
            return place(v + 1)
        if j == len(options):
            return False
        i = options[j]
        top = min(left, room[i])
        for amount in range(top, -1, -1):
            room[i] -= amount
            if amount:
                plan[i][v] = amount
            if spread(v, left - amount, options, j + 1):
                return True
            room[i] += amount
            plan[i].pop(v, None)
        return False

    return plan if place(0) else None


def solve_exact(inst: MetricInstance, limits: Optional[OracleLimits] = None) -> OracleResult:
    """Minimum-cost feasible solution by enumerating tour multisets."""
    (limits or OracleLimits.from_env()).check(inst)
    n, k, Q, cost = inst.n, inst.k, inst.Q, inst.cost
    if n == 0:
        return OracleResult(0, Solution(()), 1)
    demands = list(inst.demands)
    full = (1 << n) - 1

    types = []  # (cost, depot, mask, seq)
    for u in inst.depots:
        for mask in range(1, full + 1):
            members = [inst.k + i for i in range(n) if mask >> i & 1]
            c, seq = _tour_by_permutation(cost, u, members)
            types.append((c, u, mask, seq))
    types.sort(key=lambda t: (t[0], t[1], t[2]))
    T = len(types)

    # first type index >= i covering customer v (T if none)
    next_cover = [[T] * (T + 1) for _ in range(n)]
    for v in range(n):
        for i in range(T - 1, -1, -1):
            next_cover[v][i] = i if types[i][2] >> v & 1 else next_cover[v][i + 1]

    subset_demand = [sum(demands[v] for v in range(n) if X >> v & 1) for X in range(full + 1)]

    def feasible(masks: list[int]) -> bool:
        for X in range(1, full + 1):
            touching = sum(1 for msk in masks if msk & X)
            if subset_demand[X] > Q * touching:
                return False
        return True

    best: list = [None, None]  # cost, chosen type indices
    explored = 0
    per_depot = [0] * k
    chosen: list[int] = []

    def dfs(start: int, acc: int, covered: int) -> None:
        nonlocal explored
        explored += 1
        masks = [types[i][2] for i in chosen]
        if covered == full and feasible(masks):
            if best[0] is None or acc < best[0]:
                best[0], best[1] = acc, list(chosen)
            return
        if len(chosen) >= inst.m:
            return
        need = 0
        for v in range(n):
            if not covered >> v & 1:
                j = next_cover[v][start]
                if j == T:
                    return
                need = max(need, types[j][0])
        for i in range(start, T):
            c, u, mask, _ = types[i]
            if best[0] is not None and acc + max(c, need) >= best[0]:
                break
            if per_depot[u] >= inst.fleets[u]:
                continue
            per_depot[u] += 1
            chosen.append(i)
            dfs(i, acc + c, covered | mask)
            chosen.pop()
            per_depot[u] -= 1

    dfs(0, 0, 0)
    if best[0] is None:
        raise RuntimeError("oracle found no feasible solution")
    picked = [types[i] for i in best[1]]
    plan = _assign(demands, [t[2] for t in picked], Q, n)
    if plan is None:
        raise RuntimeError("Hall condition held but no integral split was found")
    slot = [0] * k
    tours = []
    for (c, u, mask, seq), load in zip(picked, plan):
        vehicle = inst.vehicles_of(u)[slot[u]]
        slot[u] += 1
        tours.append(Tour(vehicle, u, seq, {inst.k + v: a for v, a in sorted(load.items())}))
    witness = Solution(tuple(sorted(tours, key=lambda t: t.vehicle)))
    report = check_solution(inst, witness)
    if not report.feasible or report.total_cost != best[0]:
        raise RuntimeError(f"oracle witness invalid: {report.violations}")
    return OracleResult(best[0], witness, explored)


def vrp_lower_bounds(
    inst: MetricInstance, depot: int = 0, demands: Optional[dict[int, int]] = None
) -> tuple[Fraction, int]:
    """(radial bound sum 2 q_v c(u, v) / Q, optimal TSP tour through the slice).

    ``demands`` selects a single-depot slice; by default the instance must
    have one depot and all customers are used.
    """
    if demands is None:
        if inst.k != 1:
            raise ValueError("vrp_lower_bounds needs a single-depot slice")
        demands = {v: inst.demand(v) for v in inst.customers}
    cost = inst.cost
    radial = Fraction(sum(2 * q * cost[depot][v] for v, q in demands.items()), inst.Q)
    members = [v for v, q in sorted(demands.items()) if q > 0]
    if len(members) > 9:
        raise OracleRefusal("TSP bound limited to 9 customers")
    tour, _ = _tour_by_permutation(cost, depot, members) if members else (0, ())
    return radial, tour


@dataclass(frozen=True)
class RatioAudit:
    ratio: Union[Fraction, float]
    within_claim: bool
    feasible: bool
    cost: int
    opt: int
    claimed: Optional[Fraction]


def ratio_of(cost: int, opt: int) -> Union[Fraction, float]:
    if opt == 0:
        return Fraction(1) if cost == 0 else math.inf
    return Fraction(cost, opt)


def audit_ratio(
    inst: MetricInstance,
    solver: Union[Callable[[MetricInstance], "object"], "object"],
    opt: Optional[int] = None,
    limits: Optional[OracleLimits] = None,
) -> RatioAudit:
    """Cost over the exact optimum at capacity Q, plus feasibility at the
    solver's gamma.  ``solver`` is a callable returning a SolverResult or a
    SolverResult itself."""
    result = solver(inst) if callable(solver) else solver
    if opt is None:
        opt = solve_exact(inst, limits).opt_cost
    report = check_solution(inst, result.solution, result.gamma)
    ratio = ratio_of(report.total_cost, opt)
    claimed = result.claimed_ratio
    within = report.feasible and (claimed is None or ratio <= claimed)
    return RatioAudit(ratio, within, report.feasible, report.total_cost, opt, claimed)
