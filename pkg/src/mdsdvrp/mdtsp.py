"""Multi-depot TSP solvers: one cycle per depot covering every customer."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .graphprims import (
    ComponentSet,
    ContractViolation,
    depot_spanning_forest,
    double_tree_cycle,
    forest_trees,
    held_karp_cycle,
)
from .instance import MetricInstance


class MdTspSolver:
    name: str = "abstract"
    claimed_ratio: Fraction = Fraction(0)

    def solve(self, inst: MetricInstance) -> ComponentSet:
        raise NotImplementedError


@dataclass(frozen=True)
class ForestDoublingMdTsp(MdTspSolver):
    """Depot-rooted spanning forest, doubled and shortcut per tree (ratio 2)."""

    name: str = "forest2"
    claimed_ratio: Fraction = Fraction(2)

    def solve(self, inst: MetricInstance) -> ComponentSet:
        forest = depot_spanning_forest(inst)
        cycles = []
        for vs, es in forest_trees(range(inst.size), forest):
            depot = vs[0]
            if not inst.is_depot(depot):
                raise RuntimeError("forest tree without a depot")
            cycles.append(double_tree_cycle(es, depot) if es else (depot,))
        return ComponentSet.from_cycles(cycles)


@dataclass(frozen=True)
class ExactMdTsp(MdTspSolver):
    """Exhaustive depot assignment with Held-Karp per depot."""

    name: str = "exact"
    claimed_ratio: Fraction = Fraction(1)
    limit: int = 10

    def solve(self, inst: MetricInstance) -> ComponentSet:
        if inst.size > self.limit:
            raise ContractViolation(f"exact MD-TSP refuses |V|={inst.size} > limit {self.limit}")
        cost = inst.cost

        @lru_cache(maxsize=None)
        def tour(depot: int, members: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
            return held_karp_cycle((depot, *members), cost)

        best = None
        for assign in product(inst.depots, repeat=inst.n):
            groups = [[] for _ in inst.depots]
            for v, u in zip(inst.customers, assign):
                groups[u].append(v)
            total = sum(tour(u, tuple(g))[0] for u, g in enumerate(groups))
            if best is None or total < best[0]:
                best = (total, [tour(u, tuple(g))[1] for u, g in enumerate(groups)])
        assert best is not None
        return ComponentSet.from_cycles(best[1])


MDTSP_SOLVERS = {"forest2": ForestDoublingMdTsp, "exact": ExactMdTsp}


def solve_mdtsp(inst: MetricInstance) -> ComponentSet:
    return ForestDoublingMdTsp().solve(inst)


def solve_mdtsp_exact(inst: MetricInstance, limit: int = 10) -> ComponentSet:
    return ExactMdTsp(limit=limit).solve(inst)
