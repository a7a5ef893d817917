"""Turn a cycle cover into vehicle tours via path extraction and min-cost flow."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .graphprims import (
    ComponentSet,
    ContractViolation,
    FlowNetwork,
    edge_key,
    eulerian_tour,
    min_cost_max_flow,
    shortcut,
    shortcut_cycle,
)
from .instance import MetricInstance, Solution, Tour, walk_cost
from .partition import DepotTour, ExtractedPath, extract_paths, peel_trivial


class TransformPreconditionError(ContractViolation):
    """The cover needs more vehicles than the fleet provides."""


@dataclass(frozen=True)
class TransformInput:
    cover: ComponentSet
    depot_demands: Optional[tuple[int, ...]] = None

    def demand_vector(self, inst: MetricInstance) -> list[int]:
        if self.depot_demands is None:
            return inst.demand_vector()
        if len(self.depot_demands) != inst.k:
            raise ContractViolation(f"need {inst.k} depot demands")
        return list(self.depot_demands) + list(inst.demands)


@dataclass(frozen=True)
class TransformResult:
    tours: tuple[tuple[int, DepotTour], ...]
    cover_cost: int
    flow_cost: int
    ell: int
    per_depot: tuple[int, ...]
    num_paths: int
    cost: int

    @property
    def bound_ok(self) -> bool:
        return self.cost <= 2 * self.cover_cost + 2 * self.flow_cost

    @property
    def vehicles_used(self) -> int:
        return len(self.tours)


def cover_ell(inst: MetricInstance, cover: ComponentSet, demands: Sequence[int]) -> int:
    return sum(-(-sum(demands[v] for v in comp.vertices) // inst.Q) for comp in cover.components)


def _paths_and_network(inst: MetricInstance, inp: TransformInput):
    demands = inp.demand_vector(inst)
    Q = inst.Q
    ell = cover_ell(inst, inp.cover, demands)
    if ell > inst.m:
        raise TransformPreconditionError(f"cover needs {ell} vehicles but the fleet has {inst.m}")
    items: list[ExtractedPath] = []
    for comp in inp.cover.components:
        cyc = shortcut_cycle(comp.vertices, [v for v in comp.vertices if demands[v] == 0])
        if not cyc:
            continue
        trivial, residual = peel_trivial(cyc, [demands[v] for v in cyc], Q)
        items.extend(trivial)
        items.extend(extract_paths(cyc, residual, Q))

    c = inst.cost
    S, T = 0, 1
    depot_node = [2 + u for u in inst.depots]
    item_node = [2 + inst.k + i for i in range(len(items))]
    net = FlowNetwork(2 + inst.k + len(items), S, T)
    arc_of: dict[tuple[int, int], int] = {}
    for u in inst.depots:
        net.add_arc(depot_node[u], T, inst.fleets[u], 0)
    for i, p in enumerate(items):
        net.add_arc(S, item_node[i], p.load, 0)
        for u in inst.depots:
            arc_of[(i, u)] = net.add_arc(item_node[i], depot_node[u], None, min(c[v][u] for v in p.vertices))
    return demands, ell, items, net, arc_of


def _path_tour(inst: MetricInstance, depot: int, path: ExtractedPath) -> tuple[int, ...]:
    c = inst.cost
    anchor = min(path.vertices, key=lambda v: (c[v][depot], v))
    edges = [edge_key(a, b) for a, b in zip(path.vertices, path.vertices[1:])]
    if anchor != depot:
        edges.append(edge_key(anchor, depot))
    doubled = [e for e in edges for _ in (0, 1)]
    if not doubled:
        return (depot, depot)
    return (*shortcut(eulerian_tour(doubled, depot)), depot)


def assign_to_depots(
    supplies: Sequence[int], costs: Sequence[Sequence[int]], fleets: Sequence[int]
) -> tuple[list[list[int]], int]:
    """Min-cost assignment of item units to depots with fleet caps.

    Same optimum as the min-cost flow on the transform network, computed by
    adding items one at a time and augmenting along shortest residual paths.
    Residual paths only move between depots (re-routing an already placed
    item), so Bellman-Ford runs on k nodes.  Returns (units[item][depot], cost).
    """
    k = len(fleets)
    x = [[0] * k for _ in supplies]
    free = list(fleets)
    at_depot: list[set[int]] = [set() for _ in range(k)]
    total = 0
    for i, supply in enumerate(supplies):
        left = supply
        ci = costs[i]
        while left:
            dist = list(ci)
            prev: list[Optional[tuple[int, int]]] = [None] * k
            # relax re-route arcs u1 -> u2 through an item j placed at u1
            for _ in range(k):
                changed = False
                for u1 in range(k):
                    for j in sorted(at_depot[u1]):
                        cj = costs[j]
                        base = dist[u1] - cj[u1]
                        for u2 in range(k):
                            if u2 != u1 and base + cj[u2] < dist[u2]:
                                dist[u2] = base + cj[u2]
                                prev[u2] = (u1, j)
                                changed = True
                if not changed:
                    break
            end = min((u for u in range(k) if free[u] > 0), key=lambda u: (dist[u], u), default=None)
            if end is None:
                raise TransformPreconditionError("fleet capacity exhausted")
            # walk the path back to the item's entry depot to find the bottleneck
            push = min(left, free[end])
            hops: list[tuple[int, int, int]] = []
            u = end
            seen = {u}
            while prev[u] is not None:
                u1, j = prev[u]
                hops.append((u1, j, u))
                push = min(push, x[j][u1])
                u = u1
                if u in seen:
                    raise RuntimeError("negative cycle in depot re-routing")
                seen.add(u)
            start = u
            for u1, j, u2 in hops:
                x[j][u1] -= push
                x[j][u2] += push
                if not x[j][u1]:
                    at_depot[u1].discard(j)
                at_depot[u2].add(j)
            x[i][start] += push
            at_depot[start].add(i)
            free[end] -= push
            total += push * dist[end]
            left -= push
    return x, total


def transform(inst: MetricInstance, inp: TransformInput) -> TransformResult:
    """Tours for every path of the cover, one vehicle per non-trivial path.

    Returns the tours (still containing dummy depot visits, if any) with the
    data needed for the cost certificate ``c <= 2 c(cover) + 2 flowOPT``, which
    is asserted before returning.
    """
    demands, ell, items, net, arc_of = _paths_and_network(inst, inp)
    costs = [[net.arcs[arc_of[(i, u)]][3] for u in inst.depots] for i in range(len(items))]
    units, flow_cost = assign_to_depots([p.load for p in items], costs, inst.fleets)
    Q = inst.Q
    tours: list[tuple[int, DepotTour]] = []
    per_depot = [0] * inst.k
    for u in inst.depots:
        for i, p in enumerate(items):
            x = units[i][u]
            if not x:
                continue
            if p.load > 1:
                # trivial path: x vehicles each carry a full Q
                v = p.vertices[0]
                for _ in range(x):
                    tours.append((u, DepotTour((u, v, u), {v: Q})))
            else:
                tours.append((u, DepotTour(_path_tour(inst, u, p), dict(p.assignment))))
            per_depot[u] += x
    out = TransformResult(
        tours=tuple(tours),
        cover_cost=inp.cover.cost(inst.cost),
        flow_cost=flow_cost,
        ell=ell,
        per_depot=tuple(per_depot),
        num_paths=len(items),
        cost=sum(walk_cost(t.seq, inst.cost) for _, t in tours),
    )
    if out.vehicles_used != ell:
        raise RuntimeError(f"used {out.vehicles_used} vehicles, expected {ell}")
    if any(per_depot[u] > inst.fleets[u] for u in inst.depots):
        raise RuntimeError("depot fleet exceeded")
    if not out.bound_ok:
        raise RuntimeError("transform cost certificate violated")
    return out


def transform_cost_certificate(inst: MetricInstance, inp: TransformInput, tours_cost: int) -> tuple[int, int, bool]:
    """Recompute (c(cover), flowOPT) and test ``tours_cost <= 2 c(cover) + 2 flowOPT``."""
    _, _, _, net, _ = _paths_and_network(inst, inp)
    flow = min_cost_max_flow(net).cost
    cover = inp.cover.cost(inst.cost)
    return cover, flow, tours_cost <= 2 * cover + 2 * flow


def flow_opt(inst: MetricInstance, inp: TransformInput) -> int:
    _, _, _, net, _ = _paths_and_network(inst, inp)
    return min_cost_max_flow(net).cost


def to_solution(inst: MetricInstance, depot_tours: Sequence[tuple[int, DepotTour]]) -> Solution:
    """Bind tours to vehicles: each depot's tours take its vehicles in order."""
    next_slot = [0] * inst.k
    out: list[Tour] = []
    for u, t in depot_tours:
        vehicles = inst.vehicles_of(u)
        if next_slot[u] >= len(vehicles):
            raise RuntimeError(f"depot {u} has no vehicle left")
        out.append(Tour(vehicles[next_slot[u]], u, tuple(t.seq), dict(sorted(t.load.items()))))
        next_slot[u] += 1
    out.sort(key=lambda t: t.vehicle)
    return Solution(tuple(out))
