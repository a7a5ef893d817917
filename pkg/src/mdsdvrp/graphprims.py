"""Exact combinatorial primitives shared by the solvers.

Cycles are vertex tuples without the closing repeat: ``(a, b, c)`` is the
cycle a-b-c-a, ``(a, b)`` is the doubled edge a-b-a and ``(a,)`` is a trivial
cycle of cost 0.  Edge multisets are lists of ``(x, y)`` pairs.
"""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

import networkx as nx

from .instance import MetricInstance

CostMatrix = Sequence[Sequence[int]]
Edge = tuple[int, int]
Cycle = tuple[int, ...]


class ContractViolation(ValueError):
    """A primitive was called outside its precondition."""


def edge_key(x: int, y: int) -> Edge:
    return (x, y) if x <= y else (y, x)


def cycle_edges(cycle: Sequence[int]) -> list[Edge]:
    if len(cycle) < 2:
        return []
    return [edge_key(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]


def cycle_cost(cycle: Sequence[int], cost: CostMatrix) -> int:
    t = len(cycle)
    return sum(cost[cycle[i]][cycle[(i + 1) % t]] for i in range(t)) if t > 1 else 0


def edges_cost(edges: Iterable[Edge], cost: CostMatrix) -> int:
    return sum(cost[x][y] for x, y in edges)


# -- component sets ----------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...] = ()


@dataclass(frozen=True)
class ComponentSet:
    components: tuple[Component, ...]
    kind: str = "generic"

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]]) -> "ComponentSet":
        comps = tuple(Component(tuple(c), tuple(cycle_edges(c))) for c in cycles)
        return cls(comps, "cycle-cover")

    @property
    def cycles(self) -> list[Cycle]:
        if self.kind != "cycle-cover":
            raise ContractViolation("not a cycle cover")
        return [c.vertices for c in self.components]

    def cost(self, cost: CostMatrix) -> int:
        return sum(edges_cost(c.edges, cost) for c in self.components)

    def vertex_set(self) -> set[int]:
        return {v for c in self.components for v in c.vertices}


def is_cycle_cover(cover: ComponentSet, size: int) -> bool:
    seen: list[int] = [v for c in cover.components for v in c.vertices]
    return sorted(seen) == list(range(size))


def lower_ell(vertices: Iterable[int], inst: MetricInstance, demands: Optional[Sequence[int]] = None) -> int:
    """Vehicles needed for a component: ceil(total demand / Q).

    ``demands`` overrides the per-vertex demand vector (dummy depot demands).
    """
    d = demands if demands is not None else inst.demand_vector()
    total = sum(d[v] for v in set(vertices))
    return -(-total // inst.Q)


# -- Euler tours and shortcutting ------------------------------------------------------


def eulerian_tour(edges: Sequence[Edge], start: Optional[int] = None) -> list[int]:
    """Closed walk using every edge of a connected, even-degree multigraph once."""
    if not edges:
        if start is None:
            raise ContractViolation("empty edge set needs a start vertex")
        return [start]
    adj: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for idx, (x, y) in enumerate(edges):
        adj[x].append((y, idx))
        adj[y].append((x, idx))
    odd = [v for v, nb in adj.items() if len(nb) % 2]
    if odd:
        raise ContractViolation(f"odd-degree vertices {sorted(odd)}")
    if start is None:
        start = edges[0][0]
    if start not in adj:
        raise ContractViolation(f"start vertex {start} has no edges")
    used = [False] * len(edges)
    ptr = dict.fromkeys(adj, 0)
    stack = [start]
    circuit: list[int] = []
    while stack:
        v = stack[-1]
        nb = adj[v]
        i = ptr[v]
        while i < len(nb) and used[nb[i][1]]:
            i += 1
        ptr[v] = i
        if i == len(nb):
            circuit.append(stack.pop())
        else:
            w, idx = nb[i]
            used[idx] = True
            stack.append(w)
    if not all(used):
        raise ContractViolation("edge set is disconnected")
    circuit.reverse()
    return circuit


def shortcut(walk: Sequence[int], keep: Optional[Iterable[int]] = None) -> Cycle:
    """First-visit order of the kept vertices of a closed walk."""
    keep_set = None if keep is None else set(keep)
    seen: set[int] = set()
    out: list[int] = []
    for v in walk:
        if v in seen or (keep_set is not None and v not in keep_set):
            continue
        seen.add(v)
        out.append(v)
    return tuple(out)


def shortcut_cycle(cycle: Sequence[int], drop: Iterable[int]) -> Cycle:
    dropped = set(drop)
    return tuple(v for v in cycle if v not in dropped)


def double_tree_cycle(edges: Sequence[Edge], start: int) -> Cycle:
    """Double a tree's edges, take an Euler tour from ``start`` and shortcut."""
    doubled = [e for e in edges for _ in (0, 1)]
    return shortcut(eulerian_tour(doubled, start))


# -- spanning structures -----------------------------------------------------------


class DisjointSet:
    def __init__(self, items: Iterable[int]):
        self.parent = {x: x for x in items}

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


def mst_edges(vertices: Sequence[int], cost: CostMatrix) -> list[Edge]:
    """Kruskal MST; ties broken by (cost, smaller endpoint, larger endpoint)."""
    vs = sorted(vertices)
    cand = sorted((cost[x][y], x, y) for x, y in combinations(vs, 2))
    dsu = DisjointSet(vs)
    out: list[Edge] = []
    for _, x, y in cand:
        if dsu.union(x, y):
            out.append((x, y))
            if len(out) == len(vs) - 1:
                break
    return out


def depot_spanning_forest(inst: MetricInstance) -> list[Edge]:
    """Minimum spanning forest with exactly one depot per tree.

    All depots are contracted into one super-vertex, an MST is taken, and each
    super-vertex edge is mapped back to the cheapest depot (lower id on ties).
    """
    c = inst.cost
    SUPER = -1
    cand: list[tuple[int, int, int, int, int]] = []
    for v in inst.customers:
        u = min(inst.depots, key=lambda d: (c[d][v], d))
        cand.append((c[u][v], u, v, SUPER, v))
    for x, y in combinations(inst.customers, 2):
        cand.append((c[x][y], x, y, x, y))
    cand.sort()
    dsu = DisjointSet([SUPER, *inst.customers])
    forest: list[Edge] = []
    for _, x, y, a, b in cand:
        if dsu.union(a, b):
            forest.append((x, y))
            if len(forest) == inst.n:
                break
    return forest


def forest_trees(vertices: Iterable[int], edges: Sequence[Edge]) -> list[tuple[list[int], list[Edge]]]:
    """Split a forest into (sorted vertices, edges) per tree, ordered by min vertex."""
    vs = sorted(set(vertices))
    dsu = DisjointSet(vs)
    for x, y in edges:
        dsu.union(x, y)
    groups: dict[int, list[int]] = defaultdict(list)
    for v in vs:
        groups[dsu.find(v)].append(v)
    tree_edges: dict[int, list[Edge]] = defaultdict(list)
    for e in edges:
        tree_edges[dsu.find(e[0])].append(e)
    return [(groups[r], tree_edges[r]) for r in sorted(groups, key=lambda r: groups[r][0])]


# -- matching ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Matching:
    pairs: tuple[Edge, ...]
    cost: int


def _pairings(vs: Sequence[int]):
    if not vs:
        yield ()
        return
    head = vs[0]
    for j in range(1, len(vs)):
        rest = [*vs[1:j], *vs[j + 1 :]]
        for tail in _pairings(rest):
            yield ((head, vs[j]), *tail)


def min_cost_perfect_matching(vertices: Sequence[int], cost: CostMatrix) -> Matching:
    """Exact minimum-cost perfect matching on a complete graph (blossom)."""
    vs = sorted(set(vertices))
    if len(vs) != len(vertices):
        raise ContractViolation("repeated vertex in matching input")
    if len(vs) % 2:
        raise ContractViolation(f"perfect matching needs an even vertex count, got {len(vs)}")
    if not vs:
        return Matching((), 0)
    if len(vs) == 2:
        return Matching(((vs[0], vs[1]),), cost[vs[0]][vs[1]])
    if len(vs) <= 6:
        # at most 15 pairings: enumerate, first minimum in pairing order
        best = None
        for pairs in _pairings(vs):
            c = sum(cost[x][y] for x, y in pairs)
            if best is None or c < best.cost:
                best = Matching(pairs, c)
        assert best is not None
        return best
    # maximise sum(W - c) over maximum-cardinality matchings; every matching
    # considered is perfect, so this minimises the total cost exactly
    top = max(cost[x][y] for x, y in combinations(vs, 2)) + 1
    g = nx.Graph()
    g.add_nodes_from(vs)
    for x, y in combinations(vs, 2):
        g.add_edge(x, y, weight=top - cost[x][y])
    mate = nx.max_weight_matching(g, maxcardinality=True, weight="weight")
    pairs = tuple(sorted(edge_key(x, y) for x, y in mate))
    if 2 * len(pairs) != len(vs):
        raise RuntimeError("matching is not perfect")
    return Matching(pairs, sum(cost[x][y] for x, y in pairs))


# -- min-cost max-flow ------------------------------------------------------------------


@dataclass
class FlowNetwork:
    """Directed network on nodes ``0..num_nodes-1``; ``cap=None`` is unbounded."""

    num_nodes: int
    source: int
    sink: int
    arcs: list[tuple[int, int, Optional[int], int]] = field(default_factory=list)

    def add_arc(self, tail: int, head: int, cap: Optional[int], cost: int) -> int:
        if cap is not None and cap < 0:
            raise ContractViolation("negative capacity")
        if cost < 0:
            raise ContractViolation("negative arc cost")
        self.arcs.append((tail, head, cap, cost))
        return len(self.arcs) - 1


@dataclass(frozen=True)
class FlowResult:
    flow: tuple[int, ...]
    value: int
    cost: int


def min_cost_max_flow(net: FlowNetwork) -> FlowResult:
    """Successive shortest paths with Dijkstra on reduced costs."""
    finite = sum(cap for _, _, cap, _ in net.arcs if cap is not None)
    big = finite + 1
    N = net.num_nodes
    # residual graph: arc 2i forward, 2i+1 backward
    head: list[int] = []
    rcap: list[int] = []
    rcost: list[int] = []
    out: list[list[int]] = [[] for _ in range(N)]
    for tail, hd, cap, cost in net.arcs:
        out[tail].append(len(head))
        head.append(hd)
        rcap.append(big if cap is None else cap)
        rcost.append(cost)
        out[hd].append(len(head))
        head.append(tail)
        rcap.append(0)
        rcost.append(-cost)

    s, t = net.source, net.sink
    INF = float("inf")
    pot = [0] * N
    value = 0
    total = 0
    heappush, heappop = heapq.heappush, heapq.heappop
    while True:
        dist = [INF] * N
        via = [-1] * N
        dist[s] = 0
        heap = [(0, s)]
        while heap:
            d, v = heappop(heap)
            if d > dist[v]:
                continue
            pv = pot[v] + d
            for a in out[v]:
                if rcap[a] > 0:
                    w = head[a]
                    nd = pv + rcost[a] - pot[w]
                    if nd < dist[w]:
                        dist[w] = nd
                        via[w] = a
                        heappush(heap, (nd, w))
        if dist[t] == INF:
            break
        for v in range(N):
            if dist[v] != INF:
                pot[v] += dist[v]
        push = big
        v = t
        while v != s:
            a = via[v]
            if rcap[a] < push:
                push = rcap[a]
            v = head[a ^ 1]
        v = t
        while v != s:
            a = via[v]
            rcap[a] -= push
            rcap[a ^ 1] += push
            total += push * rcost[a]
            v = head[a ^ 1]
        value += push
        if value >= big:
            raise ContractViolation("unbounded s-t flow")
    flow = tuple(rcap[2 * i + 1] for i in range(len(net.arcs)))
    return FlowResult(flow, value, total)


# -- exact TSP and Christofides -------------------------------------------------------------


def held_karp_cycle(vertices: Sequence[int], cost: CostMatrix) -> tuple[int, Cycle]:
    """Exact minimum-cost Hamiltonian cycle starting at ``vertices[0]``."""
    vs = list(vertices)
    if len(vs) <= 3:
        cyc = tuple(vs)
        return cycle_cost(cyc, cost), cyc
    root, rest = vs[0], vs[1:]
    r = len(rest)
    best: dict[tuple[int, int], tuple[int, int]] = {}
    for i, v in enumerate(rest):
        best[(1 << i, i)] = (cost[root][v], -1)
    for mask in range(1, 1 << r):
        for last in range(r):
            entry = best.get((mask, last))
            if entry is None:
                continue
            base = entry[0]
            for nxt in range(r):
                if mask & (1 << nxt):
                    continue
                key = (mask | (1 << nxt), nxt)
                val = base + cost[rest[last]][rest[nxt]]
                cur = best.get(key)
                if cur is None or val < cur[0]:
                    best[key] = (val, last)
    full = (1 << r) - 1
    end = min(range(r), key=lambda i: (best[(full, i)][0] + cost[rest[i]][root], i))
    total = best[(full, end)][0] + cost[rest[end]][root]
    order = []
    mask, last = full, end
    while last != -1:
        order.append(rest[last])
        prev = best[(mask, last)][1]
        mask ^= 1 << last
        last = prev
    order.reverse()
    return total, (root, *order)


def christofides_cycle(vertices: Sequence[int], cost: CostMatrix, start: int) -> Cycle:
    """MST plus exact odd-vertex matching, Euler tour from ``start``, shortcut."""
    vs = sorted(set(vertices))
    if len(vs) <= 2:
        return (start, *[v for v in vs if v != start])
    tree = mst_edges(vs, cost)
    deg: dict[int, int] = defaultdict(int)
    for x, y in tree:
        deg[x] += 1
        deg[y] += 1
    odd = [v for v in vs if deg[v] % 2]
    match = min_cost_perfect_matching(odd, cost)
    return shortcut(eulerian_tour(tree + list(match.pairs), start))


# -- mod-Q constrained forest and cycle cover ----------------------------------------------


def modq_forest(cost: CostMatrix, demands: Sequence[int], Q: int) -> list[Edge]:
    """Primal-dual constrained forest for f(S) = [demand(S) mod Q != 0].

    Every tree of the returned forest has total demand divisible by Q.  Event
    times are exact: costs are scaled by a power of two large enough that the
    at most ``|V|`` halvings stay integral.  Ties pick the smallest edge id,
    edges being numbered lexicographically by (smaller, larger) endpoint.

    Only the merged component changes activity at an event, so every other
    component pair keeps its absolute tight time; pairs are kept in a heap
    with lazy invalidation and each pair remembers only its best edge.
    """
    size = len(demands)
    scale = 1 << (size + 1)

    def eid(x: int, y: int) -> int:
        # lexicographic id of edge (x, y), x < y
        return x * (2 * size - x - 1) // 2 + (y - x - 1)

    members: dict[int, list[int]] = {v: [v] for v in range(size)}
    csum = {v: demands[v] % Q for v in range(size)}
    active = sum(1 for v in csum.values() if v)
    load = [0] * size
    # component pair -> (edge id, x, y) of its cheapest remaining edge
    pair_best: dict[tuple[int, int], tuple[int, int, int]] = {}
    heap: list[tuple[int, int, int, int]] = []
    now = 0
    next_id = size

    for x in range(size):
        ax = csum[x] != 0
        cx = cost[x]
        for y in range(x + 1, size):
            i = eid(x, y)
            pair_best[(x, y)] = (i, x, y)
            den = ax + (csum[y] != 0)
            if den:
                heap.append((cx[y] * scale // den, i, x, y))
    heapq.heapify(heap)

    chosen: list[Edge] = []
    while active:
        if not heap:
            raise ContractViolation("active component with no partner; total demand not divisible by Q")
        t, _, a, b = heapq.heappop(heap)
        if a not in members or b not in members:
            continue
        step = t - now
        for r, mem in members.items():
            if csum[r]:
                for v in mem:
                    load[v] += step
        now = t
        _, x, y = pair_best.pop((a, b) if a < b else (b, a))
        chosen.append((x, y))
        c = next_id
        next_id += 1
        members[c] = members.pop(a) + members.pop(b)
        sa, sb = csum.pop(a), csum.pop(b)
        csum[c] = (sa + sb) % Q
        active += (csum[c] != 0) - (sa != 0) - (sb != 0)
        for d in members:
            if d == c:
                continue
            e1 = pair_best.pop((a, d) if a < d else (d, a))
            e2 = pair_best.pop((b, d) if b < d else (d, b))
            r1 = cost[e1[1]][e1[2]] * scale - load[e1[1]] - load[e1[2]]
            r2 = cost[e2[1]][e2[2]] * scale - load[e2[1]] - load[e2[2]]
            if (r2, e2[0]) < (r1, e1[0]):
                e1, r1 = e2, r2
            pair_best[(d, c)] = e1
            den = (csum[d] != 0) + (csum[c] != 0)
            if den:
                if r1 % den:
                    raise RuntimeError("dual growth lost integrality")
                heapq.heappush(heap, (now + r1 // den, e1[0], d, c))

    # prune: keep e iff a side of (forest - e) has demand not divisible by Q;
    # the side below e in a rooted tree is its subtree
    adj: dict[int, list[int]] = defaultdict(list)
    for x, y in chosen:
        adj[x].append(y)
        adj[y].append(x)
    below: dict[tuple[int, int], int] = {}
    seen: set[int] = set()
    for root in sorted(adj):
        if root in seen:
            continue
        seen.add(root)
        order = [(root, -1)]
        stack = [root]
        parent = {root: -1}
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    parent[y] = x
                    order.append((y, x))
                    stack.append(y)
        sub = {v: demands[v] for v, _ in order}
        for v, par in reversed(order):
            if par >= 0:
                sub[par] += sub[v]
                below[edge_key(v, par)] = sub[v]
    return [e for e in chosen if below[edge_key(*e)] % Q]


def modq_cycle_cover(inst: MetricInstance, depot_demands: Sequence[int]) -> ComponentSet:
    """Cycle cover in which every cycle's demand (dummy depot demands included)
    is divisible by Q, built by doubling and shortcutting the constrained forest.
    """
    if len(depot_demands) != inst.k:
        raise ContractViolation(f"need {inst.k} depot demands")
    Q = inst.Q
    if any(not 0 <= q < Q for q in depot_demands):
        raise ContractViolation("depot demands must lie in [0, Q)")
    demands = list(depot_demands) + list(inst.demands)
    if sum(demands) % Q:
        raise ContractViolation("total demand including depots is not divisible by Q")
    forest = modq_forest(inst.cost, demands, Q)
    cycles = [double_tree_cycle(es, vs[0]) if es else (vs[0],) for vs, es in forest_trees(range(inst.size), forest)]
    for cyc in cycles:
        if sum(demands[v] for v in cyc) % Q:
            raise RuntimeError(f"cycle {cyc} violates mod-Q divisibility")
    return ComponentSet.from_cycles(cycles)
