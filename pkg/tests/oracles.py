"""Independent brute-force references used by the test suite.

Nothing here imports library routing code: each function re-derives its
answer by exhaustive enumeration or a deliberately naive algorithm.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Optional, Sequence


def matching_dp(vertices: Sequence[int], cost) -> int:
    """Minimum perfect matching cost by bitmask DP over the vertex set."""
    vs = list(vertices)
    n = len(vs)

    @lru_cache(maxsize=None)
    def f(mask: int) -> int:
        if mask == 0:
            return 0
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        best = None
        for j in range(n):
            if rest >> j & 1:
                val = cost[vs[i]][vs[j]] + f(rest & ~(1 << j))
                if best is None or val < best:
                    best = val
        return best

    return f((1 << n) - 1)


def mcmf_brute(num_nodes: int, source: int, sink: int, arcs: Sequence[tuple[int, int, int, int]]) -> tuple[int, int]:
    """(max flow value, min cost among max flows) by enumerating integral arc flows.

    Arcs are (tail, head, cap, cost) with finite caps.  Conservation at a node
    is checked as soon as the last arc touching it has been assigned.
    """
    last_touch = {}
    for i, (a, b, _, _) in enumerate(arcs):
        last_touch[a] = i
        last_touch[b] = i
    check_at: dict[int, list[int]] = {}
    for v, i in last_touch.items():
        if v not in (source, sink):
            check_at.setdefault(i, []).append(v)
    balance = [0] * num_nodes
    best: list[Optional[tuple[int, int]]] = [None]

    def rec(i: int, cost: int) -> None:
        if i == len(arcs):
            value = -balance[source]
            key = (value, -cost)
            if best[0] is None or key > (best[0][0], -best[0][1]):
                best[0] = (value, cost)
            return
        a, b, cap, c = arcs[i]
        for f in range(cap + 1):
            balance[a] -= f
            balance[b] += f
            if all(balance[v] == 0 for v in check_at.get(i, ())):
                rec(i + 1, cost + f * c)
            balance[a] += f
            balance[b] -= f

    rec(0, 0)
    assert best[0] is not None
    return best[0]


def tour_cost_brute(depot: int, members: Sequence[int], cost) -> int:
    """Cheapest closed tour from ``depot`` through ``members`` by permutation."""
    if not members:
        return 0
    best = None
    for perm in permutations(members):
        seq = (depot, *perm, depot)
        c = sum(cost[a][b] for a, b in zip(seq, seq[1:]))
        best = c if best is None else min(best, c)
    return best


def cycle_cost_brute(vertices: Sequence[int], cost) -> int:
    """Cheapest Hamiltonian cycle on ``vertices``; 0 for one vertex, 2c for two."""
    vs = list(vertices)
    if len(vs) <= 1:
        return 0
    return tour_cost_brute(vs[0], vs[1:], cost)


def mdtsp_brute(k: int, n: int, cost) -> int:
    """Exact multi-depot TSP: every customer assigned to one depot's tour."""
    best = None
    for assign in product(range(k), repeat=n):
        total = 0
        for u in range(k):
            total += tour_cost_brute(u, [k + i for i in range(n) if assign[i] == u], cost)
        best = total if best is None else min(best, total)
    return best if best is not None else 0


def set_partitions_brute(items: list):
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in set_partitions_brute(rest):
        yield [[head], *part]
        for i in range(len(part)):
            yield [*part[:i], [head, *part[i]], *part[i + 1 :]]


def modq_cover_brute(demands: Sequence[int], Q: int, cost) -> int:
    """Minimum cycle cover whose every cycle has demand divisible by Q."""
    best = None
    for blocks in set_partitions_brute(list(range(len(demands)))):
        if any(sum(demands[v] for v in b) % Q for b in blocks):
            continue
        total = sum(cycle_cost_brute(b, cost) for b in blocks)
        best = total if best is None else min(best, total)
    assert best is not None
    return best


def modq_forest_naive(cost, demands: Sequence[int], Q: int) -> list[tuple[int, int]]:
    """Textbook primal-dual constrained forest with full rescans.

    Each round grows every active component uniformly until an edge between
    two components becomes tight (exact rational time), ties broken by the
    lexicographic edge order; then prunes edges whose removal leaves both
    sides with demand divisible by Q.
    """
    size = len(demands)
    comp = list(range(size))
    y = [Fraction(0)] * size  # sum of duals over sets containing the vertex
    chosen: list[tuple[int, int]] = []

    def comp_demand(c: int) -> int:
        return sum(demands[v] for v in range(size) if comp[v] == c) % Q

    while any(comp_demand(c) for c in set(comp)):
        active = {c for c in set(comp) if comp_demand(c)}
        best = None
        for x, z in combinations(range(size), 2):
            if comp[x] == comp[z]:
                continue
            den = (comp[x] in active) + (comp[z] in active)
            if not den:
                continue
            t = (cost[x][z] - y[x] - y[z]) / den
            if best is None or (t, (x, z)) < best:
                best = (t, (x, z))
        assert best is not None
        t, (x, z) = best
        for v in range(size):
            if comp[v] in active:
                y[v] += t
        chosen.append((x, z))
        old, new = comp[z], comp[x]
        comp = [new if c == old else c for c in comp]

    def side_demand(edges: list[tuple[int, int]], start: int) -> int:
        seen = {start}
        stack = [start]
        while stack:
            a = stack.pop()
            for p, q in edges:
                for s, t in ((p, q), (q, p)):
                    if s == a and t not in seen:
                        seen.add(t)
                        stack.append(t)
        return sum(demands[v] for v in seen)

    kept = []
    for e in chosen:
        rest = [f for f in chosen if f != e]
        if side_demand(rest, e[0]) % Q:
            kept.append(e)
    return kept


def ring_split_best(cost, depot: int, cycle: Sequence[int], demands: Sequence[int], Qp: int) -> int:
    """Best cyclic-start tour partition via explicit unit expansion.

    Full Q' loads become out-and-back tours; the rest is expanded into one
    token per demand unit around the ring (padding tokens at the depot), and
    every vertex start is tried with consecutive Q'-token cuts.
    """
    total = sum(demands)
    if total == 0:
        return 0
    fixed = 0
    tokens: list[Optional[int]] = [None] * ((-total) % Qp)
    for v, lam in zip(cycle, demands):
        fixed += (lam // Qp) * 2 * cost[depot][v]
        tokens.extend([v] * (lam % Qp))
    if not tokens:
        return fixed
    starts = [i for i in range(len(tokens)) if i == 0 or tokens[i] != tokens[i - 1]]
    best = None
    for s in starts:
        ring = tokens[s:] + tokens[:s]
        total_cost = 0
        for j in range(0, len(ring), Qp):
            seq = [depot]
            for v in ring[j : j + Qp]:
                if v is not None and v != seq[-1]:
                    seq.append(v)
            seq.append(depot)
            total_cost += sum(cost[a][b] for a, b in zip(seq, seq[1:]))
        best = total_cost if best is None else min(best, total_cost)
    return fixed + best


def eulerian_extension_brute(cycles: Sequence[Sequence[int]], cost) -> int:
    """Cheapest multiset of at most 2(p-1) non-cycle edges making the union
    of the cycles connected with all degrees even."""
    p = len(cycles)
    verts = sorted({v for c in cycles for v in c})
    owned = set()
    for c in cycles:
        for i in range(len(c)):
            a, b = c[i], c[(i + 1) % len(c)]
            if a != b:
                owned.add((min(a, b), max(a, b)))
    pool = [e for e in combinations(verts, 2) if e not in owned]
    best = None
    for size in range(0, 2 * (p - 1) + 1):
        for chosen in combinations_with_replacement(pool, size):
            deg = {v: 0 for v in verts}
            for a, b in chosen:
                deg[a] += 1
                deg[b] += 1
            if any(d % 2 for d in deg.values()):
                continue
            parent = {v: v for v in verts}

            def find(x):
                while parent[x] != x:
                    x = parent[x]
                return x

            for c in cycles:
                for v in c:
                    parent[find(v)] = find(c[0])
            for a, b in chosen:
                parent[find(a)] = find(b)
            if len({find(v) for v in verts}) != 1:
                continue
            c = sum(cost[a][b] for a, b in chosen)
            best = c if best is None else min(best, c)
    assert best is not None
    return best
