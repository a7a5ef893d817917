"""Splitting cycle demand into vehicle-sized paths and depot tours."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .graphprims import ContractViolation, CostMatrix, cycle_cost
from .instance import walk_cost


@dataclass(frozen=True)
class ExtractedPath:
    """A path over customers; ``load`` vehicles serve ``assignment`` together.

    Only trivial (single-vertex) paths have load above 1, in which case each
    vehicle carries exactly Q.
    """

    vertices: tuple[int, ...]
    assignment: dict[int, int]
    load: int = 1

    @property
    def demand(self) -> int:
        return sum(self.assignment.values())


@dataclass(frozen=True)
class DepotTour:
    seq: tuple[int, ...]
    load: dict[int, int]


def peel_trivial(vertices: Sequence[int], demands: Sequence[int], Q: int) -> tuple[list[ExtractedPath], list[int]]:
    """Split off full-vehicle trivial paths; return them and residuals ``q mod Q``."""
    trivial: list[ExtractedPath] = []
    residual: list[int] = []
    for v, q in zip(vertices, demands):
        full = q // Q
        if full:
            trivial.append(ExtractedPath((v,), {v: full * Q}, full))
        residual.append(q - full * Q)
    return trivial, residual


def _greedy_chunks(vertices: Sequence[int], amounts: Sequence[int], cap: int) -> list[ExtractedPath]:
    # scan the cycle once from its first vertex; each chunk closes at the
    # smallest index where it reaches min(cap, remaining demand)
    rest = list(amounts)
    remaining = sum(rest)
    out: list[ExtractedPath] = []
    start = 0
    while remaining > 0:
        target = min(cap, remaining)
        acc = 0
        i = start
        while acc + rest[i] < target:
            acc += rest[i]
            i += 1
        assignment: dict[int, int] = {}
        order: list[int] = []
        for j in range(start, i):
            if rest[j]:
                assignment[vertices[j]] = rest[j]
                order.append(vertices[j])
                rest[j] = 0
        last = target - acc
        assignment[vertices[i]] = last
        order.append(vertices[i])
        rest[i] -= last
        remaining -= target
        out.append(ExtractedPath(tuple(order), assignment, 1))
        start = i
    return out


def extract_paths(cycle: Sequence[int], residual: Sequence[int], Q: int) -> list[ExtractedPath]:
    """Cut a cycle with residual demands (< Q) into ceil(total/Q) paths.

    Every path but the last carries exactly Q; consecutive paths share at
    most their split customer.  Zero-assignment customers are skipped.
    """
    if len(cycle) != len(residual):
        raise ContractViolation("cycle and residual lengths differ")
    if any(not 0 <= r < Q for r in residual):
        raise ContractViolation(f"residual demands must lie in [0, {Q})")
    return _greedy_chunks(cycle, residual, Q)


def partition_cost_bound(cost: CostMatrix, depot: int, cycle: Sequence[int], demands: Sequence[int], Qp: int) -> Fraction:
    """c(C_u) + sum_i 2 * lambda_i * c(u, v_i) / Q'."""
    radial = sum(2 * lam * cost[depot][v] for v, lam in zip(cycle, demands))
    return cycle_cost((depot, *cycle), cost) + Fraction(radial, Qp)


def partition_depot_cycle(
    cost: CostMatrix, depot: int, cycle: Sequence[int], demands: Sequence[int], Qp: int
) -> list[DepotTour]:
    """Cut the depot cycle ``depot, cycle..., depot`` into ceil(sum/Q') tours.

    A zero-cost dummy at the depot pads the total to a multiple of Q', full
    trivial tours are peeled, and the exact-Q' greedy cut is tried from every
    start vertex of the residual cycle; the cheapest start (smallest index on
    ties) wins.  The cost bound ``partition_cost_bound`` is asserted on every call.
    """
    if Qp < 1:
        raise ContractViolation("capacity must be >= 1")
    if len(cycle) != len(demands) or any(d < 0 for d in demands):
        raise ContractViolation("demands must be non-negative and aligned with the cycle")
    total = sum(demands)
    if total == 0:
        return []
    tours: list[DepotTour] = []
    residual: list[int] = []
    for v, lam in zip(cycle, demands):
        for _ in range(lam // Qp):
            tours.append(DepotTour((depot, v, depot), {v: Qp}))
        residual.append(lam % Qp)

    dummy = -1
    pad = (-total) % Qp
    ring = [(dummy, pad)] + [(v, r) for v, r in zip(cycle, residual)]
    ring = [(v, r) for v, r in ring if r > 0]

    best: Optional[tuple[int, list[DepotTour]]] = None
    for s in range(len(ring)):
        rotated = ring[s:] + ring[:s]
        chunks = _greedy_chunks([v for v, _ in rotated], [r for _, r in rotated], Qp)
        cand: list[DepotTour] = []
        for ch in chunks:
            seq = (depot, *[v for v in ch.vertices if v != dummy], depot)
            cand.append(DepotTour(seq, {v: a for v, a in ch.assignment.items() if v != dummy}))
        c = sum(walk_cost(t.seq, cost) for t in cand)
        if best is None or c < best[0]:
            best = (c, cand)
    if best is not None:
        tours.extend(best[1])

    expected = -(-total // Qp)
    if len(tours) != expected:
        raise RuntimeError(f"tour count {len(tours)} != {expected}")
    got = sum(walk_cost(t.seq, cost) for t in tours)
    if got > partition_cost_bound(cost, depot, cycle, demands, Qp):
        raise RuntimeError("tour partition exceeds its cost bound")
    return tours
