"""Dummy-depot-demand enumeration with mod-Q cycle covers (ratio 5)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from ..graphprims import ComponentSet, modq_cycle_cover
from ..instance import MetricInstance
from ..transform import TransformInput, TransformResult, to_solution, transform
from .common import SolverResult, TransformCertificate, empty_result, strip_dummies, tours_cost


def depot_demand_tuples(inst: MetricInstance) -> Iterator[tuple[int, ...]]:
    """Dummy depot demands q_u in [0, Q) with total demand divisible by Q and
    at most m*Q; the last depot's value is forced by divisibility."""
    Q, k = inst.Q, inst.k
    total = inst.total_demand
    slack = inst.m * Q - total
    prefix: list[int] = []

    def rec(i: int, acc: int) -> Iterator[tuple[int, ...]]:
        if i == k - 1:
            last = (-(total + acc)) % Q
            if acc + last <= slack:
                yield (*prefix, last)
            return
        for q in range(min(Q - 1, slack - acc) + 1):
            prefix.append(q)
            yield from rec(i + 1, acc + q)
            prefix.pop()

    yield from rec(0, 0)


@dataclass(frozen=True)
class Alg3Iteration:
    depot_demands: tuple[int, ...]
    cover: ComponentSet
    transformed: TransformResult
    tours: tuple
    cost: int


def alg3_iteration(inst: MetricInstance, depot_demands: Sequence[int]) -> Alg3Iteration:
    qd = tuple(depot_demands)
    cover = modq_cycle_cover(inst, qd)
    res = transform(inst, TransformInput(cover, qd))
    tours = strip_dummies(inst, res.tours)
    return Alg3Iteration(qd, cover, res, tuple(tours), tours_cost(inst, tours))


def alg3(inst: MetricInstance, max_iters: Optional[int] = None) -> SolverResult:
    claimed = Fraction(5)
    if inst.n == 0:
        return empty_result("alg3", claimed)
    best: Optional[Alg3Iteration] = None
    certs: list[TransformCertificate] = []
    run = 0
    void = False
    for qd in depot_demand_tuples(inst):
        if max_iters is not None and run >= max_iters:
            void = True
            break
        run += 1
        it = alg3_iteration(inst, qd)
        certs.append(TransformCertificate.of(inst, it.transformed))
        if best is None or it.cost < best.cost:
            best = it
    assert best is not None
    return SolverResult(
        solver="alg3",
        solution=to_solution(inst, best.tours),
        cost=best.cost,
        claimed_ratio=claimed,
        iterations_run=run,
        iterations_enumerated=inst.Q ** (inst.k - 1),
        guarantee_void=void,
        certificates=tuple(certs),
        notes=(f"depot_demands={list(best.depot_demands)}",),
    )
