"""Shared result types and helpers for the end-to-end solvers."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from ..instance import MetricInstance, Solution
from ..partition import DepotTour
from ..transform import TransformResult


class SolverDiagnostic(RuntimeError):
    """The method cannot produce a solution for this input (not a bug)."""


class WrongSolverError(SolverDiagnostic):
    pass


@dataclass(frozen=True)
class TransformCertificate:
    cover_cost: int
    flow_cost: int
    tours_cost: int
    ell: int
    vehicles_used: int
    per_depot: tuple[int, ...]
    fleets: tuple[int, ...]

    @property
    def bound_ok(self) -> bool:
        return self.tours_cost <= 2 * self.cover_cost + 2 * self.flow_cost

    @property
    def vehicles_ok(self) -> bool:
        return self.vehicles_used == self.ell and all(a <= r for a, r in zip(self.per_depot, self.fleets))

    @classmethod
    def of(cls, inst: MetricInstance, res: TransformResult) -> "TransformCertificate":
        return cls(res.cover_cost, res.flow_cost, res.cost, res.ell, res.vehicles_used, res.per_depot, inst.fleets)


@dataclass(frozen=True)
class SolverResult:
    solver: str
    solution: Solution
    cost: int
    claimed_ratio: Optional[Fraction]
    gamma: Fraction = Fraction(1)
    iterations_run: int = 1
    iterations_enumerated: int = 1
    guarantee_void: bool = False
    certificates: tuple[TransformCertificate, ...] = ()
    notes: tuple[str, ...] = ()


def strip_dummies(inst: MetricInstance, tours: Iterable[tuple[int, DepotTour]]) -> list[tuple[int, DepotTour]]:
    """Drop depot visits from tour interiors and depot keys from assignments;
    tours left without customers are discarded."""
    out: list[tuple[int, DepotTour]] = []
    for u, t in tours:
        interior = [v for v in t.seq[1:-1] if not inst.is_depot(v)]
        if not interior:
            continue
        load = {v: a for v, a in t.load.items() if not inst.is_depot(v) and a > 0}
        out.append((u, DepotTour((u, *interior, u), load)))
    return out


def empty_result(name: str, claimed: Optional[Fraction], gamma: Fraction = Fraction(1)) -> SolverResult:
    return SolverResult(name, Solution(()), 0, claimed, gamma, 0, 0, notes=("no customers",))


def as_fraction(eps) -> Fraction:
    f = Fraction(eps)
    if f <= 0:
        raise ValueError("eps must be positive")
    return f


def tours_cost(inst: MetricInstance, tours: Sequence[tuple[int, DepotTour]]) -> int:
    c = inst.cost
    return sum(sum(c[a][b] for a, b in zip(t.seq, t.seq[1:])) for _, t in tours)
