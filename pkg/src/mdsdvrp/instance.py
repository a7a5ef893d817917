"""Instance and solution data model for the multi-depot split delivery VRP.

Vertex ids are dense and 0-based: depots occupy ``0..k-1`` and customers
``k..k+n-1``.  Edge costs are fixed-point integers (``SCALE`` units per
length unit) so every comparison in the library is exact.

Note on the metric axioms: the usual statement ``c(x, y) = 0`` is read here as
``c(x, x) = 0``; distinct vertices may still be at distance zero.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

SCALE = 1_000_000
FORMAT_HEADER = "MDSDVRP 1"


class InstanceFormatError(ValueError):
    """Raised when an instance file does not follow the text grammar."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class GenerationError(ValueError):
    """Raised when a requested fleet policy cannot be realised."""


class MalformedSolutionError(ValueError):
    """Raised when a solution references ids that do not exist."""


@dataclass(frozen=True)
class MetricInstance:
    Q: int
    fleets: tuple[int, ...]
    demands: tuple[int, ...]
    cost: tuple[tuple[int, ...], ...]
    coords: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self) -> None:
        size = len(self.fleets) + len(self.demands)
        if len(self.cost) != size or any(len(row) != size for row in self.cost):
            raise ValueError(f"cost matrix must be {size}x{size}")
        if self.coords is not None and len(self.coords) != size:
            raise ValueError(f"expected {size} coordinates, got {len(self.coords)}")

    @property
    def k(self) -> int:
        return len(self.fleets)

    @property
    def n(self) -> int:
        return len(self.demands)

    @property
    def m(self) -> int:
        return sum(self.fleets)

    @property
    def size(self) -> int:
        return len(self.fleets) + len(self.demands)

    @property
    def depots(self) -> range:
        return range(self.k)

    @property
    def customers(self) -> range:
        return range(self.k, self.size)

    def is_depot(self, v: int) -> bool:
        return v < self.k

    def demand(self, v: int) -> int:
        """Demand of vertex ``v``; depots have demand 0."""
        return 0 if v < self.k else self.demands[v - self.k]

    def demand_vector(self) -> list[int]:
        return [0] * self.k + list(self.demands)

    @property
    def total_demand(self) -> int:
        return sum(self.demands)

    def vehicles_of(self, u: int) -> range:
        start = sum(self.fleets[:u])
        return range(start, start + self.fleets[u])

    def vehicle_depot(self, vehicle: int) -> int:
        acc = 0
        for u, r in enumerate(self.fleets):
            acc += r
            if vehicle < acc:
                return u
        raise MalformedSolutionError(f"unknown vehicle {vehicle}")

    def with_demands(self, demands: Sequence[int], Q: Optional[int] = None) -> "MetricInstance":
        return MetricInstance(
            Q=self.Q if Q is None else Q,
            fleets=self.fleets,
            demands=tuple(demands),
            cost=self.cost,
            coords=self.coords,
        )


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}"


def validate_instance(inst: MetricInstance) -> list[Violation]:
    """Return every violated instance invariant; an empty list means valid."""
    out: list[Violation] = []
    c = inst.cost
    size = inst.size
    if inst.Q < 1:
        out.append(Violation("capacity", f"Q={inst.Q} < 1"))
    for u, r in enumerate(inst.fleets):
        if r < 1:
            out.append(Violation("fleet", f"depot {u} has r={r} < 1"))
    for i, q in enumerate(inst.demands):
        if q < 1:
            out.append(Violation("demand", f"customer {inst.k + i} has q={q} < 1"))
    for x in range(size):
        if c[x][x] != 0:
            out.append(Violation("diagonal", f"c({x},{x})={c[x][x]}"))
        for y in range(size):
            if c[x][y] < 0:
                out.append(Violation("negative", f"c({x},{y})={c[x][y]}"))
            if y > x and c[x][y] != c[y][x]:
                out.append(Violation("asymmetric", f"c({x},{y})={c[x][y]} != c({y},{x})={c[y][x]}"))
    for x in range(size):
        cx = c[x]
        for z in range(size):
            cxz = cx[z]
            cz = c[z]
            for y in range(size):
                if cx[y] > cxz + cz[y]:
                    out.append(
                        Violation("triangle", f"c({x},{y})={cx[y]} > c({x},{z})+c({z},{y})={cxz + cz[y]}")
                    )
    if inst.Q >= 1 and inst.total_demand > inst.m * inst.Q:
        out.append(
            Violation("fleet-capacity", f"total demand {inst.total_demand} > m*Q = {inst.m}*{inst.Q}")
        )
    return out


# -- solutions ---------------------------------------------------------------


@dataclass(frozen=True)
class Tour:
    vehicle: int
    depot: int
    seq: tuple[int, ...]
    load: Mapping[int, int] = field(default_factory=dict)

    @property
    def customers(self) -> tuple[int, ...]:
        return self.seq[1:-1]

    @property
    def total_load(self) -> int:
        return sum(self.load.values())


@dataclass(frozen=True)
class Solution:
    tours: tuple[Tour, ...] = ()

    def cost(self, inst: MetricInstance) -> int:
        return sum(walk_cost(t.seq, inst.cost) for t in self.tours)

    def to_json(self, inst: MetricInstance) -> dict:
        return {
            "tours": [
                {
                    "vehicle": t.vehicle,
                    "depot": t.depot,
                    "seq": list(t.seq),
                    "lambda": {str(v): a for v, a in sorted(t.load.items())},
                }
                for t in self.tours
            ],
            "cost": self.cost(inst),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Solution":
        try:
            tours = tuple(
                Tour(
                    vehicle=int(t["vehicle"]),
                    depot=int(t["depot"]),
                    seq=tuple(int(x) for x in t["seq"]),
                    load={int(v): a for v, a in t.get("lambda", {}).items()},
                )
                for t in data["tours"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedSolutionError(f"bad solution JSON: {exc}") from exc
        return cls(tours)


def walk_cost(seq: Sequence[int], cost: Sequence[Sequence[int]]) -> int:
    return sum(cost[a][b] for a, b in zip(seq, seq[1:]))


@dataclass(frozen=True)
class AuditReport:
    feasible: bool
    violations: tuple[Violation, ...]
    total_cost: int
    vehicles_used: int
    max_load_ratio: Fraction


def check_solution(inst: MetricInstance, sol: Solution, gamma: Fraction | int = 1) -> AuditReport:
    """Audit ``sol`` against the four feasibility conditions.

    Capacity is relaxed to ``gamma * Q`` for bi-factor solutions.  Ids that do
    not exist in ``inst`` raise :class:`MalformedSolutionError`; everything
    else is reported as a violation.
    """
    gamma = Fraction(gamma)
    if gamma < 1:
        raise ValueError("gamma must be >= 1")
    size = inst.size
    violations: list[Violation] = []
    served = [0] * inst.n
    seen_vehicles: set[int] = set()
    max_load = 0
    active = 0

    for idx, t in enumerate(sol.tours):
        if not 0 <= t.vehicle < inst.m:
            raise MalformedSolutionError(f"tour {idx}: unknown vehicle {t.vehicle}")
        if not 0 <= t.depot < inst.k:
            raise MalformedSolutionError(f"tour {idx}: unknown depot {t.depot}")
        for v in t.seq:
            if not isinstance(v, int) or not 0 <= v < size:
                raise MalformedSolutionError(f"tour {idx}: unknown vertex {v!r}")
        for v, amount in t.load.items():
            if not isinstance(v, int) or not inst.k <= v < size:
                raise MalformedSolutionError(f"tour {idx}: unknown customer {v!r} in assignment")
            if not isinstance(amount, int) or isinstance(amount, bool) or amount < 0:
                raise MalformedSolutionError(f"tour {idx}: assignment {amount!r} is not a non-negative integer")

        # condition 1: a tour for a vehicle of its depot
        if t.vehicle in seen_vehicles:
            violations.append(Violation("tour-structure", f"vehicle {t.vehicle} used by more than one tour"))
        seen_vehicles.add(t.vehicle)
        if inst.vehicle_depot(t.vehicle) != t.depot:
            violations.append(Violation("tour-structure", f"vehicle {t.vehicle} does not belong to depot {t.depot}"))
        if len(t.seq) < 2 or t.seq[0] != t.depot or t.seq[-1] != t.depot:
            violations.append(Violation("tour-structure", f"tour {idx} does not start and end at depot {t.depot}"))
        interior = t.seq[1:-1]
        if any(inst.is_depot(v) for v in interior):
            violations.append(Violation("tour-structure", f"tour {idx} passes through a depot"))
        if len(set(interior)) != len(interior):
            violations.append(Violation("tour-structure", f"tour {idx} repeats a customer"))

        # condition 2: capacity
        load = t.total_load
        if load > gamma * inst.Q:
            violations.append(Violation("capacity", f"tour {idx} load {load} > {gamma}*{inst.Q}"))
        max_load = max(max_load, load)

        # condition 3: no assignment outside the tour
        visited = set(interior)
        for v, amount in t.load.items():
            if amount > 0 and v not in visited:
                violations.append(Violation("off-tour-assignment", f"tour {idx} assigns {amount} to unvisited {v}"))
            served[v - inst.k] += amount
        if interior:
            active += 1

    # condition 4: every demand met exactly
    for i, q in enumerate(inst.demands):
        if served[i] != q:
            violations.append(Violation("demand-unmet", f"customer {inst.k + i} served {served[i]} of {q}"))

    return AuditReport(
        feasible=not violations,
        violations=tuple(violations),
        total_cost=sol.cost(inst),
        vehicles_used=active,
        max_load_ratio=Fraction(max_load, inst.Q),
    )


# -- fixed-point Euclidean costs ------------------------------------------------


def _round_half_up_distance(dx: Fraction, dy: Fraction) -> int:
    # r = floor(sqrt(D) + 1/2) with D = (dx^2 + dy^2) * SCALE^2, i.e. the largest
    # r with (2r - 1)^2 <= 4D; exact for any float input.
    d4 = 4 * (dx * dx + dy * dy) * SCALE * SCALE
    a = math.isqrt(d4.numerator // d4.denominator)
    return (a + 1) // 2


def metric_closure(cost: list[list[int]]) -> list[list[int]]:
    size = len(cost)
    d = [row[:] for row in cost]
    for z in range(size):
        dz = d[z]
        for x in range(size):
            dxz = d[x][z]
            dx = d[x]
            for y in range(size):
                via = dxz + dz[y]
                if via < dx[y]:
                    dx[y] = via
    return d


def euclidean_costs(coords: Sequence[tuple[float, float]]) -> tuple[tuple[int, ...], ...]:
    """Fixed-point Euclidean distances, repaired into a metric by closure."""
    pts = [(Fraction(x), Fraction(y)) for x, y in coords]
    size = len(pts)
    raw = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            d = _round_half_up_distance(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1])
            raw[i][j] = raw[j][i] = d
    return tuple(tuple(row) for row in metric_closure(raw))


# -- text format -----------------------------------------------------------------


def write_instance(inst: MetricInstance) -> str:
    use_coords = inst.coords is not None and euclidean_costs(inst.coords) == inst.cost
    lines = [FORMAT_HEADER, f"{inst.k} {inst.n} {inst.Q}"]

    def xy(v: int) -> str:
        if inst.coords is None:
            return ""
        x, y = inst.coords[v]
        return f" {x!r} {y!r}"

    for u, r in enumerate(inst.fleets):
        lines.append(f"depot {u} {r}{xy(u)}")
    for i, q in enumerate(inst.demands):
        v = inst.k + i
        lines.append(f"cust {v} {q}{xy(v)}")
    if use_coords:
        lines.append("coords")
    else:
        lines.append("matrix")
        lines.extend(" ".join(str(x) for x in row) for row in inst.cost)
    return "\n".join(lines) + "\n"


_INT = re.compile(r"^-?\d+$")


def _int(tok: str, lineno: int, what: str) -> int:
    if not _INT.match(tok):
        raise InstanceFormatError(lineno, f"expected integer {what}, got {tok!r}")
    return int(tok)


def _float(tok: str, lineno: int) -> float:
    try:
        val = float(tok)
    except ValueError:
        raise InstanceFormatError(lineno, f"expected coordinate, got {tok!r}") from None
    if not math.isfinite(val):
        raise InstanceFormatError(lineno, f"coordinate {tok!r} is not finite")
    return val


def parse_instance(text: str) -> MetricInstance:
    """Parse the line-oriented instance format.

    Blank lines and lines starting with ``#`` are ignored.  Metric violations
    are not errors here; run :func:`validate_instance` on the result.
    """
    rows = [
        (no, line.split())
        for no, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    it = iter(rows)

    def take(what: str) -> tuple[int, list[str]]:
        try:
            return next(it)
        except StopIteration:
            last = rows[-1][0] if rows else 0
            raise InstanceFormatError(last + 1, f"unexpected end of file, expected {what}") from None

    no, toks = take("header")
    if " ".join(toks) != FORMAT_HEADER:
        raise InstanceFormatError(no, f"expected header {FORMAT_HEADER!r}")
    no, toks = take("'k n Q' line")
    if len(toks) != 3:
        raise InstanceFormatError(no, "expected 'k n Q'")
    k, n, Q = (_int(t, no, name) for t, name in zip(toks, ("k", "n", "Q")))
    if k < 1 or n < 0:
        raise InstanceFormatError(no, "need k >= 1 and n >= 0")

    fleets: list[int] = []
    demands: list[int] = []
    coords: list[Optional[tuple[float, float]]] = []
    for expected_id in range(k + n):
        kind = "depot" if expected_id < k else "cust"
        no, toks = take(f"{kind} line")
        if toks[0] != kind:
            raise InstanceFormatError(no, f"expected '{kind}' line, got {toks[0]!r}")
        if len(toks) not in (3, 5):
            raise InstanceFormatError(no, f"expected '{kind} <id> <value> [<x> <y>]'")
        vid = _int(toks[1], no, "id")
        if vid != expected_id:
            raise InstanceFormatError(no, f"expected id {expected_id}, got {vid}")
        value = _int(toks[2], no, "fleet size" if kind == "depot" else "demand")
        (fleets if kind == "depot" else demands).append(value)
        coords.append((_float(toks[3], no), _float(toks[4], no)) if len(toks) == 5 else None)

    no, toks = take("'coords' or 'matrix'")
    have_coords = all(p is not None for p in coords)
    if any(p is not None for p in coords) and not have_coords:
        raise InstanceFormatError(no, "coordinates must be given for all vertices or none")
    size = k + n
    if toks == ["coords"]:
        if not have_coords:
            raise InstanceFormatError(no, "'coords' requires coordinates on every vertex line")
        cost = euclidean_costs(coords)  # type: ignore[arg-type]
    elif toks == ["matrix"]:
        matrix = []
        for _ in range(size):
            no, toks = take("matrix row")
            if len(toks) != size:
                raise InstanceFormatError(no, f"matrix row needs {size} entries, got {len(toks)}")
            matrix.append(tuple(_int(t, no, "cost") for t in toks))
        cost = tuple(matrix)
    else:
        raise InstanceFormatError(no, "expected 'coords' or 'matrix'")
    for no, _ in it:
        raise InstanceFormatError(no, "trailing content after instance")

    return MetricInstance(
        Q=Q,
        fleets=tuple(fleets),
        demands=tuple(demands),
        cost=cost,
        coords=tuple(coords) if have_coords else None,  # type: ignore[arg-type]
    )


# -- generation ------------------------------------------------------------------


def _fleet_target(policy: str, total: int, Q: int, k: int) -> tuple[int, int]:
    """Return (demand increase, fleet size m) realising ``policy``."""
    if policy == "min":
        return 0, max(k, -(-total // Q))
    if policy.startswith("spare:"):
        extra = int(policy.split(":", 1)[1])
        return 0, max(k, -(-total // Q)) + extra
    if policy == "tight":
        slack = 0
    elif policy.startswith("slack:"):
        slack = int(policy.split(":", 1)[1])
        if slack < 0:
            raise GenerationError("slack must be non-negative")
    else:
        raise GenerationError(f"unknown fleet policy {policy!r}")
    bump = (-(total + slack)) % Q
    m = (total + bump + slack) // Q
    if m < k:
        raise GenerationError(
            f"fleet policy {policy!r} needs m*Q - sum(q) = {slack} with m >= k={k}, "
            f"but total demand {total + bump} only supports m={m}"
        )
    return bump, m


def generate_instance(
    seed: int,
    n: int,
    k: int,
    Q: int,
    demand_range: tuple[int, int] = (1, 0),
    fleet_policy: str = "min",
) -> MetricInstance:
    """Random Euclidean instance in the unit square, deterministic per seed.

    ``demand_range`` is inclusive; an upper bound of 0 means ``Q``.  Fleet
    policies: ``min`` (m = max(k, ceil(sum q / Q))), ``spare:e`` (min plus e
    vehicles), ``tight`` (m*Q == sum q) and ``slack:s`` (m*Q - sum q == s).
    The last two raise the final customer's demand to the next admissible
    total.
    """
    if n < 1 or k < 1 or Q < 1:
        raise GenerationError("need n, k, Q >= 1")
    lo, hi = demand_range
    hi = hi or Q
    if not 1 <= lo <= hi:
        raise GenerationError(f"bad demand range {demand_range}")
    rng = random.Random(seed)
    coords = tuple((round(rng.random(), 4), round(rng.random(), 4)) for _ in range(k + n))
    demands = [rng.randint(lo, hi) for _ in range(n)]
    bump, m = _fleet_target(fleet_policy, sum(demands), Q, k)
    demands[-1] += bump
    fleets = [1] * k
    for _ in range(m - k):
        fleets[rng.randrange(k)] += 1
    return MetricInstance(
        Q=Q,
        fleets=tuple(fleets),
        demands=tuple(demands),
        cost=euclidean_costs(coords),
        coords=coords,
    )


def instance_from_matrix(
    matrix: Iterable[Iterable[int]], fleets: Sequence[int], demands: Sequence[int], Q: int
) -> MetricInstance:
    return MetricInstance(
        Q=Q,
        fleets=tuple(fleets),
        demands=tuple(demands),
        cost=tuple(tuple(int(x) for x in row) for row in matrix),
    )
