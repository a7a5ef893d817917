import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdsdvrp.graphprims import ContractViolation
from mdsdvrp.instance import walk_cost
from mdsdvrp.partition import extract_paths, partition_cost_bound, partition_depot_cycle, peel_trivial

from oracles import ring_split_best


def metric(rng, size):
    pts = [(rng.randint(0, 30), rng.randint(0, 30)) for _ in range(size)]
    return [[abs(a[0] - b[0]) + abs(a[1] - b[1]) for b in pts] for a in pts]


# -- peeling and extraction -----------------------------------------------------------


@pytest.mark.parametrize("q,Q,load,res", [(7, 3, 2, 1), (3, 3, 1, 0), (2, 3, 0, 2)])
def test_peel_trivial(q, Q, load, res):
    trivial, residual = peel_trivial([5], [q], Q)
    assert residual == [res]
    if load:
        assert len(trivial) == 1 and trivial[0].load == load and trivial[0].assignment == {5: load * Q}
    else:
        assert trivial == []


def test_extract_hand_trace():
    paths = extract_paths([1, 2, 3], [2, 2, 2], 3)
    assert [(p.vertices, p.assignment) for p in paths] == [((1, 2), {1: 2, 2: 1}), ((2, 3), {2: 1, 3: 2})]


def test_extract_single_and_empty():
    paths = extract_paths([4], [1], 3)
    assert [(p.vertices, p.assignment, p.load) for p in paths] == [((4,), {4: 1}, 1)]
    assert extract_paths([1, 2], [0, 0], 3) == []


def test_extract_rejects_large_residual():
    with pytest.raises(ContractViolation):
        extract_paths([1, 2], [1, 3], 3)


def check_extraction(cycle, residual, Q, paths):
    total = sum(residual)
    assert len(paths) == -(-total // Q)
    assert len(paths) <= sum(1 for r in residual if r)
    short = [p for p in paths if p.demand < Q]
    assert len(short) <= 1 and all(p.demand == Q for p in paths[:-1])
    served = {v: 0 for v in cycle}
    for p in paths:
        assert p.load == 1 and all(a > 0 for a in p.assignment.values())
        assert list(p.assignment) == list(p.vertices)
        for v, a in p.assignment.items():
            served[v] += a
    assert served == dict(zip(cycle, residual))
    # paths follow the cycle order and overlap only at a split vertex
    order = {v: i for i, v in enumerate(cycle)}
    for p, nxt in zip(paths, paths[1:]):
        assert all(order[a] < order[b] for a, b in zip(p.vertices, p.vertices[1:]))
        assert len(set(p.vertices) & set(nxt.vertices)) <= 1


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_extract_properties(data):
    Q = data.draw(st.integers(1, 8))
    t = data.draw(st.integers(1, 8))
    residual = data.draw(st.lists(st.integers(0, Q - 1), min_size=t, max_size=t))
    cycle = list(range(10, 10 + t))
    check_extraction(cycle, residual, Q, extract_paths(cycle, residual, Q))


# -- best-start tour partition ----------------------------------------------------------


def test_depot_partition_two_unit_customers():
    cost = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    tours = partition_depot_cycle(cost, 0, [1, 2], [1, 1], 2)
    assert [(t.seq, t.load) for t in tours] == [((0, 1, 2, 0), {1: 1, 2: 1})]


def test_depot_partition_full_trivial():
    cost = [[0, 3], [3, 0]]
    tours = partition_depot_cycle(cost, 0, [1], [2], 2)
    assert [(t.seq, t.load) for t in tours] == [((0, 1, 0), {1: 2})]


def test_depot_partition_three_units_best_start():
    # asymmetric placement: v1 near the depot, v2 and v3 far but close together
    pos = [(0, 0), (1, 0), (10, 0), (10, 1)]
    cost = [[abs(a[0] - b[0]) + abs(a[1] - b[1]) for b in pos] for a in pos]
    tours = partition_depot_cycle(cost, 0, [1, 2, 3], [1, 1, 1], 2)
    got = sum(walk_cost(t.seq, cost) for t in tours)
    assert len(tours) == 2
    assert got == ring_split_best(cost, 0, [1, 2, 3], [1, 1, 1], 2)
    # exhaustive over every 2-tour split of the three units
    best = None
    for mask in range(1, 7):
        a = [v for i, v in enumerate([1, 2, 3]) if mask >> i & 1]
        b = [v for v in [1, 2, 3] if v not in a]
        if len(a) > 2 or len(b) > 2:
            continue
        c = walk_cost((0, *a, 0), cost) + walk_cost((0, *b, 0), cost)
        best = c if best is None else min(best, c)
    assert got == best


def random_partition_case(rng, t_max):
    t = rng.randint(1, t_max)
    Qp = rng.randint(1, 6)
    lam = [rng.randint(0, 2 * Qp) for _ in range(t)]
    cost = metric(rng, t + 1)
    return cost, list(range(1, t + 1)), lam, Qp


def check_depot_partition(cost, cycle, lam, Qp, tours):
    total = sum(lam)
    assert len(tours) == -(-total // Qp)
    served = {v: 0 for v in cycle}
    for t in tours:
        assert t.seq[0] == t.seq[-1] == 0
        assert sum(t.load.values()) <= Qp
        assert set(t.load) <= set(t.seq[1:-1])
        for v, a in t.load.items():
            served[v] += a
    assert served == dict(zip(cycle, lam))
    got = sum(walk_cost(t.seq, cost) for t in tours)
    assert got <= partition_cost_bound(cost, 0, cycle, lam, Qp)
    return got


def test_depot_partition_random_and_brute_force():
    rng = random.Random(17)
    for _ in range(200):
        cost, cycle, lam, Qp = random_partition_case(rng, 5)
        got = check_depot_partition(cost, cycle, lam, Qp, partition_depot_cycle(cost, 0, cycle, lam, Qp))
        assert got == ring_split_best(cost, 0, cycle, lam, Qp)


def test_partition_cost_bound_is_exact_rational():
    cost = [[0, 3], [3, 0]]
    assert partition_cost_bound(cost, 0, [1], [1], 3) == 6 + Fraction(6, 3)
    assert partition_cost_bound(cost, 0, [1], [1], 4) == 6 + Fraction(3, 2)


def test_depot_partition_empty_demand():
    assert partition_depot_cycle([[0, 1], [1, 0]], 0, [1], [0], 3) == []
