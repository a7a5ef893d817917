from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdsdvrp.instance import (
    SCALE,
    GenerationError,
    InstanceFormatError,
    MalformedSolutionError,
    Solution,
    Tour,
    check_solution,
    euclidean_costs,
    generate_instance,
    instance_from_matrix,
    parse_instance,
    validate_instance,
    write_instance,
)


def one_customer(q=2, Q=3, c=7):
    return instance_from_matrix([[0, c], [c, 0]], fleets=[1], demands=[q], Q=Q)


def codes(violations):
    return [v.code for v in violations]


# -- validation ---------------------------------------------------------------


def test_two_point_metric_is_valid():
    inst = instance_from_matrix([[0, 5], [5, 0]], [1], [1], 1)
    assert validate_instance(inst) == []


def test_triangle_violation_reported():
    # a=0 (depot), b=1, c=2: c(a,b)=10 > c(a,c)+c(c,b)=2
    m = [[0, 10, 1], [10, 0, 1], [1, 1, 0]]
    inst = instance_from_matrix(m, [1], [1, 1], 2)
    tri = [v for v in validate_instance(inst) if v.code == "triangle"]
    # both orientations of the same violated inequality are ordered triples
    assert tri and all("10 > " in v.detail for v in tri)
    assert {v.detail for v in tri} == {"c(0,1)=10 > c(0,2)+c(2,1)=2", "c(1,0)=10 > c(1,2)+c(2,0)=2"}


def test_fleet_capacity_violation():
    z = [[0] * 4 for _ in range(4)]
    inst = instance_from_matrix(z, [1, 1], [3, 4], 3)
    assert codes(validate_instance(inst)) == ["fleet-capacity"]


@pytest.mark.parametrize(
    "fleets,demands,Q,code",
    [([0], [1], 1, "fleet"), ([1], [0], 1, "demand"), ([1], [1], 0, "capacity")],
)
def test_nonpositive_fields(fleets, demands, Q, code):
    inst = instance_from_matrix([[0, 1], [1, 0]], fleets, demands, Q)
    assert code in codes(validate_instance(inst))


def test_asymmetric_and_diagonal():
    inst = instance_from_matrix([[1, 2], [3, 0]], [1], [1], 1)
    found = codes(validate_instance(inst))
    assert "asymmetric" in found and "diagonal" in found


# -- check_solution -------------------------------------------------------------


def test_single_tour_feasible():
    inst = one_customer()
    sol = Solution((Tour(0, 0, (0, 1, 0), {1: 2}),))
    rep = check_solution(inst, sol)
    assert rep.feasible and rep.total_cost == 14 and rep.vehicles_used == 1
    assert rep.max_load_ratio == Fraction(2, 3)


def test_demand_unmet():
    inst = one_customer()
    rep = check_solution(inst, Solution((Tour(0, 0, (0, 1, 0), {1: 1}),)))
    assert codes(rep.violations) == ["demand-unmet"]


def test_bifactor_capacity_boundary():
    inst = one_customer(q=4, Q=3)
    sol = Solution((Tour(0, 0, (0, 1, 0), {1: 4}),))
    assert check_solution(inst, sol, Fraction(3, 2)).feasible
    rep = check_solution(inst, sol, 1)
    assert codes(rep.violations) == ["capacity"]


def test_off_tour_assignment():
    m = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    inst = instance_from_matrix(m, [2], [1, 1], 2)
    sol = Solution((Tour(0, 0, (0, 1, 0), {1: 1, 2: 1}),))
    assert codes(check_solution(inst, sol).violations) == ["off-tour-assignment"]


@pytest.mark.parametrize(
    "tours",
    [
        # same vehicle twice
        (Tour(0, 0, (0, 2, 0), {2: 1}), Tour(0, 0, (0, 3, 0), {3: 1})),
        # vehicle 1 belongs to depot 0, claimed by depot 1
        (Tour(0, 0, (0, 2, 0), {2: 1}), Tour(1, 1, (1, 3, 1), {3: 1})),
        # tour does not start at its depot
        (Tour(0, 0, (2, 3, 0), {2: 1, 3: 1}),),
        # passes through another depot
        (Tour(0, 0, (0, 2, 1, 3, 0), {2: 1, 3: 1}),),
        # repeats a customer
        (Tour(0, 0, (0, 2, 3, 2, 0), {2: 1, 3: 1}),),
    ],
)
def test_tour_structure_violations(tours):
    z = [[0] * 4 for _ in range(4)]
    inst = instance_from_matrix(z, [2, 1], [1, 1], 2)
    assert "tour-structure" in codes(check_solution(inst, Solution(tours)).violations)


def test_malformed_ids_raise():
    inst = one_customer()
    with pytest.raises(MalformedSolutionError):
        check_solution(inst, Solution((Tour(5, 0, (0, 1, 0), {1: 2}),)))
    with pytest.raises(MalformedSolutionError):
        check_solution(inst, Solution((Tour(0, 0, (0, 9, 0), {1: 2}),)))
    with pytest.raises(MalformedSolutionError):
        check_solution(inst, Solution((Tour(0, 0, (0, 1, 0), {0: 2}),)))


def test_solution_json_round_trip():
    inst = one_customer()
    sol = Solution((Tour(0, 0, (0, 1, 0), {1: 2}),))
    data = sol.to_json(inst)
    assert data["cost"] == 14
    assert Solution.from_json(data) == sol
    with pytest.raises(MalformedSolutionError):
        Solution.from_json({"tours": [{"depot": 0}]})


# -- text format -------------------------------------------------------------------


def test_smallest_matrix_file():
    text = "MDSDVRP 1\n1 1 3\ndepot 0 1\ncust 1 2\nmatrix\n0 5\n5 0\n"
    inst = parse_instance(text)
    assert (inst.k, inst.n, inst.Q, inst.fleets, inst.demands) == (1, 1, 3, (1,), (2,))
    assert inst.cost == ((0, 5), (5, 0))
    assert parse_instance(write_instance(inst)) == inst


def test_fleet_violation_parses_then_validates():
    text = "MDSDVRP 1\n1 2 3\ndepot 0 1\ncust 1 2\ncust 2 2\nmatrix\n0 1 1\n1 0 1\n1 1 0\n"
    inst = parse_instance(text)
    assert codes(validate_instance(inst)) == ["fleet-capacity"]


def test_coords_file_derives_rounded_costs():
    text = "MDSDVRP 1\n1 1 1\ndepot 0 1 0 0\ncust 1 1 3 4\ncoords\n"
    inst = parse_instance(text)
    assert inst.cost[0][1] == 5 * SCALE
    assert write_instance(inst).endswith("coords\n")
    assert parse_instance(write_instance(inst)) == inst


@pytest.mark.parametrize(
    "text,line",
    [
        ("MDSDVRP 2\n", 1),
        ("MDSDVRP 1\n1 1\n", 2),
        ("MDSDVRP 1\n1 1 3\ndepot 0 x\n", 3),
        ("MDSDVRP 1\n1 1 3\ndepot 0 1\ncust 2 1\n", 4),
        ("MDSDVRP 1\n1 1 3\ndepot 0 1\ncust 1 1\nmatrix\n0 1\n", 7),
        ("MDSDVRP 1\n1 1 3\ndepot 0 1\ncust 1 1\nmatrix\n0 1\n1 0\nextra\n", 8),
        ("MDSDVRP 1\n1 1 3\ndepot 0 1\ncust 1 1\ncoords\n", 5),
    ],
)
def test_syntax_errors_carry_line_numbers(text, line):
    with pytest.raises(InstanceFormatError) as info:
        parse_instance(text)
    assert info.value.line == line


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 8), k=st.integers(1, 3), Q=st.integers(1, 9))
def test_generated_round_trip_and_valid(seed, n, k, Q):
    inst = generate_instance(seed, n, k, Q)
    assert validate_instance(inst) == []
    assert parse_instance(write_instance(inst)) == inst


@settings(max_examples=30, deadline=None)
@given(
    pts=st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)), min_size=2, max_size=7),
)
def test_euclidean_costs_are_metric(pts):
    cost = euclidean_costs(pts)
    inst = instance_from_matrix(cost, [len(pts)], [1] * (len(pts) - 1), 1)
    assert [v for v in validate_instance(inst) if v.code != "fleet-capacity"] == []


def test_matrix_round_trip_when_coords_disagree():
    inst = generate_instance(3, 3, 1, 4)
    bumped = [list(r) for r in inst.cost]
    bumped[0][1] = bumped[1][0] = bumped[0][1] + 1
    other = instance_from_matrix(bumped, inst.fleets, inst.demands, inst.Q)
    assert parse_instance(write_instance(other)) == other


# -- generation -------------------------------------------------------------------------


def test_generation_is_deterministic():
    assert generate_instance(9, 6, 2, 5) == generate_instance(9, 6, 2, 5)
    assert generate_instance(9, 6, 2, 5) != generate_instance(10, 6, 2, 5)


def test_tight_single_customer():
    inst = generate_instance(1, 1, 1, 4, (4, 4), "tight")
    assert inst.m == 1 and inst.demands == (4,)


@pytest.mark.parametrize("seed", range(10))
def test_tight_and_slack_policies(seed):
    inst = generate_instance(seed, 5, 2, 5, (1, 5), "tight")
    assert inst.m * inst.Q - inst.total_demand == 0
    inst = generate_instance(seed, 5, 2, 5, (1, 5), "slack:3")
    assert inst.m * inst.Q - inst.total_demand == 3


def test_tight_adjusts_one_demand():
    # find a seed whose raw demands sum to 12 with Q=5: the generator must
    # raise the total to 15 by bumping the last customer only
    for seed in range(500):
        raw = generate_instance(seed, 4, 1, 5, (1, 5), "min")
        if raw.total_demand == 12:
            break
    else:
        pytest.skip("no seed with demand total 12")
    tight = generate_instance(seed, 4, 1, 5, (1, 5), "tight")
    assert tight.total_demand == 15 and tight.m == 3
    assert tight.demands[:-1] == raw.demands[:-1]


def test_unachievable_policy_names_constraint():
    with pytest.raises(GenerationError, match="m >= k"):
        generate_instance(0, 1, 3, 10, (1, 1), "tight")
    with pytest.raises(GenerationError):
        generate_instance(0, 2, 1, 3, (1, 3), "nonsense")
