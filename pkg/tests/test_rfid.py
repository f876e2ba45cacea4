import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cliquekit.apps.rfid import (
    RfidPlan,
    RfidScenario,
    brute_force_rccaa,
    build_rfid_conflict_graph,
    check_rfid_plan,
    geometric_scenario,
    random_rfid_scenario,
    solve_rccaa,
)
from cliquekit.errors import ConstraintViolation
from cliquekit.graph import is_independent_set
from cliquekit.solvers import exact_max_weight_clique


def two_readers(alpha=2):
    # tags t1..t3 as 0..2; reader 1 covers {t1} then {t1,t2}; reader 2 covers {t3} then {t2,t3}
    return RfidScenario(3, (({0}, {0, 1}), ({2}, {1, 2})), alpha)


def test_capacity_filter_removes_vertices():
    g, m = build_rfid_conflict_graph(two_readers(alpha=1))
    assert set(m.labels) == {(0, 0), (1, 0)}


def test_same_reader_conflict():
    g, m = build_rfid_conflict_graph(two_readers())
    assert g.has_edge(m.vertex((0, 0)), m.vertex((0, 1)))


def test_overlap_conflict():
    g, m = build_rfid_conflict_graph(two_readers())
    assert g.has_edge(m.vertex((0, 1)), m.vertex((1, 1)))  # share t2
    assert not g.has_edge(m.vertex((0, 0)), m.vertex((1, 0)))


def test_single_reader_largest_feasible_radius():
    s = RfidScenario(3, (({0}, {0, 1}, {0, 1, 2}),), 2)
    plan = solve_rccaa(s)
    assert plan.activation == ((0, 1),)
    assert len(plan.covered(s)) == 2


def test_two_reader_example():
    s = two_readers()
    plan = solve_rccaa(s)
    assert len(plan.covered(s)) == 3
    optima = []
    for choice in itertools.product(range(-1, 2), repeat=2):
        p = RfidPlan(tuple((r, d) for r, d in enumerate(choice) if d >= 0))
        try:
            check_rfid_plan(s, p)
        except ConstraintViolation:
            continue
        if len(p.covered(s)) == 3:
            optima.append(p.activation)
    assert sorted(optima) == [((0, 0), (1, 1)), ((0, 1), (1, 0))]
    assert plan.activation in optima


def test_all_conflicting_gives_empty_plan():
    s = RfidScenario(2, (({0, 1},), ({0, 1},)), 1)
    plan = solve_rccaa(s)
    assert plan.activation == () and not plan.covered(s)


def test_nested_coverage_required():
    with pytest.raises(ValueError):
        RfidScenario(3, (({0, 1}, {1}),), 2)


def test_geometry_adds_reader_conflicts():
    readers = [(0.0, 0.0), (3.0, 0.0)]
    tags = [(-1.0, 0.0), (4.0, 0.0)]
    with_geo = geometric_scenario(readers, tags, [1.0, 3.5], alpha=5)
    without = geometric_scenario(readers, tags, [1.0, 3.5], alpha=5, reader_collisions=False)
    g, m = build_rfid_conflict_graph(with_geo)
    # at radius 1 each reader sees only its own tag and the readers are 3 apart
    assert not g.has_edge(m.vertex((0, 0)), m.vertex((1, 0)))
    assert with_geo.reader_conflict(0, 1, 1, 0)
    assert not without.reader_conflict(0, 1, 1, 0)
    check_rfid_plan(with_geo, solve_rccaa(with_geo))


def test_checker_rejects_collisions():
    s = two_readers()
    with pytest.raises(ConstraintViolation):
        check_rfid_plan(s, RfidPlan(((0, 1), (1, 1))))
    with pytest.raises(ConstraintViolation):
        check_rfid_plan(s, RfidPlan(((0, 0), (0, 1))))
    with pytest.raises(ConstraintViolation):
        check_rfid_plan(RfidScenario(3, (({0, 1, 2},),), 2), RfidPlan(((0, 0),)))


def test_random_matches_brute_force(rng):
    for i in range(50):
        s = random_rfid_scenario(
            rng, int(rng.integers(1, 5)), int(rng.integers(1, 11)), int(rng.integers(1, 4)),
            alpha=int(rng.integers(1, 5)), reader_collisions=bool(i % 2),
        )
        plan = solve_rccaa(s)
        check_rfid_plan(s, plan)
        assert len(plan.covered(s)) == brute_force_rccaa(s)


@given(st.integers(0, 2**32))
def test_covered_is_additive_and_clique_dual(seed):
    s = random_rfid_scenario(np.random.default_rng(seed), 4, 10, 2, alpha=4)
    plan = solve_rccaa(s)
    assert len(plan.covered(s)) == sum(len(s.coverage[r][d]) for r, d in plan.activation)
    g, _ = build_rfid_conflict_graph(s)
    assert is_independent_set(g, plan.raw.vertices)
    assert exact_max_weight_clique(g.complement()).weight == plan.raw.weight


@given(st.integers(0, 2**32), st.integers(1, 4))
def test_monotone_in_alpha(seed, alpha):
    base = random_rfid_scenario(np.random.default_rng(seed), 4, 10, 3, alpha=alpha)
    bigger = RfidScenario(base.n_tags, base.coverage, alpha + 1)
    assert len(solve_rccaa(bigger).covered(bigger)) >= len(solve_rccaa(base).covered(base))


@given(st.integers(0, 2**32), st.integers(0, 3), st.integers(0, 10))
def test_adding_a_tag_raises_optimum_by_at_most_one(seed, r, extra):
    base = random_rfid_scenario(np.random.default_rng(seed), 4, 10, 2, alpha=10)
    r %= base.n_readers
    # a new tag 10 added to reader r at every level keeps the coverage nested
    cov = tuple(
        tuple(lvl | {base.n_tags} if i == r else lvl for lvl in levels)
        for i, levels in enumerate(base.coverage)
    )
    grown = RfidScenario(base.n_tags + 1, cov, 10)
    before = len(solve_rccaa(base).covered(base))
    after = len(solve_rccaa(grown).covered(grown))
    assert after <= before + 1
