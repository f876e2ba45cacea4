import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cliquekit.apps.noma import (
    NomaAssignment,
    NomaScenario,
    brute_force_max_access,
    build_noma_graph,
    candidate_clusters,
    check_noma_assignment,
    feasible_assignments,
    noma_rate,
    noma_sinr,
    random_noma_scenario,
    solve_max_access,
)
from cliquekit.errors import ConstraintViolation
from cliquekit.graph import is_independent_set


def scenario(cpg, rate_min=0.0, powers=1.0, noise=1.0, gap=1.0, bandwidth=1.0):
    cpg = np.asarray(cpg, dtype=float)
    if cpg.ndim == 1:
        cpg = cpg[:, None]
    U = cpg.shape[0]
    return NomaScenario(
        np.sqrt(cpg).astype(complex), np.full(U, powers), noise, gap, bandwidth, np.broadcast_to(rate_min, (U,))
    )


def test_singleton_unit_snr():
    s = scenario([1.0], bandwidth=3.0)
    assert noma_sinr(s, (0,), 0, 0) == 1.0
    assert noma_rate(s, (0,), 0, 0) == 3.0


def test_pair_sinr_values():
    s = scenario([4.0, 1.0])
    assert math.isclose(noma_sinr(s, (0, 1), 0, 0), 2.0)
    assert noma_sinr(s, (0, 1), 0, 1) == 1.0  # weaker user decoded last, no interference


def test_equal_gain_tie_lower_index_sees_interference():
    s = scenario([2.0, 2.0])
    assert math.isclose(noma_sinr(s, (0, 1), 0, 0), 2.0 / 3.0)
    assert math.isclose(noma_sinr(s, (0, 1), 0, 1), 2.0)


def test_sinr_errors():
    s = scenario([1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        noma_sinr(s, (0, 1, 2), 0, 0)
    with pytest.raises(ValueError):
        noma_sinr(s, (0, 1), 0, 2)


def test_gap_scales_sinr():
    a = scenario([4.0, 1.0])
    b = scenario([4.0, 1.0], gap=2.0)
    assert math.isclose(noma_sinr(b, (0, 1), 0, 0), noma_sinr(a, (0, 1), 0, 0) / 2)


def test_zero_floors_give_full_set(rng):
    s = random_noma_scenario(rng, 4, 3, rate_min=0.0)
    A = feasible_assignments(s)
    assert len(A) == 3 * (4 + 4 * 3 // 2)


def test_huge_floor_gives_empty_set(rng):
    s = random_noma_scenario(rng, 4, 3, rate_min=math.inf)
    assert feasible_assignments(s) == []
    assert solve_max_access(s).count == 0


def test_single_pair_feasible():
    # U=3, K=1: user 0 needs 2.2 bits, so it pairs only with the weakest user
    s = scenario([8.0, 1.5, 1.0], rate_min=[2.2, 0.9, 0.9])
    A = feasible_assignments(s)
    expected = [
        (q, 0)
        for q in candidate_clusters(3)
        if all(noma_rate(s, q, 0, u) >= s.rate_min[u] for u in q)
    ]
    assert A == expected
    assert [q for q, _ in A if len(q) == 2] == [(0, 2)]


def test_graph_single_vertex():
    g, m = build_noma_graph(scenario([1.0]))
    assert g.n == 1 and g.num_edges == 0 and m.labels == (((0,), 0),)


def test_graph_edges_and_weights():
    s = scenario(np.ones((3, 2)))
    g, m = build_noma_graph(s)
    a = m.vertex(((0,), 0))
    b = m.vertex(((0,), 1))
    c = m.vertex(((1,), 1))
    assert g.has_edge(a, b)  # same user, different channels
    assert not g.has_edge(a, c)  # disjoint users, distinct channels
    assert g.weights[m.vertex(((0, 1), 0))] == 2.0
    assert g.weights[a] == 1.0


def test_two_users_one_channel_zero_floor():
    a = solve_max_access(scenario([3.0, 1.0]))
    assert a.clusters == (((0, 1), 0),) and a.count == 2


def test_independent_sets_are_assignments(rng):
    s = random_noma_scenario(rng, 3, 2)
    g, m = build_noma_graph(s)
    assert g.n <= 12
    for r in range(g.n + 1):
        for sub in itertools.combinations(range(g.n), r):
            a = NomaAssignment(tuple(m.decode(sub)))
            ok = True
            try:
                check_noma_assignment(s, a)
            except ConstraintViolation:
                ok = False
            if is_independent_set(g, sub):
                assert ok


def test_checker_catches_violations():
    s = scenario(np.ones((3, 2)))
    with pytest.raises(ConstraintViolation):
        check_noma_assignment(s, NomaAssignment((((0,), 0), ((0,), 1))))
    with pytest.raises(ConstraintViolation):
        check_noma_assignment(s, NomaAssignment((((0, 1), 0), ((2,), 0))))
    strict = scenario([1.0, 1.0], rate_min=5.0)
    with pytest.raises(ConstraintViolation):
        check_noma_assignment(strict, NomaAssignment((((0,), 0),)))


def test_random_matches_brute_force(rng):
    counts = []
    for _ in range(50):
        s = random_noma_scenario(rng, int(rng.integers(1, 6)), int(rng.integers(1, 4)))
        a = solve_max_access(s)
        assert a.count == brute_force_max_access(s)
        counts.append(a.count)
    assert len(set(counts)) > 2  # instances are not degenerate


@given(st.integers(0, 2**32), st.integers(0, 4), st.floats(0.0, 3.0))
def test_monotone_in_rate_floor(seed, u, bump):
    rng = np.random.default_rng(seed)
    s = random_noma_scenario(rng, 5, 2)
    u = u % s.n_users
    rmin = s.rate_min.copy()
    rmin[u] += bump
    t = NomaScenario(s.gains, s.powers, s.noise, s.gap, s.bandwidth, rmin)
    assert solve_max_access(t).count <= solve_max_access(s).count


@given(st.integers(0, 2**32))
def test_removing_a_channel_never_helps(seed):
    rng = np.random.default_rng(seed)
    s = random_noma_scenario(rng, 5, 3)
    best = solve_max_access(s).count
    for k in range(3):
        assert solve_max_access(s.without_channel(k)).count <= best


@pytest.mark.parametrize(
    "kw",
    [{"noise": 0.0}, {"gap": 0.5}, {"bandwidth": 0.0}, {"rate_min": -1.0}, {"powers": -1.0}],
)
def test_scenario_validation(kw):
    with pytest.raises(ValueError):
        scenario([1.0, 2.0], **kw)
