import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swarmsense.energetics import battery_feasible, plan_energy, route_length
from swarmsense.errors import PlanGenerationError
from swarmsense.plangen import (HOVER_SECONDS, PlanSet, agent_rng, generate_all, generate_plan,
                                generate_plan_set, make_plan, nearest_neighbor_order,
                                order_route, plan_sensing_vector)
from swarmsense.sensemap import Requirements


def check_plan(plan, paper_map, paper_req, model, spec):
    assert 5 <= len(plan.route) <= 6
    assert len(set(plan.route)) == len(plan.route)
    assert set(plan.route) <= set(paper_req.positive_cells)
    expected = np.zeros(paper_map.N)
    expected[list(plan.route)] = HOVER_SECONDS
    assert np.array_equal(plan.hover, expected)
    assert battery_feasible(plan, model, spec)
    est = plan_energy(plan, model, paper_map, spec)
    assert plan.cost == est.total_energy
    assert plan.total_time == est.total_time
    assert plan.total_time <= 420


def test_generate_plan_invariants(paper_map, paper_req, model, spec):
    rng = np.random.default_rng(3)
    for _ in range(200):
        check_plan(generate_plan(paper_map, paper_req, model, spec, rng),
                   paper_map, paper_req, model, spec)


def test_table_route_is_a_valid_plan(paper_map, paper_req, model, spec):
    plan = make_plan(nearest_neighbor_order(paper_map, [0, 7, 10, 12, 14, 15]),
                     paper_map, model, spec)
    check_plan(plan, paper_map, paper_req, model, spec)
    assert sorted(plan.route) == [0, 7, 10, 12, 14, 15]


def test_generated_routes_cover_table_row(paper_map, paper_req, model, spec):
    rng = np.random.default_rng(0)
    seen = {frozenset(generate_plan(paper_map, paper_req, model, spec, rng).route)
            for _ in range(20000)}
    assert frozenset({0, 7, 10, 12, 14, 15}) in seen


def test_generate_plan_deterministic(paper_map, paper_req, model, spec):
    a = generate_plan(paper_map, paper_req, model, spec, np.random.default_rng(11))
    b = generate_plan(paper_map, paper_req, model, spec, np.random.default_rng(11))
    assert a == b


def test_too_few_eligible_cells(paper_map, model, spec):
    req = Requirements([60, 60, 60, 60] + [0] * 12)
    with pytest.raises(PlanGenerationError):
        generate_plan(paper_map, req, model, spec, np.random.default_rng(0))


def test_infeasible_budget(paper_map, paper_req, model):
    from swarmsense.energetics import DroneSpec
    tiny = DroneSpec(max_flight_time=30.0)
    with pytest.raises(PlanGenerationError):
        generate_plan(paper_map, paper_req, model, tiny, np.random.default_rng(0), retry_budget=50)


def test_plan_set_paper(paper_map, paper_req, model, spec):
    ps = generate_plan_set(0, 16, paper_map, paper_req, model, spec, seed=1)
    assert len(ps) == 16
    assert len({p.route for p in ps.plans}) == 16
    for p in ps.plans:
        check_plan(p, paper_map, paper_req, model, spec)


def test_plan_set_sizes(paper_map, paper_req, model, spec):
    assert len(generate_plan_set(3, 1, paper_map, paper_req, model, spec, seed=1)) == 1
    with pytest.raises(PlanGenerationError):
        generate_plan_set(3, 0, paper_map, paper_req, model, spec, seed=1)


def test_plan_set_exhausts_distinct_routes(paper_map, model, spec):
    # 6 eligible cells allow 6 five-cell sets + 1 six-cell set = 7 distinct plans
    req = Requirements([60] * 6 + [0] * 10)
    ps = generate_plan_set(0, 7, paper_map, req, model, spec, seed=0)
    assert len({frozenset(p.route) for p in ps.plans}) == 7
    with pytest.raises(PlanGenerationError):
        generate_plan_set(0, 8, paper_map, req, model, spec, seed=0, retry_budget=200)


def test_agent_streams_order_insensitive(paper_map, paper_req, model, spec):
    forward = generate_all(4, 16, paper_map, paper_req, model, spec, seed=9)
    single = generate_plan_set(2, 16, paper_map, paper_req, model, spec, seed=9)
    assert forward[2] == single
    assert forward[0] != forward[1]


def test_seeds(paper_map, paper_req, model, spec):
    a = generate_all(3, 16, paper_map, paper_req, model, spec, seed=1)
    b = generate_all(3, 16, paper_map, paper_req, model, spec, seed=1)
    c = generate_all(3, 16, paper_map, paper_req, model, spec, seed=2)
    dump = lambda sets: json.dumps([s.to_dict() for s in sets])
    assert dump(a) == dump(b)
    assert dump(a) != dump(c)


def test_plan_set_json_round_trip(paper_map, paper_req, model, spec):
    ps = generate_plan_set(5, 4, paper_map, paper_req, model, spec, seed=3)
    assert PlanSet.from_dict(json.loads(json.dumps(ps.to_dict()))) == ps


def test_sensing_vector(paper_map, model, spec):
    plan = make_plan([0, 4], paper_map, model, spec)
    v = plan_sensing_vector(plan)
    assert list(np.flatnonzero(v)) == [0, 4] and set(v[[0, 4]]) == {13.0}
    assert v.sum() == 13 * len(plan.route)
    empty = make_plan([], paper_map, model, spec)
    assert not plan_sensing_vector(empty).any()


@settings(max_examples=300)
@given(st.lists(st.sampled_from([0, 4, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]),
                min_size=5, max_size=6, unique=True))
def test_ordering_never_lengthens_route(paper_map, sampled):
    ordered = order_route(paper_map, sampled)
    assert sorted(ordered) == sorted(sampled)
    assert route_length(paper_map, ordered) <= route_length(paper_map, sampled)


def test_nearest_neighbor_starts_at_departure(paper_map):
    assert nearest_neighbor_order(paper_map, [15, 0, 1]) == (0, 1, 15)
    assert nearest_neighbor_order(paper_map, [5, 4, 1])[0] in (1, 4)


def test_agent_rng_independent():
    assert agent_rng(1, 0).random() != agent_rng(1, 1).random()
    assert agent_rng(1, 0).random() == agent_rng(1, 0).random()
