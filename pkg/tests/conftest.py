import numpy as np
import pytest

from swarmsense.config import bundled_config
from swarmsense.energetics import DroneSpec, calibrate
from swarmsense.plangen import Plan, PlanSet
from swarmsense.sensemap import build_map, load_requirements

PAPER_REQUIREMENTS = bundled_config("paper_requirements.csv")


@pytest.fixture(scope="session")
def paper_map():
    return build_map(4, 4, 1.68, 1.18, 0)


@pytest.fixture(scope="session")
def paper_req(paper_map):
    return load_requirements(PAPER_REQUIREMENTS, paper_map)


@pytest.fixture(scope="session")
def spec():
    return DroneSpec()


@pytest.fixture(scope="session")
def model(spec):
    return calibrate(spec)


def vector_plan(hover, cost, route=None):
    hover = np.asarray(hover, dtype=float)
    if route is None:
        route = tuple(int(n) for n in np.flatnonzero(hover))
    return Plan(tuple(route), hover, float(cost), float(hover.sum()))


def random_instance(rng, max_agents=4, max_plans=4, cells=(4, 8)):
    """Small random selection problem: 13 s hover vectors and a 13 s-multiple target."""
    A = int(rng.integers(1, max_agents + 1))
    K = int(rng.integers(1, max_plans + 1))
    N = int(rng.integers(cells[0], cells[1] + 1))
    plan_sets = []
    for a in range(A):
        plans = []
        for _ in range(K):
            h = np.zeros(N)
            h[rng.choice(N, size=int(rng.integers(1, N + 1)), replace=False)] = 13.0
            plans.append(vector_plan(h, rng.uniform(100, 1000)))
        plan_sets.append(PlanSet(a, tuple(plans)))
    target = rng.integers(0, 5, size=N) * 13.0
    if not target.any():
        target[0] = 13.0
    return plan_sets, target


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
