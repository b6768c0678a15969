"""Candidate plan generation: random sensing routes with energy costs.

Each agent samples routes of 5 or 6 distinct cells drawn from the cells with
a positive sensing requirement, orders them nearest-neighbour from the
departure cell (falling back to the sampled order when that is shorter) and hovers a fixed 13 s over every route cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .energetics import DroneSpec, EnergyModel, battery_feasible, plan_energy, route_length
from .errors import PlanGenerationError
from .sensemap import Requirements, SensingMap

HOVER_SECONDS = 13.0
ROUTE_SIZES = (5, 6)
RETRY_BUDGET = 1000

# spawn-key tag separating plan-generation streams from other seeded streams
_PLAN_STREAM = 1


@dataclass(frozen=True, eq=False)
class Plan:
    route: tuple[int, ...]
    hover: np.ndarray
    cost: float
    total_time: float
    travel_time: float = 0.0

    def __eq__(self, other):
        if not isinstance(other, Plan):
            return NotImplemented
        return (self.route == other.route
                and np.array_equal(self.hover, other.hover)
                and self.cost == other.cost
                and self.total_time == other.total_time)

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "route": list(self.route),
            "hover": [float(h) for h in self.hover],
            "cost": self.cost,
            "total_time": self.total_time,
            "travel_time": self.travel_time,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Plan":
        return cls(
            route=tuple(int(n) for n in d["route"]),
            hover=np.asarray(d["hover"], dtype=float),
            cost=float(d["cost"]),
            total_time=float(d["total_time"]),
            travel_time=float(d.get("travel_time", 0.0)),
        )


@dataclass(frozen=True)
class PlanSet:
    agent_id: int
    plans: tuple[Plan, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.plans)

    @property
    def costs(self) -> np.ndarray:
        return np.array([p.cost for p in self.plans], dtype=float)

    @property
    def vectors(self) -> np.ndarray:
        """Sensing vectors stacked as shape ``(K, N)``."""
        return np.stack([p.hover for p in self.plans])

    def to_dict(self) -> dict:
        return {"agent_id": self.agent_id, "plans": [p.to_dict() for p in self.plans]}

    @classmethod
    def from_dict(cls, d: dict) -> "PlanSet":
        return cls(int(d["agent_id"]), tuple(Plan.from_dict(p) for p in d["plans"]))


def agent_rng(seed: int, agent_id: int) -> np.random.Generator:
    """Independent generator for one agent, derived from (seed, agent_id)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(_PLAN_STREAM, int(agent_id)))
    return np.random.default_rng(ss)


def nearest_neighbor_order(smap: SensingMap, cells: Sequence[int]) -> tuple[int, ...]:
    """Order ``cells`` greedily by proximity, starting from the departure cell.

    Distance ties go to the lower cell index.
    """
    remaining = sorted(int(c) for c in cells)
    here = smap.departure_cell
    order = []
    while remaining:
        nxt = min(remaining, key=lambda c: (smap.distance(here, c), c))
        order.append(nxt)
        remaining.remove(nxt)
        here = nxt
    return tuple(order)


def order_route(smap: SensingMap, sampled: Sequence[int]) -> tuple[int, ...]:
    """Nearest-neighbour order of ``sampled``, unless the sampled order is shorter."""
    sampled = tuple(int(c) for c in sampled)
    nn = nearest_neighbor_order(smap, sampled)
    if route_length(smap, sampled) < route_length(smap, nn):
        return sampled
    return nn


def make_plan(route: Sequence[int], smap: SensingMap, model: EnergyModel, spec: DroneSpec,
              hover_seconds: float = HOVER_SECONDS) -> Plan:
    """Build a plan over an already ordered route and cost it."""
    route = tuple(int(n) for n in route)
    if len(set(route)) != len(route):
        raise ValueError(f"route visits a cell twice: {route}")
    hover = np.zeros(smap.N)
    hover[list(route)] = hover_seconds
    draft = Plan(route, hover, 0.0, 0.0)
    est = plan_energy(draft, model, smap, spec)
    return Plan(route, hover, est.total_energy, est.total_time, est.travel_time)


def plan_sensing_vector(plan: Plan) -> np.ndarray:
    return np.array(plan.hover, dtype=float)


def _eligible(requirements: Requirements) -> list[int]:
    cells = list(requirements.positive_cells)
    if len(cells) < min(ROUTE_SIZES):
        raise PlanGenerationError(
            f"only {len(cells)} cells have a positive requirement; routes need {min(ROUTE_SIZES)}"
        )
    return cells


def _sample_route(cells: list[int], rng: np.random.Generator) -> list[int]:
    sizes = [k for k in ROUTE_SIZES if k <= len(cells)]
    k = int(rng.choice(sizes))
    return [cells[i] for i in rng.choice(len(cells), size=k, replace=False)]


def generate_plan(smap: SensingMap, requirements: Requirements, model: EnergyModel,
                  spec: DroneSpec, rng: np.random.Generator,
                  retry_budget: int = RETRY_BUDGET) -> Plan:
    cells = _eligible(requirements)
    for _ in range(retry_budget):
        route = order_route(smap, _sample_route(cells, rng))
        plan = make_plan(route, smap, model, spec)
        if battery_feasible(plan, model, spec):
            return plan
    raise PlanGenerationError(f"no battery-feasible plan found in {retry_budget} tries")


def generate_plan_set(agent_id: int, K: int, smap: SensingMap, requirements: Requirements,
                      model: EnergyModel, spec: DroneSpec, seed: Optional[int] = None,
                      rng: Optional[np.random.Generator] = None,
                      retry_budget: int = RETRY_BUDGET) -> PlanSet:
    """Generate ``K`` distinct feasible plans for one agent.

    Pass ``seed`` to derive the agent's stream from ``(seed, agent_id)``; an
    explicit ``rng`` takes precedence. ``retry_budget`` bounds the draws spent
    on each plan, duplicates included.
    """
    if K < 1:
        raise PlanGenerationError(f"plan set size must be >= 1, got {K}")
    if rng is None:
        rng = agent_rng(0 if seed is None else seed, agent_id)
    cells = _eligible(requirements)
    plans: list[Plan] = []
    seen: set[frozenset] = set()
    while len(plans) < K:
        for _ in range(retry_budget):
            route = order_route(smap, _sample_route(cells, rng))
            if frozenset(route) in seen:
                continue
            plan = make_plan(route, smap, model, spec)
            if battery_feasible(plan, model, spec):
                break
        else:
            raise PlanGenerationError(
                f"agent {agent_id}: could not find plan {len(plans) + 1} of {K} "
                f"within {retry_budget} tries"
            )
        seen.add(frozenset(route))
        plans.append(plan)
    return PlanSet(int(agent_id), tuple(plans))


def generate_all(agent_count: int, K: int, smap: SensingMap, requirements: Requirements,
                 model: EnergyModel, spec: DroneSpec, seed: int,
                 retry_budget: int = RETRY_BUDGET) -> list[PlanSet]:
    return [generate_plan_set(a, K, smap, requirements, model, spec, seed=seed,
                              retry_budget=retry_budget)
            for a in range(agent_count)]
