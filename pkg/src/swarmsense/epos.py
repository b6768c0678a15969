"""Coordinated plan selection over a balanced binary tree of agents.

Every round runs a bottom-up pass (leaves first) in which each agent picks
the plan that best completes the partial aggregate it sees, followed by a
top-down acceptance step at the root.  The first round starts from an
empty context and must beat the greedy selection to be accepted.  An agent's objective mixes the
mismatch between the unit-scaled global response and the unit-scaled target
(weight ``1 - beta``) with its own min-max normalized plan cost (weight
``beta``).  Rounds that would raise the global cost are rolled back, so the
accepted cost never increases.

``greedy_select`` (each agent takes its cheapest plan) and
``brute_force_select`` (exhaustive search) are the reference points.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import InstanceTooLargeError, ScalingError, TopologyError
from .plangen import PlanSet

BRUTE_FORCE_LIMIT = 10**6

# spawn-key tag for the tree shuffle stream
_TREE_STREAM = 2


# -- signal matching --------------------------------------------------------

def unit_scale(v) -> np.ndarray:
    """Scale ``v`` (or each row of a 2-D array) to unit Euclidean length.

    Vectors are divided by their largest magnitude before the norm is taken,
    which keeps targets that differ by a positive factor bit-identical in
    the common case of a single repeated value.
    """
    v = np.asarray(v, dtype=float)
    peak = np.max(np.abs(v), axis=-1, keepdims=True)
    if np.any(peak == 0) or not np.all(np.isfinite(peak)):
        raise ScalingError("cannot unit-scale a zero or non-finite vector")
    w = v / peak
    return w / np.sqrt(np.sum(w * w, axis=-1, keepdims=True))


def rss(a, b) -> float | np.ndarray:
    """Residual sum of squares between unit-scaled ``a`` and ``b``.

    ``a`` may be a stack of candidates; one value per row is returned then.
    """
    d = unit_scale(a) - unit_scale(b)
    out = np.sum(d * d, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def normalized_costs(costs) -> np.ndarray:
    costs = np.asarray(costs, dtype=float)
    lo, hi = costs.min(), costs.max()
    if hi == lo:
        return np.zeros_like(costs)
    return (costs - lo) / (hi - lo)


def score(candidate_global, plan, target, beta: float, plan_set: PlanSet) -> float:
    """Objective an agent assigns to choosing ``plan`` with the given global response."""
    idx = next(i for i, p in enumerate(plan_set.plans) if p is plan or p == plan)
    local = normalized_costs(plan_set.costs)[idx]
    if beta >= 1:
        return float(local)
    return (1 - beta) * rss(candidate_global, target) + beta * float(local)


def _scores(candidates: np.ndarray, local: np.ndarray, target_unit: np.ndarray,
            beta: float) -> np.ndarray:
    if beta >= 1:
        return local
    d = unit_scale(candidates) - target_unit
    return (1 - beta) * np.sum(d * d, axis=-1) + beta * local


def _argmin(values: np.ndarray) -> int:
    # np.argmin returns the first minimum: lowest index wins ties
    return int(np.argmin(values))


# -- topology ---------------------------------------------------------------

@dataclass(frozen=True)
class TreeTopology:
    """Rooted tree over agent ids, stored as a child -> parent map."""

    parents: Mapping[int, Optional[int]]

    def __post_init__(self):
        parents = dict(self.parents)
        roots = [a for a, p in parents.items() if p is None]
        if len(roots) != 1:
            raise TopologyError(f"tree needs exactly one root, found {len(roots)}")
        for a, p in parents.items():
            if p is not None and p not in parents:
                raise TopologyError(f"agent {a} points at unknown parent {p}")
        object.__setattr__(self, "parents", parents)
        if len(self.order) != len(parents):
            raise TopologyError("topology is disconnected or contains a cycle")

    @property
    def root(self) -> int:
        return next(a for a, p in self.parents.items() if p is None)

    @property
    def children(self) -> dict[int, list[int]]:
        kids: dict[int, list[int]] = {a: [] for a in self.parents}
        for a, p in self.parents.items():
            if p is not None:
                kids[p].append(a)
        for k in kids.values():
            k.sort()
        return kids

    @property
    def order(self) -> tuple[int, ...]:
        """Agents in breadth-first order from the root."""
        kids = self.children
        seen, out, queue = set(), [], deque([self.root])
        while queue:
            a = queue.popleft()
            if a in seen:
                continue
            seen.add(a)
            out.append(a)
            queue.extend(kids[a])
        return tuple(out)

    def depth(self, agent: int) -> int:
        d = 0
        while self.parents[agent] is not None:
            agent = self.parents[agent]
            d += 1
        return d

    @property
    def height(self) -> int:
        return max(self.depth(a) for a in self.parents)

    def __len__(self):
        return len(self.parents)


def build_tree(agent_ids: Sequence[int], seed: int = 0) -> TreeTopology:
    """Balanced binary tree over a seeded shuffle of ``agent_ids`` (heap layout)."""
    ids = [int(a) for a in agent_ids]
    if not ids:
        raise TopologyError("cannot build a tree over zero agents")
    if len(set(ids)) != len(ids):
        raise TopologyError("agent ids must be unique")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(_TREE_STREAM,)))
    slots = [ids[i] for i in rng.permutation(len(ids))]
    parents = {a: (None if k == 0 else slots[(k - 1) // 2]) for k, a in enumerate(slots)}
    return TreeTopology(parents)


# -- selections -------------------------------------------------------------

@dataclass(frozen=True)
class EposConfig:
    iterations: int = 40
    beta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 <= self.beta <= 1:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")


@dataclass(frozen=True)
class RoundRecord:
    candidate_cost: float
    accepted_cost: float
    accepted: bool
    chosen: tuple[int, ...]
    root_aggregate: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class Selection:
    """Chosen plan index per agent (in ``plan_sets`` order) and their aggregate."""

    agent_ids: tuple[int, ...]
    chosen: tuple[int, ...]
    global_response: np.ndarray
    global_cost: float
    cost_trace: tuple[float, ...] = ()
    rounds: tuple[RoundRecord, ...] = field(default=(), repr=False)

    def __eq__(self, other):
        if not isinstance(other, Selection):
            return NotImplemented
        return (self.agent_ids == other.agent_ids
                and self.chosen == other.chosen
                and np.array_equal(self.global_response, other.global_response)
                and self.global_cost == other.global_cost)

    __hash__ = None

    def plans(self, plan_sets: Sequence[PlanSet]):
        return [ps.plans[k] for ps, k in zip(plan_sets, self.chosen)]

    def to_dict(self, plan_sets: Optional[Sequence[PlanSet]] = None) -> dict:
        d = {
            "agent_ids": list(self.agent_ids),
            "chosen": list(self.chosen),
            "global_response": [float(x) for x in self.global_response],
            "global_cost": self.global_cost,
            "cost_trace": list(self.cost_trace),
        }
        if plan_sets is not None:
            d["visited_cells"] = [sorted(p.route) for p in self.plans(plan_sets)]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Selection":
        return cls(
            agent_ids=tuple(int(a) for a in d["agent_ids"]),
            chosen=tuple(int(k) for k in d["chosen"]),
            global_response=np.asarray(d["global_response"], dtype=float),
            global_cost=float(d["global_cost"]),
            cost_trace=tuple(float(c) for c in d.get("cost_trace", ())),
        )


def _check_plan_sets(plan_sets: Sequence[PlanSet]) -> None:
    if not plan_sets:
        raise ValueError("no plan sets given")
    for ps in plan_sets:
        if len(ps.plans) == 0:
            raise ValueError(f"agent {ps.agent_id} has an empty plan set")


def global_cost(plan_sets: Sequence[PlanSet], chosen: Sequence[int], target,
                beta: float) -> float:
    """Fleet objective: weighted mismatch plus mean normalized local cost."""
    response = sum(ps.plans[k].hover for ps, k in zip(plan_sets, chosen))
    local = float(np.mean([normalized_costs(ps.costs)[k] for ps, k in zip(plan_sets, chosen)]))
    return _global_cost(response, local, target, beta)


def _global_cost(response, mean_local: float, target, beta: float) -> float:
    if beta >= 1:
        return mean_local
    return (1 - beta) * rss(response, target) + beta * mean_local


def _selection(plan_sets, chosen, beta, target, **extra) -> Selection:
    response = np.sum([ps.plans[k].hover for ps, k in zip(plan_sets, chosen)], axis=0)
    local = float(np.mean([normalized_costs(ps.costs)[k] for ps, k in zip(plan_sets, chosen)]))
    return Selection(
        agent_ids=tuple(ps.agent_id for ps in plan_sets),
        chosen=tuple(int(k) for k in chosen),
        global_response=response,
        global_cost=_global_cost(response, local, target, beta),
        **extra,
    )


def greedy_select(plan_sets: Sequence[PlanSet], target=None, beta: float = 1.0) -> Selection:
    """Each agent takes its cheapest plan, ignoring everyone else.

    ``global_cost`` is evaluated under ``beta`` (default: the pure local term);
    pass a ``target`` to evaluate it under a mismatch-weighted objective.
    """
    _check_plan_sets(plan_sets)
    chosen = [_argmin(ps.costs) for ps in plan_sets]
    return _selection(plan_sets, chosen, beta, target)


def brute_force_select(plan_sets: Sequence[PlanSet], target, beta: float = 0.0,
                       limit: int = BRUTE_FORCE_LIMIT) -> Selection:
    """Exhaustive minimum of the fleet objective; ties go to the lexicographically first combination."""
    _check_plan_sets(plan_sets)
    sizes = [len(ps) for ps in plan_sets]
    if math.prod(sizes) > limit:
        raise InstanceTooLargeError(f"{math.prod(sizes)} combinations exceed the limit of {limit}")
    vectors = [ps.vectors for ps in plan_sets]
    local = [normalized_costs(ps.costs) for ps in plan_sets]
    best, best_cost = None, math.inf
    for combo in itertools.product(*(range(k) for k in sizes)):
        response = np.sum([v[k] for v, k in zip(vectors, combo)], axis=0)
        mean_local = float(np.mean([l[k] for l, k in zip(local, combo)]))
        cost = _global_cost(response, mean_local, target, beta)
        if cost < best_cost:
            best, best_cost = combo, cost
    return _selection(plan_sets, best, beta, target)


def run_epos(plan_sets: Sequence[PlanSet], target, topology: TreeTopology,
             config: EposConfig = EposConfig()) -> Selection:
    _check_plan_sets(plan_sets)
    beta = config.beta
    by_agent = {ps.agent_id: i for i, ps in enumerate(plan_sets)}
    if len(by_agent) != len(plan_sets):
        raise ValueError("duplicate agent ids among plan sets")
    if set(topology.parents) != set(by_agent):
        raise TopologyError("topology nodes do not match the agents holding plan sets")
    target = np.asarray(target, dtype=float)
    target_unit = unit_scale(target) if beta < 1 else None

    vectors = {a: plan_sets[i].vectors for a, i in by_agent.items()}
    local = {a: normalized_costs(plan_sets[i].costs) for a, i in by_agent.items()}
    kids = topology.children
    bottom_up = topology.order[::-1]
    root = topology.root
    N = target.size

    # The incumbent starts as the uncoordinated cheapest-plan selection, so
    # the accepted cost can never end above the greedy baseline.
    prev_choice = {a: _argmin(plan_sets[i].costs) for a, i in by_agent.items()}
    prev_sub = {}
    for a in bottom_up:
        prev_sub[a] = sum((prev_sub[c] for c in kids[a]), vectors[a][prev_choice[a]].copy())
    prev_global = prev_sub[root]
    prev_cost = _global_cost(prev_global,
                             float(np.mean([local[a][prev_choice[a]] for a in by_agent])),
                             target, beta)
    trace, rounds = [], []

    for r in range(config.iterations):
        choice, sub = {}, {}
        for a in bottom_up:
            below = np.zeros(N)
            for c in kids[a]:
                below = below + sub[c]
            context = np.zeros(N) if r == 0 else prev_global - prev_sub[a]
            base = context + below
            candidates = base + vectors[a]
            k = _argmin(_scores(candidates, local[a], target_unit, beta))
            choice[a] = k
            sub[a] = below + vectors[a][k]
        candidate = sub[root]
        mean_local = float(np.mean([local[a][choice[a]] for a in by_agent]))
        cost = _global_cost(candidate, mean_local, target, beta)
        accepted = cost <= prev_cost
        if accepted:
            prev_choice, prev_sub, prev_global, prev_cost = choice, sub, candidate, cost
        trace.append(prev_cost)
        rounds.append(RoundRecord(
            candidate_cost=cost,
            accepted_cost=prev_cost,
            accepted=accepted,
            chosen=tuple(prev_choice[ps.agent_id] for ps in plan_sets),
            root_aggregate=prev_global.copy(),
        ))

    chosen = [prev_choice[ps.agent_id] for ps in plan_sets]
    sel = _selection(plan_sets, chosen, beta, target,
                     cost_trace=tuple(trace), rounds=tuple(rounds))
    return sel
