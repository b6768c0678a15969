"""Simulated execution of selected plans: timelines, battery traces, energy reconciliation."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .energetics import DroneSpec, EnergyModel, battery_energy
from .epos import Selection
from .plangen import PlanSet
from .sensemap import SensingMap

# spawn-key tag for per-drone power-noise streams
_NOISE_STREAM = 3

EVENT_KINDS = ("takeoff", "calibration", "travel", "hover", "landing")


@dataclass(frozen=True)
class SimConfig:
    calibration_s: float = 0.0
    noise_sigma: float = 0.0
    battery_start_pct: Union[float, Sequence[float]] = 100.0
    seed: int = 0

    def __post_init__(self):
        if self.calibration_s < 0:
            raise ValueError(f"calibration_s must be >= 0, got {self.calibration_s}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        for pct in np.atleast_1d(self.battery_start_pct):
            if not 0 < pct <= 100:
                raise ValueError(f"battery_start_pct must lie in (0, 100], got {pct}")

    def start_pct(self, i: int) -> float:
        pct = self.battery_start_pct
        if np.ndim(pct) == 0:
            return float(pct)
        return float(pct[i])


@dataclass(frozen=True)
class Event:
    kind: str
    cell: Optional[int]  # hover cell, or leg destination for travel
    duration: float
    energy: float
    origin: Optional[int] = None
    failed: bool = False


@dataclass
class MissionLog:
    uav_index: int
    agent_id: int
    route: tuple[int, ...]
    events: list[Event] = field(default_factory=list)
    battery_start_pct: float = 100.0
    battery_end_pct: float = 100.0
    estimated_energy: float = 0.0
    calibration_time: float = 0.0
    completed: bool = True

    @property
    def total_time(self) -> float:
        return float(sum(e.duration for e in self.events))

    @property
    def mission_time(self) -> float:
        """Flight time excluding calibration."""
        return float(sum(e.duration for e in self.events if e.kind != "calibration"))

    @property
    def actual_energy(self) -> float:
        return float(sum(e.energy for e in self.events))

    @property
    def sensing_time(self) -> float:
        return float(sum(e.duration for e in self.events if e.kind == "hover"))

    @property
    def actual_power(self) -> float:
        t = self.total_time
        return self.actual_energy / t if t > 0 else 0.0

    @property
    def sensed(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for e in self.events:
            if e.kind == "hover" and not e.failed:
                out[e.cell] = out.get(e.cell, 0.0) + e.duration
        return out

    def to_dict(self) -> dict:
        return {
            "uav_index": self.uav_index,
            "agent_id": self.agent_id,
            "route": list(self.route),
            "events": [asdict(e) for e in self.events],
            "battery_start_pct": self.battery_start_pct,
            "battery_end_pct": self.battery_end_pct,
            "estimated_energy": self.estimated_energy,
            "calibration_time": self.calibration_time,
            "completed": self.completed,
            "total_time": self.total_time,
            "mission_time": self.mission_time,
            "actual_energy": self.actual_energy,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MissionLog":
        return cls(
            uav_index=int(d["uav_index"]),
            agent_id=int(d["agent_id"]),
            route=tuple(d["route"]),
            events=[Event(**e) for e in d["events"]],
            battery_start_pct=float(d["battery_start_pct"]),
            battery_end_pct=float(d["battery_end_pct"]),
            estimated_energy=float(d["estimated_energy"]),
            calibration_time=float(d["calibration_time"]),
            completed=bool(d["completed"]),
        )


def _noise_rng(seed: int, agent_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(_NOISE_STREAM, int(agent_id))))


def fly(plan, agent_id: int, uav_index: int, smap: SensingMap, model: EnergyModel,
        spec: DroneSpec, config: SimConfig, battery_start_pct: float = 100.0) -> MissionLog:
    """Fly one plan and return its event log.

    Events run takeoff, calibration, then alternating travel legs and hovers,
    the return leg and landing. Takeoff and landing are zero-length markers;
    the vertical phases are charged through the calibration time.
    """
    rng = _noise_rng(config.seed, agent_id) if config.noise_sigma > 0 else None

    def power(nominal):
        if rng is None:
            return nominal
        return nominal * max(0.0, 1.0 + config.noise_sigma * rng.standard_normal())

    steps: list[tuple[str, Optional[int], float, float, Optional[int]]] = [
        ("takeoff", smap.departure_cell, 0.0, 0.0, None)]
    if config.calibration_s > 0:
        steps.append(("calibration", smap.departure_cell, config.calibration_s,
                      model.maneuver_power, None))
    here = smap.departure_cell
    for cell in plan.route:
        if cell != here:
            steps.append(("travel", cell, smap.distance(here, cell) / spec.ground_speed,
                          model.maneuver_power, here))
        steps.append(("hover", cell, float(plan.hover[cell]), model.hover_power, None))
        here = cell
    if here != smap.departure_cell:
        steps.append(("travel", smap.departure_cell,
                      smap.distance(here, smap.departure_cell) / spec.ground_speed,
                      model.maneuver_power, here))
    steps.append(("landing", smap.departure_cell, 0.0, 0.0, None))

    available = battery_energy(spec, usable=True) * battery_start_pct / 100
    log = MissionLog(uav_index=uav_index, agent_id=agent_id, route=tuple(plan.route),
                     battery_start_pct=battery_start_pct, estimated_energy=plan.cost,
                     calibration_time=config.calibration_s)
    used = 0.0
    for kind, cell, duration, nominal, origin in steps:
        energy = power(nominal) * duration
        if used + energy > available:
            # cut the event short where the battery runs out
            p = energy / duration if duration > 0 else 0.0
            left = available - used
            log.events.append(Event(kind, cell, left / p if p > 0 else 0.0, left, origin, failed=True))
            log.completed = False
            used = available
            break
        log.events.append(Event(kind, cell, duration, energy, origin))
        used += energy
    usable = battery_energy(spec, usable=True)
    log.battery_end_pct = max(0.0, battery_start_pct - 100 * log.actual_energy / usable)
    return log


def execute_mission(selection: Selection, plan_sets: Sequence[PlanSet], smap: SensingMap,
                    model: EnergyModel, spec: DroneSpec,
                    config: SimConfig = SimConfig()) -> list[MissionLog]:
    """Fly every agent's selected plan; logs are ordered by ``uav_index`` (agent order + 1)."""
    logs = []
    for i, (ps, k) in enumerate(zip(plan_sets, selection.chosen)):
        logs.append(fly(ps.plans[k], ps.agent_id, i + 1, smap, model, spec, config,
                        config.start_pct(i)))
    return logs


@dataclass(frozen=True)
class Reconciliation:
    uav_index: int
    estimated: float
    corrected: float  # estimate plus calibration flight
    actual: float

    @property
    def error(self) -> float:
        return self.actual - self.corrected


def reconcile_energy(logs: Sequence[MissionLog], model: EnergyModel) -> list[Reconciliation]:
    """Estimated vs. actual energy per drone, with and without the calibration correction."""
    return [
        Reconciliation(
            uav_index=log.uav_index,
            estimated=log.estimated_energy,
            corrected=log.estimated_energy + model.maneuver_power * log.calibration_time,
            actual=log.actual_energy,
        )
        for log in logs
    ]


def cumulative_coverage(source, smap: SensingMap,
                        plan_sets: Optional[Sequence[PlanSet]] = None) -> list[np.ndarray]:
    """Per-cell sensed seconds after each drone's trip, in ``uav_index`` order.

    ``source`` is either a list of mission logs or a :class:`Selection`
    (which then needs ``plan_sets``).
    """
    if isinstance(source, Selection):
        if plan_sets is None:
            raise ValueError("plan_sets are required to expand a Selection")
        vectors = [p.hover for p in source.plans(plan_sets)]
    else:
        vectors = []
        for log in sorted(source, key=lambda l: l.uav_index):
            v = np.zeros(smap.N)
            for cell, secs in log.sensed.items():
                v[cell] += secs
            vectors.append(v)
    if not vectors:
        return [np.zeros(smap.N)]
    return list(np.cumsum(np.stack(vectors), axis=0))
