"""Drone specification, calibrated power model and energy accounting.

Hover power follows actuator-disk momentum theory,

    P_induced = (m g)^{3/2} / sqrt(2 rho A),      A = n_props * pi * (d/2)^2

lumped with a propulsive efficiency ``eta`` and a constant avionics draw
``P0`` so that ``hover_power = P_induced / eta + P0``.  ``eta`` is fitted to a
target hover power.  Maneuvering power is a fixed multiple of hover power.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import CalibrationError, ConfigError

if TYPE_CHECKING:
    from .sensemap import SensingMap

AIR_DENSITY = 1.225
GRAVITY = 9.81

HOVER_POWER = 31.80
MANEUVER_POWER = 31.92
MANEUVER_RATIO = MANEUVER_POWER / HOVER_POWER
AVIONICS_POWER = 2.0


@dataclass(frozen=True)
class DroneSpec:
    """Physical parameters of one airframe. Defaults describe a Tello EDU."""

    mass: float = 0.1  # kg
    prop_diameter: float = 0.0726  # m
    prop_count: int = 4
    battery_capacity: float = 1100.0  # mAh
    nominal_voltage: float = 3.8  # V
    usable_fraction: float = 0.9
    ground_speed: float = 0.1  # m/s
    max_flight_time: float = 420.0  # s

    def __post_init__(self):
        for name in ("mass", "prop_diameter", "battery_capacity", "nominal_voltage",
                     "ground_speed", "max_flight_time"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"drone {name} must be positive, got {getattr(self, name)}")
        if self.prop_count < 1:
            raise ConfigError(f"drone needs at least one propeller, got {self.prop_count}")
        if not 0 < self.usable_fraction <= 1:
            raise ConfigError(f"usable_fraction must lie in (0, 1], got {self.usable_fraction}")

    @property
    def disk_area(self) -> float:
        return self.prop_count * math.pi * (self.prop_diameter / 2) ** 2


@dataclass(frozen=True)
class EnergyModel:
    hover_power: float
    maneuver_power: float
    efficiency: float
    avionics_power: float
    air_density: float = AIR_DENSITY
    gravity: float = GRAVITY

    def __post_init__(self):
        if not self.hover_power > 0:
            raise CalibrationError(f"hover power must be positive, got {self.hover_power}")
        if self.maneuver_power < self.hover_power:
            raise CalibrationError("maneuver power must not be below hover power")

    def reconstructed_hover_power(self, spec: DroneSpec) -> float:
        """Hover power rebuilt from the physical terms (audit of the calibration)."""
        p_i = induced_hover_power(spec, self.air_density, self.gravity)
        return p_i / self.efficiency + self.avionics_power

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)


@dataclass(frozen=True)
class EnergyEstimate:
    hover_time: float
    travel_time: float
    hover_energy: float
    travel_energy: float

    @property
    def total_energy(self) -> float:
        return self.hover_energy + self.travel_energy

    @property
    def total_time(self) -> float:
        return self.hover_time + self.travel_time


def induced_hover_power(spec: DroneSpec, air_density: float = AIR_DENSITY,
                        gravity: float = GRAVITY) -> float:
    return (spec.mass * gravity) ** 1.5 / math.sqrt(2 * air_density * spec.disk_area)


def calibrate(
    spec: DroneSpec = DroneSpec(),
    target_hover_power: float = HOVER_POWER,
    avionics_power: float = AVIONICS_POWER,
    maneuver_ratio: float = MANEUVER_RATIO,
    air_density: float = AIR_DENSITY,
    gravity: float = GRAVITY,
) -> EnergyModel:
    """Fit the propulsive efficiency so that hover power equals ``target_hover_power``."""
    if avionics_power < 0:
        raise CalibrationError(f"avionics power must be >= 0, got {avionics_power}")
    if not target_hover_power > avionics_power:
        raise CalibrationError(
            f"target hover power {target_hover_power} W must exceed avionics draw {avionics_power} W"
        )
    if maneuver_ratio < 1:
        raise CalibrationError(f"maneuver ratio must be >= 1, got {maneuver_ratio}")
    p_i = induced_hover_power(spec, air_density, gravity)
    eta = p_i / (target_hover_power - avionics_power)
    return EnergyModel(
        hover_power=float(target_hover_power),
        maneuver_power=float(target_hover_power * maneuver_ratio),
        efficiency=eta,
        avionics_power=float(avionics_power),
        air_density=air_density,
        gravity=gravity,
    )


def battery_energy(spec: DroneSpec, usable: bool = False) -> float:
    """Battery energy in joules; ``usable=True`` applies ``usable_fraction``."""
    energy = spec.battery_capacity / 1000 * spec.nominal_voltage * 3600
    return energy * spec.usable_fraction if usable else energy


def hover_endurance(spec: DroneSpec, model: EnergyModel) -> float:
    return battery_energy(spec, usable=True) / model.hover_power


def route_length(smap: "SensingMap", route: Sequence[int]) -> float:
    """Closed tour length: departure -> route cells in order -> departure."""
    if len(route) == 0:
        return 0.0
    stops = [smap.departure_cell, *route, smap.departure_cell]
    return sum(smap.distance(a, b) for a, b in zip(stops[:-1], stops[1:]))


def plan_energy(plan, model: EnergyModel, smap: "SensingMap", spec: DroneSpec) -> EnergyEstimate:
    """Estimated energy of flying ``plan.route`` and hovering ``plan.hover``."""
    for n in plan.route:
        if not 0 <= n < smap.N:
            raise IndexError(f"route cell {n} outside 0..{smap.N - 1}")
    hover_time = float(np.sum(plan.hover))
    travel_time = route_length(smap, plan.route) / spec.ground_speed
    return EnergyEstimate(
        hover_time=hover_time,
        travel_time=travel_time,
        hover_energy=model.hover_power * hover_time,
        travel_energy=model.maneuver_power * travel_time,
    )


def battery_feasible(plan, model: EnergyModel, spec: DroneSpec) -> bool:
    return (plan.total_time <= spec.max_flight_time
            and plan.cost <= battery_energy(spec, usable=True))
