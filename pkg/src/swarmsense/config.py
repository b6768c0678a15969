"""Run configuration: a flat ``key = value`` file with dotted section prefixes.

Recognised keys and units::

    map.rows, map.cols                 grid size (cells)
    map.width_m, map.height_m          map extent (m)
    map.departure_cell                 departure/landing cell index
    map.requirements                   CSV of required hover seconds per cell
    map.densities                      optional CSV of density estimates
    map.operating_time_s               total hover budget T (s); with map.densities,
                                       requirements become T-proportional to density
    drone.mass_kg, drone.prop_diameter_m, drone.prop_count,
    drone.battery_mah, drone.voltage_v, drone.usable_fraction,
    drone.ground_speed_mps, drone.max_flight_time_s
    energy.hover_power_w, energy.maneuver_power_w, energy.avionics_power_w (W)
    energy.air_density (kg/m^3), energy.gravity (m/s^2)
    planner.plans_per_agent, planner.retry_budget
    epos.agents, epos.iterations, epos.beta, epos.seed, epos.strategy (epos|greedy)
    sim.calibration_s (s), sim.noise_sigma, sim.battery_start_pct (one value or comma list)
    output.dir, output.format (csv|json)

Lines starting with ``#`` are comments. Unknown keys are rejected.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .energetics import AIR_DENSITY, GRAVITY, DroneSpec, EnergyModel, calibrate
from .epos import EposConfig
from .errors import CalibrationError, ConfigError
from .missionsim import SimConfig
from .sensemap import Requirements, SensingMap, allocate_hover_time, build_map, load_requirements

SEED_ENV = "SWARMSENSE_SEED"
STRATEGIES = ("epos", "greedy")

_KEYS = {
    "map.rows": int, "map.cols": int, "map.width_m": float, "map.height_m": float,
    "map.departure_cell": int, "map.requirements": str, "map.densities": str,
    "map.operating_time_s": float,
    "drone.mass_kg": float, "drone.prop_diameter_m": float, "drone.prop_count": int,
    "drone.battery_mah": float, "drone.voltage_v": float, "drone.usable_fraction": float,
    "drone.ground_speed_mps": float, "drone.max_flight_time_s": float,
    "energy.hover_power_w": float, "energy.maneuver_power_w": float,
    "energy.avionics_power_w": float, "energy.air_density": float, "energy.gravity": float,
    "planner.plans_per_agent": int, "planner.retry_budget": int,
    "epos.agents": int, "epos.iterations": int, "epos.beta": float, "epos.seed": int,
    "epos.strategy": str,
    "sim.calibration_s": float, "sim.noise_sigma": float, "sim.battery_start_pct": str,
    "output.dir": str, "output.format": str,
}


@dataclass(frozen=True)
class RunConfig:
    smap: SensingMap
    requirements_path: Optional[Path]
    densities_path: Optional[Path] = None
    operating_time: Optional[float] = None
    spec: DroneSpec = field(default_factory=DroneSpec)
    hover_power: float = 31.80
    maneuver_power: float = 31.92
    avionics_power: float = 2.0
    air_density: float = AIR_DENSITY
    gravity: float = GRAVITY
    plans_per_agent: int = 16
    retry_budget: int = 1000
    agents: int = 10
    iterations: int = 40
    beta: float = 0.0
    seed: Optional[int] = None
    strategy: str = "epos"
    calibration_s: float = 0.0
    noise_sigma: float = 0.0
    battery_start_pct: Union[float, tuple[float, ...]] = 100.0
    out_dir: Path = Path("out")
    fmt: str = "csv"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"output format must be csv or json, got {self.fmt!r}")
        if self.agents < 1:
            raise ConfigError(f"need at least one agent, got {self.agents}")
        if self.plans_per_agent < 1:
            raise ConfigError(f"plans_per_agent must be >= 1, got {self.plans_per_agent}")
        if self.retry_budget < 1:
            raise ConfigError(f"retry_budget must be >= 1, got {self.retry_budget}")
        if self.requirements_path is None and (self.densities_path is None
                                               or self.operating_time is None):
            raise ConfigError("set map.requirements, or map.densities with map.operating_time_s")
        try:
            self.epos_config()
            self.sim_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if np_ndim(self.battery_start_pct) and len(self.battery_start_pct) != self.agents:
            raise ConfigError(f"{len(self.battery_start_pct)} battery levels for {self.agents} agents")

    @property
    def effective_seed(self) -> int:
        if self.seed is not None:
            return self.seed
        env = os.environ.get(SEED_ENV)
        if env:
            try:
                return int(env)
            except ValueError as exc:
                raise ConfigError(f"{SEED_ENV}={env!r} is not an integer") from exc
        return 0

    @property
    def effective_beta(self) -> float:
        return 1.0 if self.strategy == "greedy" else self.beta

    def check_files(self) -> None:
        for p in (self.requirements_path, self.densities_path):
            if p is not None and not p.is_file():
                raise ConfigError(f"missing input file: {p}")

    def load_requirements(self) -> Requirements:
        self.check_files()
        if self.requirements_path is not None:
            return load_requirements(self.requirements_path, self.smap, self.densities_path)
        dens = load_requirements(self.densities_path, self.smap)
        alloc = allocate_hover_time(dens.values, self.operating_time)
        return Requirements(alloc.t, dens.values)

    def energy_model(self) -> EnergyModel:
        try:
            return calibrate(self.spec, self.hover_power, self.avionics_power,
                             self.maneuver_power / self.hover_power,
                             self.air_density, self.gravity)
        except CalibrationError as exc:
            raise ConfigError(str(exc)) from exc

    def epos_config(self) -> EposConfig:
        return EposConfig(self.iterations, self.effective_beta, self.effective_seed)

    def sim_config(self) -> SimConfig:
        return SimConfig(self.calibration_s, self.noise_sigma, self.battery_start_pct,
                         self.effective_seed)

    def override(self, **changes) -> "RunConfig":
        return replace(self, **changes)


def np_ndim(v) -> int:
    return 0 if isinstance(v, (int, float)) else 1


def bundled_config(name: str = "paper.cfg") -> Path:
    return Path(str(resources.files("swarmsense") / "data" / name))


def parse_config_text(text: str, base_dir: Path = Path(".")) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    raw = dict(parser["run"])
    unknown = sorted(set(raw) - set(_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    vals = {}
    for key, text_value in raw.items():
        try:
            vals[key] = _KEYS[key](text_value.strip())
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot parse {text_value!r}") from exc

    def path(key):
        return (base_dir / vals[key]) if key in vals else None

    try:
        smap = build_map(vals.get("map.rows", 4), vals.get("map.cols", 4),
                         vals.get("map.width_m", 1.68), vals.get("map.height_m", 1.18),
                         vals.get("map.departure_cell", 0))
        spec = DroneSpec(
            mass=vals.get("drone.mass_kg", 0.1),
            prop_diameter=vals.get("drone.prop_diameter_m", 0.0726),
            prop_count=vals.get("drone.prop_count", 4),
            battery_capacity=vals.get("drone.battery_mah", 1100.0),
            nominal_voltage=vals.get("drone.voltage_v", 3.8),
            usable_fraction=vals.get("drone.usable_fraction", 0.9),
            ground_speed=vals.get("drone.ground_speed_mps", 0.1),
            max_flight_time=vals.get("drone.max_flight_time_s", 420.0),
        )
        pct = [float(x) for x in vals.get("sim.battery_start_pct", "100").split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out_dir = Path(vals.get("output.dir", "out"))
    return RunConfig(
        smap=smap,
        requirements_path=path("map.requirements"),
        densities_path=path("map.densities"),
        operating_time=vals.get("map.operating_time_s"),
        spec=spec,
        hover_power=vals.get("energy.hover_power_w", 31.80),
        maneuver_power=vals.get("energy.maneuver_power_w", 31.92),
        avionics_power=vals.get("energy.avionics_power_w", 2.0),
        air_density=vals.get("energy.air_density", AIR_DENSITY),
        gravity=vals.get("energy.gravity", GRAVITY),
        plans_per_agent=vals.get("planner.plans_per_agent", 16),
        retry_budget=vals.get("planner.retry_budget", 1000),
        agents=vals.get("epos.agents", 10),
        iterations=vals.get("epos.iterations", 40),
        beta=vals.get("epos.beta", 0.0),
        seed=vals.get("epos.seed"),
        strategy=vals.get("epos.strategy", "epos"),
        calibration_s=vals.get("sim.calibration_s", 0.0),
        noise_sigma=vals.get("sim.noise_sigma", 0.0),
        battery_start_pct=pct[0] if len(pct) == 1 else tuple(pct),
        out_dir=out_dir,
        fmt=vals.get("output.format", "csv"),
    )


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read a config file. A bare name of a bundled config (``paper.cfg``) also works."""
    path = Path(path)
    if not path.is_file():
        bundled = bundled_config(path.name)
        if path.parent == Path(".") and bundled.is_file():
            path = bundled
        else:
            raise ConfigError(f"config file not found: {path}")
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config_text(text, path.parent)
