"""Planning, coordinated plan selection and simulation for UAV swarm sensing missions."""

from .energetics import DroneSpec, EnergyModel, battery_energy, calibrate, plan_energy
from .epos import (EposConfig, Selection, TreeTopology, brute_force_select, build_tree,
                   greedy_select, rss, run_epos, unit_scale)
from .missionsim import SimConfig, cumulative_coverage, execute_mission, reconcile_energy
from .plangen import Plan, PlanSet, generate_plan, generate_plan_set
from .reporting import mission_inefficiency, summarize
from .sensemap import Requirements, SensingMap, allocate_hover_time, build_map, load_requirements

__version__ = "0.1.0"
