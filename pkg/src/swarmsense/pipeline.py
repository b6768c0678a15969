"""End-to-end stages: plan -> optimize -> simulate -> report.

Every stage is a pure function of the run configuration and the previous
stage's output; ``*_document`` helpers turn results into the JSON/CSV text
written by the command line tool.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .config import RunConfig
from .epos import Selection, build_tree, greedy_select, run_epos
from .missionsim import MissionLog, execute_mission, reconcile_energy
from .plangen import PlanSet, generate_all
from .reporting import (RunReport, format_cost_trace, format_table, format_trip_series,
                        summarize)

FILES = {
    "plans": "plans.json",
    "selection": "selection.json",
    "missions": "missions.json",
    "costtrace": "costtrace.csv",
    "summary": "summary.json",
}


@dataclass
class RunResult:
    config: RunConfig
    plan_sets: list[PlanSet]
    selection: Selection
    logs: list[MissionLog]
    report: RunReport


def plan(cfg: RunConfig) -> list[PlanSet]:
    return generate_all(cfg.agents, cfg.plans_per_agent, cfg.smap, cfg.load_requirements(),
                        cfg.energy_model(), cfg.spec, cfg.effective_seed, cfg.retry_budget)


def optimize(cfg: RunConfig, plan_sets: Sequence[PlanSet]) -> Selection:
    if cfg.strategy == "greedy":
        return greedy_select(plan_sets)
    target = cfg.load_requirements().values
    tree = build_tree([ps.agent_id for ps in plan_sets], cfg.effective_seed)
    return run_epos(plan_sets, target, tree, cfg.epos_config())


def simulate(cfg: RunConfig, plan_sets: Sequence[PlanSet], selection: Selection) -> list[MissionLog]:
    return execute_mission(selection, plan_sets, cfg.smap, cfg.energy_model(), cfg.spec,
                           cfg.sim_config())


def report(cfg: RunConfig, selection: Selection, logs: Sequence[MissionLog]) -> RunReport:
    rep = summarize(selection, logs, cfg.load_requirements(), cfg.energy_model(), cfg.smap,
                    strategy=cfg.strategy, beta=cfg.effective_beta)
    rep.extra["seed"] = cfg.effective_seed
    return rep


def run(cfg: RunConfig) -> RunResult:
    plan_sets = plan(cfg)
    selection = optimize(cfg, plan_sets)
    logs = simulate(cfg, plan_sets, selection)
    return RunResult(cfg, plan_sets, selection, logs, report(cfg, selection, logs))


# -- documents --------------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def plans_document(plan_sets: Sequence[PlanSet], cfg: RunConfig) -> str:
    return _dumps({"seed": cfg.effective_seed, "plan_sets": [ps.to_dict() for ps in plan_sets]})


def read_plans(text: str) -> list[PlanSet]:
    return [PlanSet.from_dict(d) for d in json.loads(text)["plan_sets"]]


def selection_document(selection: Selection, plan_sets: Sequence[PlanSet], cfg: RunConfig) -> str:
    doc = selection.to_dict(plan_sets)
    doc.update(strategy=cfg.strategy, beta=cfg.effective_beta, seed=cfg.effective_seed)
    return _dumps(doc)


def read_selection(text: str) -> Selection:
    return Selection.from_dict(json.loads(text))


def missions_document(logs: Sequence[MissionLog], cfg: RunConfig) -> str:
    recon = {r.uav_index: r for r in reconcile_energy(logs, cfg.energy_model())}
    out = []
    for log in logs:
        d = log.to_dict()
        r = recon[log.uav_index]
        d["reconciliation"] = {"estimated": r.estimated, "corrected": r.corrected,
                               "actual": r.actual, "error": r.error}
        out.append(d)
    return _dumps({"missions": out})


def read_missions(text: str) -> list[MissionLog]:
    return [MissionLog.from_dict(d) for d in json.loads(text)["missions"]]


def report_documents(rep: RunReport, fmt: str) -> dict[str, str]:
    return {
        f"table.{fmt}": format_table(rep, fmt),
        f"series.{fmt}": format_trip_series(rep, fmt),
        FILES["costtrace"]: format_cost_trace(rep.cost_trace),
        FILES["summary"]: _dumps(rep.summary()),
    }


def run_documents(result: RunResult) -> dict[str, str]:
    cfg = result.config
    docs = {
        FILES["plans"]: plans_document(result.plan_sets, cfg),
        FILES["selection"]: selection_document(result.selection, result.plan_sets, cfg),
        FILES["missions"]: missions_document(result.logs, cfg),
    }
    docs.update(report_documents(result.report, cfg.fmt))
    return docs


def write_documents(docs: dict[str, str], out_dir: Path) -> list[Path]:
    """Write all documents, or none if the directory cannot be prepared."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in docs.items():
        path = out_dir / name
        path.write_text(text)
        written.append(path)
    return written


def read_stage(out_dir: Path, key: str, optional: bool = False) -> Optional[str]:
    path = Path(out_dir) / FILES[key]
    if not path.is_file():
        if optional:
            return None
        raise FileNotFoundError(f"{path} not found; run the earlier stage first")
    return path.read_text()
