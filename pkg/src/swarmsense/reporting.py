"""Mission metrics, per-drone tables and per-trip coverage series."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .energetics import EnergyModel
from .epos import Selection, rss
from .errors import InvalidRequirementsError, InvalidRunError, ScalingError
from .missionsim import MissionLog, cumulative_coverage
from .sensemap import Requirements, SensingMap

TABLE_COLUMNS = (
    "uav_index",
    "battery_start_pct",
    "battery_end_pct",
    "battery_diff_pct",
    "visited_cells",
    "total_time_s",
    "actual_power_w",
    "hover_power_w",
    "maneuver_power_w",
)

FORMATS = ("csv", "json")


def mission_inefficiency(aggregate, requirements) -> float:
    """Share of required sensing seconds left unmet (oversensing is not credited)."""
    if isinstance(requirements, Requirements):
        requirements = requirements.values
    r = np.asarray(requirements, dtype=float)
    g = np.asarray(aggregate, dtype=float)
    if r.shape != g.shape:
        raise ValueError(f"aggregate shape {g.shape} does not match requirements {r.shape}")
    total = r.sum()
    if not total > 0:
        raise InvalidRequirementsError("requirements sum to zero")
    return float(np.maximum(0.0, r - g).sum() / total)


@dataclass(frozen=True)
class TableRow:
    uav_index: int
    battery_start_pct: float
    battery_end_pct: float
    battery_diff_pct: float
    visited_cells: tuple[int, ...]
    total_time_s: float
    actual_power_w: float
    hover_power_w: float
    maneuver_power_w: float

    def record(self) -> dict:
        d = {c: getattr(self, c) for c in TABLE_COLUMNS}
        d["visited_cells"] = ";".join(str(c) for c in self.visited_cells)
        return d

    @classmethod
    def parse(cls, d: dict) -> "TableRow":
        cells = d["visited_cells"]
        if isinstance(cells, str):
            cells = [c for c in cells.split(";") if c]
        return cls(
            uav_index=int(d["uav_index"]),
            visited_cells=tuple(int(c) for c in cells),
            **{c: float(d[c]) for c in TABLE_COLUMNS if c not in ("uav_index", "visited_cells")},
        )


@dataclass
class RunReport:
    strategy: str
    beta: float
    rows_cols: tuple[int, int]
    rss_mismatch: float
    mission_inefficiency: float
    fleet_energy: float
    fleet_estimated_energy: float
    rows: list[TableRow]
    trip_series: list[np.ndarray]
    target: np.ndarray
    cost_trace: tuple[float, ...] = ()
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "strategy": self.strategy,
            "beta": self.beta,
            "drones": len(self.rows),
            "rss_mismatch": self.rss_mismatch,
            "mission_inefficiency": self.mission_inefficiency,
            "fleet_energy_j": self.fleet_energy,
            "fleet_estimated_energy_j": self.fleet_estimated_energy,
            **self.extra,
        }


def summarize(selection: Selection, logs: Sequence[MissionLog], requirements: Requirements,
              model: EnergyModel, smap: SensingMap, strategy: str = "epos",
              beta: Optional[float] = None) -> RunReport:
    if len(logs) != len(selection.chosen):
        raise ValueError(f"{len(logs)} mission logs for {len(selection.chosen)} selected plans")
    target = requirements.values
    if target.size != smap.N or selection.global_response.size != smap.N:
        raise ValueError("selection, requirements and map disagree on the cell count")
    series = cumulative_coverage(logs, smap)
    final = series[-1]
    try:
        mismatch = rss(final, target)
    except ScalingError as exc:
        raise InvalidRunError("nothing was sensed; mismatch is undefined") from exc
    rows = [
        TableRow(
            uav_index=log.uav_index,
            battery_start_pct=log.battery_start_pct,
            battery_end_pct=log.battery_end_pct,
            battery_diff_pct=log.battery_start_pct - log.battery_end_pct,
            visited_cells=tuple(sorted(log.sensed)),
            total_time_s=log.total_time,
            actual_power_w=log.actual_power,
            hover_power_w=model.hover_power,
            maneuver_power_w=model.maneuver_power,
        )
        for log in sorted(logs, key=lambda l: l.uav_index)
    ]
    return RunReport(
        strategy=strategy,
        beta=float(beta) if beta is not None else float("nan"),
        rows_cols=(smap.rows, smap.cols),
        rss_mismatch=mismatch,
        mission_inefficiency=mission_inefficiency(final, target),
        fleet_energy=float(sum(log.actual_energy for log in logs)),
        fleet_estimated_energy=float(sum(log.estimated_energy for log in logs)),
        rows=rows,
        trip_series=series if logs else [],
        target=np.asarray(target, dtype=float),
        cost_trace=tuple(selection.cost_trace),
    )


# -- serialisation ----------------------------------------------------------

def _check_format(fmt: str) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    return fmt


def format_table(report: RunReport, fmt: str = "csv") -> str:
    records = [r.record() for r in report.rows]
    if _check_format(fmt) == "json":
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in rec.items()})
    return buf.getvalue()


def parse_table(text: str, fmt: str = "csv") -> list[TableRow]:
    if _check_format(fmt) == "json":
        return [TableRow.parse(d) for d in json.loads(text)]
    return [TableRow.parse(d) for d in csv.DictReader(io.StringIO(text))]


def format_trip_series(report: RunReport, fmt: str = "csv") -> str:
    rows, cols = report.rows_cols
    grids = [("target", report.target.reshape(rows, cols))]
    grids += [(f"trip_{i + 1}", g.reshape(rows, cols)) for i, g in enumerate(report.trip_series)]
    if _check_format(fmt) == "json":
        doc = {
            "rows": rows,
            "cols": cols,
            "target": report.target.reshape(rows, cols).tolist(),
            "trips": [g.reshape(rows, cols).tolist() for g in report.trip_series],
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["layer", "row", *(f"c{c}" for c in range(cols))])
    for name, grid in grids:
        for r, line in enumerate(grid):
            writer.writerow([name, r, *(repr(float(v)) for v in line)])
    return buf.getvalue()


def parse_trip_series(text: str, fmt: str = "csv") -> tuple[np.ndarray, list[np.ndarray]]:
    """Return ``(target_grid, [trip_grid, ...])`` from emitted series text."""
    if _check_format(fmt) == "json":
        doc = json.loads(text)
        return np.array(doc["target"], dtype=float), [np.array(t, dtype=float) for t in doc["trips"]]
    layers: dict[str, list[list[float]]] = {}
    for rec in csv.DictReader(io.StringIO(text)):
        layers.setdefault(rec["layer"], []).append(
            [float(v) for k, v in rec.items() if k.startswith("c")])
    target = np.array(layers.pop("target"), dtype=float)
    trips = [np.array(layers[f"trip_{i + 1}"], dtype=float) for i in range(len(layers))]
    return target, trips


def format_cost_trace(trace: Sequence[float]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["round", "global_cost"])
    for i, c in enumerate(trace):
        writer.writerow([i + 1, repr(float(c))])
    return buf.getvalue()


def _write(path, text: str) -> Path:
    path = Path(path)
    path.write_text(text)
    return path


def emit_table(report: RunReport, path, fmt: str = "csv") -> Path:
    return _write(path, format_table(report, fmt))


def emit_trip_series(report: RunReport, path, fmt: str = "csv") -> Path:
    return _write(path, format_trip_series(report, fmt))
