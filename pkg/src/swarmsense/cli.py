"""Command line entry point: ``swarmsense {plan,optimize,simulate,report,run}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import pipeline
from .config import load_config
from .errors import ConfigError, SwarmSenseError

log = logging.getLogger("swarmsense")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4
EXIT_IO = 5


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="paper.cfg",
                        help="run configuration (default: bundled paper.cfg)")
    common.add_argument("--seed", type=int, help="master seed; overrides epos.seed")
    common.add_argument("--beta", type=float, help="overrides epos.beta")
    common.add_argument("--strategy", choices=("epos", "greedy"), help="overrides epos.strategy")
    common.add_argument("--out-dir", type=Path, help="overrides output.dir")
    common.add_argument("--format", choices=("csv", "json"), dest="fmt",
                        help="table/series format; overrides output.format")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="swarmsense",
        description="Plan, coordinate and simulate UAV swarm sensing missions.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("plan", "generate candidate plan sets"),
        ("optimize", "select one plan per agent (EPOS or greedy)"),
        ("simulate", "fly the selected plans"),
        ("report", "write the per-drone table, trip series and summary"),
        ("run", "full pipeline"),
    ):
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def _resolve(args):
    cfg = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.beta is not None:
        changes["beta"] = args.beta
    if args.strategy is not None:
        changes["strategy"] = args.strategy
    if args.out_dir is not None:
        changes["out_dir"] = args.out_dir
    if args.fmt is not None:
        changes["fmt"] = args.fmt
    try:
        cfg = cfg.override(**changes)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    cfg.check_files()
    cfg.energy_model()
    return cfg


def _execute(command: str, cfg) -> dict[str, str]:
    out = cfg.out_dir
    if command == "run":
        return pipeline.run_documents(pipeline.run(cfg))
    if command == "plan":
        return {pipeline.FILES["plans"]: pipeline.plans_document(pipeline.plan(cfg), cfg)}
    plan_sets = pipeline.read_plans(pipeline.read_stage(out, "plans"))
    if command == "optimize":
        sel = pipeline.optimize(cfg, plan_sets)
        return {pipeline.FILES["selection"]: pipeline.selection_document(sel, plan_sets, cfg),
                pipeline.FILES["costtrace"]: pipeline.format_cost_trace(sel.cost_trace)}
    sel = pipeline.read_selection(pipeline.read_stage(out, "selection"))
    if command == "simulate":
        logs = pipeline.simulate(cfg, plan_sets, sel)
        return {pipeline.FILES["missions"]: pipeline.missions_document(logs, cfg)}
    logs = pipeline.read_missions(pipeline.read_stage(out, "missions"))
    return pipeline.report_documents(pipeline.report(cfg, sel, logs), cfg.fmt)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _resolve(args)
        docs = _execute(args.command, cfg)
        written = pipeline.write_documents(docs, cfg.out_dir)
    except ConfigError as exc:
        print(f"swarmsense: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"swarmsense: missing stage input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SwarmSenseError, ValueError) as exc:
        print(f"swarmsense: run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"swarmsense: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
