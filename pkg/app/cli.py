"""
Command-line entry point.

    python -m app.cli simulate --config configs/default.conf --out results/run1
    python -m app.cli sweep --config configs/default.conf --param tpm.c_pi --values 0,0.6,1 --out results/cpi
"""
import argparse
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

from app.harness.config_file import ConfigError, apply_overrides, load_config, parse_value
from app.harness.experiment import run_experiment, sweep
from app.pipeline.graph import ExperimentError
from app.schemas import SimConfig
from app.settings import configure_logging

logger = logging.getLogger(__name__)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, required=True, help="flat key = value config file")
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="extra config override, repeatable")
    parser.add_argument("--store", action="store_true", help="record the result in the experiment catalog")
    parser.add_argument("--log-level", default=None, help="overrides DUALTRACK_LOG_LEVEL")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="app.cli",
        description="CKM-assisted dual-domain vehicle tracking simulator.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="run one configuration")
    _add_common(simulate)
    simulate.add_argument("--runs", type=int, default=None, help="Monte Carlo runs (mc.runs)")
    simulate.add_argument("--seed", type=int, default=None, help="master seed (mc.seed)")
    simulate.add_argument("--scheme", choices=("proposed", "baseline", "both"), default=None)
    simulate.add_argument("--bf-mode", choices=("none", "equal", "optimized"), default=None,
                          help="power allocation mode (beamforming.mode)")

    sweep_cmd = commands.add_parser("sweep", help="run one configuration per value of a numeric key")
    _add_common(sweep_cmd)
    sweep_cmd.add_argument("--param", required=True, help="dotted config key, e.g. tpm.c_pi")
    sweep_cmd.add_argument("--values", required=True, help="comma separated values")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"Malformed override '{item}': expected KEY=VALUE")
        key, raw = item.split("=", 1)
        overrides[key.strip()] = parse_value(raw)
    for key, attr in (("mc.runs", "runs"), ("mc.seed", "seed"), ("scheme", "scheme"), ("beamforming.mode", "bf_mode")):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    return overrides


@contextmanager
def _catalog(enabled: bool) -> Iterator[Optional[Any]]:
    if not enabled:
        yield None
        return
    from app.db import SessionLocal
    from app.init_db import init_db

    init_db()
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def _simulate(config: SimConfig, args: argparse.Namespace) -> None:
    with _catalog(args.store) as db:
        result = run_experiment(config, args.out, db)
    for scheme, summary in result.summary.schemes.items():
        aoa = ", ".join(f"path {k}: {v:.3f} deg" for k, v in summary.mean_aoa_error.items())
        print(f"{scheme}: mean RMSE {summary.mean_rmse:.4f} m, final RMSE {summary.final_rmse:.4f} m; {aoa}")
    print(f"Slots CSV: {result.slots_csv}")
    print(f"Summary JSON: {result.summary_json}")
    if result.experiment_id is not None:
        print(f"Experiment id: {result.experiment_id}")


def _sweep(config: SimConfig, args: argparse.Namespace) -> None:
    values: List[str] = [v.strip() for v in args.values.split(",") if v.strip()]
    with _catalog(args.store) as db:
        result = sweep(config, args.param, values, args.out, db)
    for row in result.rows:
        print(f"{row.param}={row.value:g} {row.scheme}: mean RMSE {row.mean_rmse:.4f} m, "
              f"final RMSE {row.final_rmse:.4f} m")
    print(f"Sweep CSV: {result.sweep_csv}")
    if result.sweep_id is not None:
        print(f"Sweep id: {result.sweep_id}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        config = apply_overrides(load_config(args.config), _overrides(args))
        if args.command == "simulate":
            _simulate(config, args)
        else:
            _sweep(config, args)
    except ConfigError as e:
        logger.error("%s", e)
        print(f"Config error: {e}", file=sys.stderr)
        return 2
    except (ExperimentError, ValueError) as e:
        logger.error("%s", e)
        print(f"Failed: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
