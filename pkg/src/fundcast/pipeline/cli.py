"""Command-line entry point: one subcommand per pipeline stage.

Every command takes --out (artifact root) and optionally --config/--seed,
writes its artifacts plus a run manifest, and is idempotent: re-running
with identical inputs is a no-op. Error classes map to distinct exit codes
so schedulers can tell a missing upstream artifact from a config conflict.
"""

from __future__ import annotations

import datetime
import functools
import sys
from pathlib import Path

import click

from .. import errors
from ..dates import parse_date
from .config import PipelineConfig
from .manifest import output_lock
from . import stages

# click reserves 2 for usage errors; domain errors get their own codes
EXIT_CODES: list[tuple[type, int]] = [
    (errors.MissingUpstreamArtifact, 3),
    (errors.ConfigConflict, 4),
    (errors.InvalidConfig, 5),
    (errors.MalformedMetadata, 5),
    (errors.LockHeld, 6),
    (errors.FundcastError, 7),
]


def _exit_code(exc: Exception) -> int:
    for etype, code in EXIT_CODES:
        if isinstance(exc, etype):
            return code
    return 1


class _Date(click.ParamType):
    name = "date"

    def convert(self, value, param, ctx):
        if isinstance(value, datetime.date):
            return value
        try:
            return parse_date(value)
        except ValueError:
            self.fail(f"{value!r} is not a YYYY-MM-DD date", param, ctx)


DATE = _Date()


def stage_command(fn):
    """Shared options, config loading, locking, and error-to-exit-code mapping."""

    @click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path), help="Artifact root directory.")
    @click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path), default=None, help="Pipeline YAML config.")
    @click.option("--seed", type=int, default=None, help="Override the config seed.")
    @click.option("--force", is_flag=True, help="Overwrite artifacts whose manifest no longer matches.")
    @functools.wraps(fn)
    def wrapper(out_dir: Path, config_path: Path | None, seed: int | None, force: bool, **kwargs):
        try:
            cfg = PipelineConfig.from_yaml(config_path, seed=seed)
            ws = stages.Workspace(root=out_dir, cfg=cfg)
            with output_lock(out_dir):
                ran = fn(ws, force=force, **kwargs)
            click.echo(f"{fn.__name__.removeprefix('cmd_')}: {'done' if ran else 'up to date'}")
        except errors.FundcastError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(_exit_code(exc))

    return wrapper


@click.group()
def main() -> None:
    """Fundamentals pipeline: statements to features to forecasts to allocation."""


@main.command("synth")
@stage_command
def cmd_synth(ws, force):
    """Generate the deterministic synthetic market fixtures."""
    return stages.run_synth(ws, force=force)


@main.command("ingest")
@stage_command
def cmd_ingest(ws, force):
    """Load report fixtures into the document store."""
    return stages.run_ingest(ws, force=force)


@main.command("clean")
@stage_command
def cmd_clean(ws, force):
    """Normalize and map raw reports onto the unified chart of accounts."""
    return stages.run_clean(ws, force=force)


@main.command("features")
@stage_command
def cmd_features(ws, force):
    """Compute the point-in-time feature matrix."""
    return stages.run_features(ws, force=force)


@main.command("dataset")
@stage_command
def cmd_dataset(ws, force):
    """Label, split, and scale one dataset per horizon."""
    return stages.run_dataset(ws, force=force)


@main.command("train")
@stage_command
def cmd_train(ws, force):
    """Train the MLP and baseline models per horizon."""
    return stages.run_train(ws, force=force)


@main.command("evaluate")
@stage_command
def cmd_evaluate(ws, force):
    """Score models and emit the accuracy tables."""
    return stages.run_evaluate(ws, force=force)


@main.command("outlook")
@click.option("--horizon", type=int, required=True, help="Prediction horizon in months.")
@click.option("--model", "kind", default="mlp", show_default=True, help="Model kind for per-stock probabilities.")
@click.option("--from", "date_from", type=DATE, default=None, help="First forecast date (defaults to the split boundary).")
@click.option("--to", "date_to", type=DATE, default=None, help="Last forecast date (defaults to price end).")
@stage_command
def cmd_outlook(ws, force, horizon, kind, date_from, date_to):
    """Aggregate per-stock probabilities into the market forecast series."""
    return stages.run_outlook(ws, horizon, kind=kind, date_from=date_from, date_to=date_to, force=force)


@main.command("backtest")
@click.option("--horizon", type=int, required=True, help="Forecast horizon driving the strategy.")
@click.option("--from", "date_from", type=DATE, default=None)
@click.option("--to", "date_to", type=DATE, default=None)
@stage_command
def cmd_backtest(ws, force, horizon, date_from, date_to):
    """Run the two-scenario allocation strategy and top-k portfolios."""
    return stages.run_backtest_stage(ws, horizon, date_from=date_from, date_to=date_to, force=force)


@main.command("report")
@click.option("--horizon", type=int, default=None, help="Horizon whose backtest feeds the report (default: first configured).")
@stage_command
def cmd_report(ws, force, horizon):
    """Collate the accuracy table and return-series files."""
    h = horizon if horizon is not None else ws.cfg.horizons[0]
    return stages.run_report(ws, h, force=force)


if __name__ == "__main__":
    main()
