"""Command-line entry point: validate, ingest, assess, report, serve, demo.

Exit codes: 0 success, 1 operational failure (unreadable files, broken
store), 2 validation failure (model violations). All output goes to the
standard streams; nothing prompts.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional

import click

from . import config as config_mod
from .demo import format_alert_lines, format_snapshot_table, run_demo
from .engine import AssessmentRunning, Engine
from .ingestion import IngestError, PARSERS
from .model import ModelError, QualityModel, parse_model, validate_model
from .records import RecordError, format_instant, parse_instant
from .store import Store, StoreError, Window

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2


def _load_config(config_path: Optional[str]):
    if config_path:
        return config_mod.load_config(config_path)
    return config_mod.config_from_env()


def _resolve(option_value: Optional[str], config_value, what: str) -> Path:
    if option_value:
        return Path(option_value)
    if config_value:
        return Path(config_value)
    raise click.ClickException(
        f"no {what} given: pass --{what} or point QGAUGE_CONFIG/--config at a config file"
    )


def _read_model(path: Path) -> QualityModel:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"cannot read model file {path}: {exc}", err=True)
        sys.exit(EXIT_FAILURE)
    try:
        return parse_model(text)
    except ModelError as exc:
        click.echo(f"model error: {exc}", err=True)
        sys.exit(EXIT_INVALID)


def _open_store(path: Path) -> Store:
    try:
        return Store(path)
    except StoreError as exc:
        click.echo(f"store error: {exc}", err=True)
        sys.exit(EXIT_FAILURE)


def _parse_window(from_text: Optional[str], to_text: Optional[str]) -> Optional[Window]:
    if not from_text and not to_text:
        return None
    from .store import EPOCH, FAR_FUTURE

    try:
        start = parse_instant(from_text) if from_text else EPOCH
        end = parse_instant(to_text) if to_text else FAR_FUTURE
        return Window(start, end)
    except (RecordError, ValueError) as exc:
        click.echo(f"bad window: {exc}", err=True)
        sys.exit(EXIT_FAILURE)


@click.group()
@click.option("--config", "config_path", envvar=config_mod.ENV_VAR, default=None,
              help="Config file (also via QGAUGE_CONFIG).")
@click.pass_context
def main(ctx, config_path):
    """Quality-model assessment engine for heterogeneous development data."""
    ctx.ensure_object(dict)
    try:
        ctx.obj["config"] = _load_config(config_path)
    except config_mod.ConfigError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_FAILURE)


@main.command()
@click.argument("model_path", required=False)
@click.option("--model", "-m", "model_option", default=None, help="Model file to validate.")
@click.pass_context
def validate(ctx, model_path, model_option):
    """Check a model file against every model invariant."""
    cfg = ctx.obj.get("config")
    path = _resolve(model_path or model_option, cfg.model_path if cfg else None, "model")
    model = _read_model(path)
    violations = validate_model(model)
    if not violations:
        click.echo("model valid")
        sys.exit(EXIT_OK)
    for violation in violations:
        click.echo(str(violation))
    sys.exit(EXIT_INVALID)


@main.command()
@click.argument("format_name", metavar="FORMAT", type=click.Choice(sorted(PARSERS)))
@click.argument("input_path")
@click.option("--store", "-s", "store_option", default=None, help="Store directory.")
@click.option("--pattern", default=None, help="Log line regex (logs format only).")
@click.option("--timestamp-format", default=None, help="Log timestamp format (logs format only).")
@click.pass_context
def ingest(ctx, format_name, input_path, store_option, pattern, timestamp_format):
    """Parse one input file and append its records to the store."""
    cfg = ctx.obj.get("config")
    store_path = _resolve(store_option, cfg.store_path if cfg else None, "store")
    try:
        text = Path(input_path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        click.echo(f"cannot read {input_path}: {exc}", err=True)
        sys.exit(EXIT_FAILURE)
    store = _open_store(store_path)
    kwargs = {}
    if format_name == "logs" and (pattern or timestamp_format):
        from .ingestion import DEFAULT_LOG_PATTERN, LogPattern

        kwargs["pattern"] = LogPattern(
            pattern=pattern or DEFAULT_LOG_PATTERN,
            timestamp_format=timestamp_format or "iso",
        )
    parser = PARSERS[format_name]
    try:
        result = parser(text, project=store.project, **kwargs)
    except IngestError as exc:
        click.echo(f"cannot parse {input_path}: {exc}", err=True)
        sys.exit(EXIT_FAILURE)
    appended = store.append(result.records)
    click.echo(f"inserted {appended.inserted}, duplicates {appended.duplicates}")
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)
    sys.exit(EXIT_OK)


@main.command()
@click.option("--model", "-m", "model_option", default=None, help="Model file.")
@click.option("--store", "-s", "store_option", default=None, help="Store directory.")
@click.option("--window-days", type=int, default=None, help="Trailing window length.")
@click.option("--from", "from_text", default=None, help="Explicit window start (ISO-8601).")
@click.option("--to", "to_text", default=None, help="Explicit window end (ISO-8601).")
@click.option("--json", "as_json", is_flag=True, help="Print the snapshot as JSON.")
@click.pass_context
def assess(ctx, model_option, store_option, window_days, from_text, to_text, as_json):
    """Run one assessment over the window and print every element's value and color."""
    cfg = ctx.obj.get("config")
    model = _read_model(_resolve(model_option, cfg.model_path if cfg else None, "model"))
    violations = validate_model(model)
    if violations:
        for violation in violations:
            click.echo(str(violation), err=True)
        sys.exit(EXIT_INVALID)
    store = _open_store(_resolve(store_option, cfg.store_path if cfg else None, "store"))
    engine = Engine(model, store)
    window = _parse_window(from_text, to_text)
    if window_days is None and cfg and cfg.window_days:
        window_days = cfg.window_days
    try:
        outcome = engine.assess(window=window, window_days=window_days)
    except AssessmentRunning as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_FAILURE)
    if as_json:
        click.echo(json.dumps(outcome.snapshot.to_doc(), indent=2))
    else:
        click.echo(format_snapshot_table(outcome.snapshot, model))
        for line in format_alert_lines(outcome.alerts):
            click.echo(line)
    sys.exit(EXIT_OK)


@main.command()
@click.option("--model", "-m", "model_option", default=None, help="Model file (for element names).")
@click.option("--store", "-s", "store_option", default=None, help="Store directory.")
@click.option("--element", default=None, help="Print this element's history instead.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def report(ctx, model_option, store_option, element, as_json):
    """Print the latest snapshot (or one element's history) with actual raw values."""
    cfg = ctx.obj.get("config")
    store = _open_store(_resolve(store_option, cfg.store_path if cfg else None, "store"))

    if element:
        series = store.element_series(element)
        if as_json:
            points = [
                {"evaluated_at": format_instant(at), "value": value, "color": color.value}
                for at, value, color in series
            ]
            click.echo(json.dumps({"element": element, "points": points}, indent=2))
        else:
            click.echo(f"{'evaluated_at':<26} {'value':>8}  color")
            for at, value, color in series:
                value_text = "no-data" if value is None else f"{value:.4f}"
                click.echo(f"{format_instant(at):<26} {value_text:>8}  {color.value}")
        sys.exit(EXIT_OK)

    snapshot = store.latest_snapshot()
    if snapshot is None:
        model_path = model_option or (cfg.model_path if cfg else None)
        if model_path:
            model = _read_model(Path(model_path))
            click.echo(f"{'element':<38} {'stratum':<8} {'value':>8}  color")
            for element_id in model.element_ids():
                stratum = model.stratum_of(element_id)
                click.echo(f"{element_id:<38} {stratum.value:<8} {'no-data':>8}  no-data")
        else:
            click.echo("store has no snapshots yet")
        sys.exit(EXIT_OK)

    if as_json:
        click.echo(json.dumps(snapshot.to_doc(), indent=2))
        sys.exit(EXIT_OK)
    click.echo(f"snapshot {snapshot.snapshot_id} evaluated {format_instant(snapshot.evaluated_at)}")
    click.echo(f"window {format_instant(snapshot.window.start)} .. {format_instant(snapshot.window.end)}")
    click.echo(f"{'element':<38} {'stratum':<8} {'value':>8}  color  actuals")
    for element_id, entry in snapshot.entries.items():
        value_text = "no-data" if entry.value is None else f"{entry.value:.4f}"
        actuals = ", ".join(f"{k}={v:g}" for k, v in entry.raw_summary.items())
        click.echo(
            f"{element_id:<38} {entry.stratum.value:<8} {value_text:>8}  {entry.color.value:<6} {actuals}"
        )
    sys.exit(EXIT_OK)


@main.command()
@click.option("--model", "-m", "model_option", default=None, help="Model file.")
@click.option("--store", "-s", "store_option", default=None, help="Store directory.")
@click.option("--host", default=None, help="Bind host.")
@click.option("--port", type=int, default=None, help="Bind port.")
@click.pass_context
def serve(ctx, model_option, store_option, host, port):
    """Run the HTTP service (blocking) with the optional assessment scheduler."""
    from .api import serve as serve_api

    cfg = ctx.obj.get("config")
    if cfg is None:
        model_path = _resolve(model_option, None, "model")
        store_path = _resolve(store_option, None, "store")
        cfg = config_mod.EngineConfig(model_path=model_path, store_path=store_path)
    if model_option:
        cfg.model_path = Path(model_option)
    if store_option:
        cfg.store_path = Path(store_option)
    if host:
        cfg.host = host
    if port:
        cfg.port = port
    try:
        model = _read_model(cfg.model_path)
        violations = validate_model(model)
        if violations:
            for violation in violations:
                click.echo(str(violation), err=True)
            sys.exit(EXIT_INVALID)
        serve_api(cfg)
    except StoreError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_FAILURE)
    sys.exit(EXIT_OK)


@main.command()
@click.argument("target_dir")
@click.pass_context
def demo(ctx, target_dir):
    """Run the end-to-end walkthrough into TARGET_DIR: ingest fixtures,
    assess two windows, raise the maintainability alert, drill down."""
    target = Path(target_dir)
    try:
        target.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        click.echo(f"cannot create {target}: {exc}", err=True)
        sys.exit(EXIT_FAILURE)
    run_demo(target, echo=click.echo)
    click.echo("")
    click.echo(f"demo store written to {target / 'store'}; serve it with:")
    click.echo(f"  qgauge --config {target / 'config.json'} serve")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
