"""Self-contained end-to-end walkthrough on shipped fixture data.

Two seven-day windows of heterogeneous records: the first assesses all green,
the second degrades the blocking-code chain enough to flip maintainability
from green to orange, raising an alert whose drill-down points at the
offending files. Everything is deterministic, so re-running reproduces the
same values.
"""

from __future__ import annotations

import json
import shutil
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from .alerts import Alert, DrilldownNode, drilldown
from .engine import Engine
from .model import Color, QualityModel, Stratum, parse_model
from .records import parse_instant
from .store import Snapshot, Store, Window

DEMO_WINDOW_1 = Window(parse_instant("2018-01-01T00:00:00Z"), parse_instant("2018-01-08T00:00:00Z"))
DEMO_WINDOW_2 = Window(parse_instant("2018-01-08T00:00:00Z"), parse_instant("2018-01-15T00:00:00Z"))

FIXTURE_FILES = (
    "model.json",
    "model_linear_cc.json",
    "static_analysis_w1.json",
    "static_analysis_w2.json",
    "commits.log",
    "junit_w1.xml",
    "junit_w2.xml",
    "issues.csv",
    "app.log",
    "events.jsonl",
)

INGEST_PLAN = (
    ("static", "static_analysis_w1.json"),
    ("static", "static_analysis_w2.json"),
    ("commits", "commits.log"),
    ("testxml", "junit_w1.xml"),
    ("testxml", "junit_w2.xml"),
    ("issues", "issues.csv"),
    ("logs", "app.log"),
    ("records", "events.jsonl"),
)


def _fixture_root():
    return resources.files("qgauge").joinpath("fixtures/demo")


def fixture_text(name: str) -> str:
    return _fixture_root().joinpath(name).read_text(encoding="utf-8")


def copy_fixtures(target: Path) -> Path:
    data_dir = target / "data"
    data_dir.mkdir(parents=True, exist_ok=True)
    for name in FIXTURE_FILES:
        with resources.as_file(_fixture_root().joinpath(name)) as src:
            shutil.copy(src, data_dir / name)
    return data_dir


@dataclass
class DemoOutcome:
    engine: Engine
    snapshot_w1: Snapshot
    snapshot_w2: Snapshot
    alerts_w1: list[Alert]
    alerts_w2: list[Alert]


def _format_value(value: Optional[float]) -> str:
    return "no-data" if value is None else f"{value:.4f}"


def format_snapshot_table(snapshot: Snapshot, model: QualityModel) -> str:
    lines = [f"{'element':<38} {'stratum':<8} {'value':>8}  color"]
    order = [a.id for a in model.aspects] + [f.id for f in model.factors] + [
        m.id for m in model.metrics
    ]
    for element_id in order:
        entry = snapshot.entries[element_id]
        lines.append(
            f"{element_id:<38} {entry.stratum.value:<8} {_format_value(entry.value):>8}  {entry.color.value}"
        )
    return "\n".join(lines)


def format_alert_lines(alerts: list[Alert]) -> list[str]:
    return [
        f"ALERT {a.element_id} {a.previous_color.value}→{a.new_color.value} "
        f"({a.threshold_crossed} threshold crossed, value {_format_value(a.value)})"
        for a in alerts
    ]


def format_drilldown(node: DrilldownNode, indent: int = 0) -> list[str]:
    pad = "  " * indent
    weight = "" if node.weight_from_parent is None else f" (weight {node.weight_from_parent:.2f})"
    lines = [f"{pad}{node.element_id} {_format_value(node.value)} {node.color.value}{weight}"]
    if node.stratum is Stratum.METRIC:
        for offender in node.offenders:
            lines.append(f"{pad}  offender {offender.entity} (raw {offender.base_value:g})")
    for child in node.children:
        lines.extend(format_drilldown(child, indent + 1))
    return lines


def run_demo(target_dir: Path, echo: Callable[[str], None] = print) -> DemoOutcome:
    """Ingest the fixtures, assess the two windows, narrate the alert."""
    target = Path(target_dir)
    data_dir = copy_fixtures(target)
    model = parse_model((data_dir / "model.json").read_text(encoding="utf-8"))
    store = Store(target / "store", project="demo")
    engine = Engine(model, store, model_path=data_dir / "model.json")

    config_path = target / "config.json"
    if not config_path.exists():
        config_path.write_text(
            json.dumps(
                {
                    "model": "data/model.json",
                    "store": "store",
                    "window_days": 7,
                    "port": 8400,
                    "project": "demo",
                },
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )

    echo("Ingesting demo fixtures:")
    for format_name, file_name in INGEST_PLAN:
        outcome = engine.ingest(format_name, (data_dir / file_name).read_text(encoding="utf-8"))
        note = f" ({len(outcome.warnings)} warning(s))" if outcome.warnings else ""
        echo(f"  {file_name:<28} inserted {outcome.inserted}, duplicates {outcome.duplicates}{note}")
    echo(f"  store now holds {store.raw_count()} raw records")

    echo("")
    echo(f"Assessment window 1: {DEMO_WINDOW_1.start.date()} .. {DEMO_WINDOW_1.end.date()}")
    outcome1 = engine.assess(window=DEMO_WINDOW_1)
    echo(format_snapshot_table(outcome1.snapshot, model))
    if outcome1.alerts:
        for line in format_alert_lines(outcome1.alerts):
            echo(line)
    else:
        echo("no alerts: every traffic light is green")

    echo("")
    echo(f"Assessment window 2: {DEMO_WINDOW_2.start.date()} .. {DEMO_WINDOW_2.end.date()}")
    outcome2 = engine.assess(window=DEMO_WINDOW_2)
    echo(format_snapshot_table(outcome2.snapshot, model))
    for line in format_alert_lines(outcome2.alerts):
        echo(line)

    echo("")
    echo("Drill-down maintainability (worst child first):")
    tree = drilldown(outcome2.snapshot, "maintainability", model)
    for line in format_drilldown(tree):
        echo(line)

    maint = outcome2.snapshot.entries["maintainability"]
    if maint.color is Color.ORANGE:
        echo("")
        echo(
            "maintainability moved from green to orange; the drill-down singles out "
            "blocking_code and the files behind it."
        )
    return DemoOutcome(
        engine=engine,
        snapshot_w1=outcome1.snapshot,
        snapshot_w2=outcome2.snapshot,
        alerts_w1=outcome1.alerts,
        alerts_w2=outcome2.alerts,
    )
