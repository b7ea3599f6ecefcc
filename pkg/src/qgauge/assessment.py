"""Bottom-up assessment over a time window: metrics, then factors, then
aspects, each element colored against its thresholds.

Missing data propagates by sibling-weight renormalization so partially
connected sources still yield meaningful parents; a parent with only no-data
children is itself no-data. What-if runs reuse the exact evaluation under a
modified model without persisting anything.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Callable, Mapping, Optional, Sequence

from . import metrics as metrics_mod
from .model import (
    ModelError,
    QualityModel,
    Stratum,
    Thresholds,
    UtilityFunction,
    classify_color,
    validate_model,
    with_replaced_edges,
)
from .records import UTC
from .store import ElementResult, Snapshot, Store, Window, new_snapshot_id

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOL = 1e-6
MIN_SCHEDULE_PERIOD_SEC = 60.0


class AssessmentError(RuntimeError):
    """The assessment could not run (invalid model, bad request)."""


@dataclass(frozen=True)
class AssessmentRequest:
    """Either an explicit window or a trailing 'last N days ending now'."""

    window: Optional[Window] = None
    window_days: Optional[int] = None
    trigger: str = "manual"

    def resolve(self, model: QualityModel, now: datetime) -> Window:
        if self.window is not None:
            return self.window
        days = self.window_days if self.window_days is not None else model.default_window_days
        if days <= 0:
            raise AssessmentError("window_days must be positive")
        return Window(now - timedelta(days=days), now)


def aggregate_children(children: Sequence[tuple[Optional[float], float]]) -> Optional[float]:
    """Weighted aggregate of (value, weight) pairs with no-data renormalization.

    Weights must sum to 1 (±1e-6) over all children. Children without data are
    dropped and the remaining weights renormalized; all-no-data aggregates to
    no-data. The result is clamped to [0, 1] to absorb float dust.
    """
    total_weight = sum(w for _, w in children)
    if children and abs(total_weight - 1.0) > WEIGHT_SUM_TOL:
        raise ValueError(f"child weights sum {total_weight:g}, expected 1")
    data = [(v, w) for v, w in children if v is not None]
    if not data:
        return None
    bearing = sum(w for _, w in data)
    value = sum((w / bearing) * v for v, w in data)
    return 0.0 if value < 0.0 else 1.0 if value > 1.0 else value


def aggregate_dag(
    model: QualityModel, metric_values: Mapping[str, Optional[float]]
) -> dict[str, Optional[float]]:
    """Roll metric values up through factors and aspects, strata-wise.

    Multi-parent children contribute the same value to every parent; each
    metric is read exactly once from metric_values.
    """
    values: dict[str, Optional[float]] = dict(metric_values)
    for group in (model.factors, model.aspects):
        for element in group:
            children = model.children_of(element.id)
            if not children:
                values[element.id] = None
                continue
            values[element.id] = aggregate_children([(values[cid], w) for cid, w in children])
    return values


def evaluate_elements(model: QualityModel, store: Store, window: Window) -> dict[str, ElementResult]:
    """Value, color, raw summary, and offenders for every model element."""
    fetch_cache: dict[tuple, list] = {}

    def fetch(defn) -> list:
        effective = window
        if defn.window_days is not None:
            effective = Window(window.end - timedelta(days=defn.window_days), window.end)
        query_window = metrics_mod.fetch_window(defn, effective)
        key = (defn.source_kind, query_window.start, query_window.end)
        if key not in fetch_cache:
            fetch_cache[key] = store.query_raw(defn.source_kind, query_window)
        return fetch_cache[key]

    entries: dict[str, ElementResult] = {}
    for defn in model.metrics:
        effective = window
        if defn.window_days is not None:
            effective = Window(window.end - timedelta(days=defn.window_days), window.end)
        value = metrics_mod.compute_assessed_metric(defn, fetch(defn), effective)
        entries[defn.id] = ElementResult(
            element_id=defn.id,
            stratum=Stratum.METRIC,
            value=value.value,
            color=classify_color(value.value, defn.thresholds),
            raw_summary={**value.raw_summary, "n_entities": value.n_entities},
            offenders=value.offenders,
        )

    rolled = aggregate_dag(model, {mid: entries[mid].value for mid in entries})
    for group, stratum in ((model.factors, Stratum.FACTOR), (model.aspects, Stratum.ASPECT)):
        for element in group:
            children = model.children_of(element.id)
            value = rolled[element.id]
            bearing = sum(1 for cid, _ in children if rolled[cid] is not None)
            entries[element.id] = ElementResult(
                element_id=element.id,
                stratum=stratum,
                value=value,
                color=classify_color(value, element.thresholds),
                raw_summary={"children": len(children), "children_with_data": bearing},
            )
    return entries


def run_assessment(
    model: QualityModel,
    store: Store,
    request: AssessmentRequest,
    now: Optional[datetime] = None,
) -> Snapshot:
    """Evaluate every element over the request window and persist the snapshot."""
    violations = validate_model(model)
    if violations:
        raise AssessmentError(
            "model invalid: " + "; ".join(str(v) for v in violations[:5])
        )
    now = now or datetime.now(UTC)
    window = request.resolve(model, now)
    snapshot = Snapshot(
        snapshot_id=new_snapshot_id(),
        evaluated_at=now,
        window=window,
        entries=evaluate_elements(model, store, window),
    )
    store.save_snapshot(snapshot)
    logger.info(
        "assessment %s over %s..%s (%s trigger)",
        snapshot.snapshot_id[:8], window.start.date(), window.end.date(), request.trigger,
    )
    return snapshot


# --- what-if ---------------------------------------------------------------------


@dataclass(frozen=True)
class WhatIfDelta:
    """Transient model replacements keyed by element id."""

    weights: Mapping[str, Mapping[str, float]] = field(default_factory=dict)
    utilities: Mapping[str, UtilityFunction] = field(default_factory=dict)
    thresholds: Mapping[str, Thresholds] = field(default_factory=dict)
    params: Mapping[str, Mapping[str, object]] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not (self.weights or self.utilities or self.thresholds or self.params)

    @staticmethod
    def from_document(doc: Mapping) -> "WhatIfDelta":
        from .model import _thresholds_from_doc, _utility_from_doc

        if not isinstance(doc, Mapping):
            raise ModelError("what-if delta must be a JSON object")
        weights = {
            parent: {child: float(w) for child, w in mapping.items()}
            for parent, mapping in doc.get("weights", {}).items()
        }
        utilities = {
            mid: _utility_from_doc(u, mid) for mid, u in doc.get("utilities", {}).items()
        }
        thresholds = {
            eid: _thresholds_from_doc(t, eid) for eid, t in doc.get("thresholds", {}).items()
        }
        params = {mid: dict(p) for mid, p in doc.get("params", {}).items()}
        return WhatIfDelta(
            weights=weights, utilities=utilities, thresholds=thresholds, params=params
        )


def apply_delta(model: QualityModel, delta: WhatIfDelta) -> QualityModel:
    """Modified copy of the model; raises ModelError on unknown element ids."""
    from dataclasses import replace

    modified = model
    for parent_id, weights in delta.weights.items():
        modified = with_replaced_edges(modified, parent_id, weights)

    known = set(model.element_ids())
    for mapping, what in (
        (delta.utilities, "utility"),
        (delta.thresholds, "thresholds"),
        (delta.params, "params"),
    ):
        unknown = set(mapping) - known
        if unknown:
            raise ModelError(f"what-if {what} for unknown element(s) {sorted(unknown)}")

    if delta.utilities or delta.params:
        new_metrics = []
        for m in modified.metrics:
            if m.id in delta.utilities:
                m = replace(m, utility=delta.utilities[m.id])
            if m.id in delta.params:
                m = replace(m, params={**dict(m.params), **delta.params[m.id]})
            new_metrics.append(m)
        modified = replace(modified, metrics=tuple(new_metrics))

    if delta.thresholds:
        def swap(elements):
            return tuple(
                replace(e, thresholds=delta.thresholds[e.id]) if e.id in delta.thresholds else e
                for e in elements
            )

        modified = replace(
            modified,
            aspects=swap(modified.aspects),
            factors=swap(modified.factors),
            metrics=swap(modified.metrics),
        )
    return modified


def what_if(
    model: QualityModel,
    store: Store,
    request: AssessmentRequest,
    delta: WhatIfDelta,
    now: Optional[datetime] = None,
) -> Snapshot:
    """Re-assess under a modified model without touching the store."""
    modified = apply_delta(model, delta)
    violations = validate_model(modified)
    if violations:
        raise ModelError(
            "what-if produces an invalid model: " + "; ".join(str(v) for v in violations)
        )
    now = now or datetime.now(UTC)
    window = request.resolve(modified, now)
    return Snapshot(
        snapshot_id=new_snapshot_id(),
        evaluated_at=now,
        window=window,
        entries=evaluate_elements(modified, store, window),
        transient=True,
    )


# --- scheduling --------------------------------------------------------------------


class AssessmentScheduler:
    """Recurring trailing-window assessments; overlapping runs are skipped.

    tick() is the unit of work so tests can drive a simulated clock; start()
    runs ticks from a daemon thread on the real clock.
    """

    def __init__(
        self,
        run_once: Callable[[], object],
        period_sec: float,
        clock: Callable[[], float] = time.monotonic,
    ):
        if period_sec < MIN_SCHEDULE_PERIOD_SEC:
            raise ValueError(f"period must be at least {MIN_SCHEDULE_PERIOD_SEC:.0f} s")
        self._run_once = run_once
        self.period_sec = period_sec
        self._clock = clock
        self._next_due = clock() + period_sec
        self._running = threading.Lock()
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self.runs = 0
        self.skips = 0

    def tick(self, now: Optional[float] = None) -> bool:
        """Run the assessment if due; returns True when a run happened."""
        now = self._clock() if now is None else now
        if now < self._next_due:
            return False
        self._next_due += self.period_sec
        if not self._running.acquire(blocking=False):
            self.skips += 1
            logger.warning("scheduled assessment skipped: previous run still active")
            return False
        try:
            self._run_once()
            self.runs += 1
            return True
        finally:
            self._running.release()

    def start(self) -> "AssessmentScheduler":
        if self._thread is not None:
            raise RuntimeError("scheduler already started")

        def loop():
            while not self._stop.wait(timeout=min(self.period_sec, 1.0)):
                try:
                    self.tick()
                except Exception:
                    logger.exception("scheduled assessment failed")

        self._thread = threading.Thread(target=loop, name="qgauge-scheduler", daemon=True)
        self._thread.start()
        return self

    def cancel(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
