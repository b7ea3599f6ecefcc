"""The engine object shared by the CLI and the HTTP service.

Owns the current model (swappable atomically), the store handle, the
single-flight assessment lock, and the ingestion registry. Alert detection
runs inside every persisted assessment, comparing against the previous
snapshot.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional

from . import alerts as alerts_mod
from . import assessment as assessment_mod
from . import ingestion
from .alerts import Alert, DrilldownNode
from .model import QualityModel, Violation, model_to_document, validate_model
from .store import Snapshot, Store, Window

logger = logging.getLogger(__name__)


class AssessmentRunning(RuntimeError):
    """An assessment is already in flight; re-trigger later."""


@dataclass(frozen=True)
class IngestOutcome:
    inserted: int
    duplicates: int
    warnings: list[str]


@dataclass(frozen=True)
class AssessOutcome:
    snapshot: Snapshot
    alerts: list[Alert]


class Engine:
    def __init__(self, model: QualityModel, store: Store, model_path: Optional[Path] = None):
        violations = validate_model(model)
        if violations:
            raise ValueError(
                "model invalid: " + "; ".join(str(v) for v in violations)
            )
        self._model = model
        self._model_lock = threading.RLock()
        self._assess_flight = threading.Lock()
        self.store = store
        self.model_path = Path(model_path) if model_path else None

    @property
    def model(self) -> QualityModel:
        with self._model_lock:
            return self._model

    def replace_model(self, new_model: QualityModel) -> list[Violation]:
        """Swap the model atomically; returns violations (and keeps the old model) if invalid."""
        violations = validate_model(new_model)
        if violations:
            return violations
        with self._model_lock:
            self._model = new_model
            if self.model_path is not None:
                self._persist_model(new_model)
        logger.info("model replaced (%d metrics)", len(new_model.metrics))
        return []

    def _persist_model(self, model: QualityModel) -> None:
        payload = json.dumps(model_to_document(model), indent=2) + "\n"
        fd, tmp_name = tempfile.mkstemp(
            dir=str(self.model_path.parent), prefix=".model-", suffix=".json"
        )
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(payload)
            os.replace(tmp_name, self.model_path)
        except OSError:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise

    # --- ingestion -------------------------------------------------------------

    def ingest(self, format_name: str, text: str, **kwargs) -> IngestOutcome:
        result = ingestion.parse_input(format_name, text, project=self.store.project, **kwargs)
        appended = self.store.append(result.records)
        return IngestOutcome(
            inserted=appended.inserted,
            duplicates=appended.duplicates,
            warnings=result.warnings,
        )

    # --- assessment --------------------------------------------------------------

    def assess(
        self,
        window: Optional[Window] = None,
        window_days: Optional[int] = None,
        now: Optional[datetime] = None,
        trigger: str = "manual",
    ) -> AssessOutcome:
        if not self._assess_flight.acquire(blocking=False):
            raise AssessmentRunning("an assessment is already running")
        try:
            request = assessment_mod.AssessmentRequest(
                window=window, window_days=window_days, trigger=trigger
            )
            previous = self.store.latest_snapshot()
            snapshot = assessment_mod.run_assessment(self.model, self.store, request, now=now)
            alerts = alerts_mod.detect_alerts(previous, snapshot, self.model)
            alerts_mod.persist_alerts(self.store, alerts)
            return AssessOutcome(snapshot=snapshot, alerts=alerts)
        finally:
            self._assess_flight.release()

    def what_if(
        self,
        delta: assessment_mod.WhatIfDelta,
        window: Optional[Window] = None,
        window_days: Optional[int] = None,
        now: Optional[datetime] = None,
    ) -> Snapshot:
        request = assessment_mod.AssessmentRequest(window=window, window_days=window_days)
        return assessment_mod.what_if(self.model, self.store, request, delta, now=now)

    # --- reads ---------------------------------------------------------------------

    def latest_snapshot(self) -> Optional[Snapshot]:
        return self.store.latest_snapshot()

    def drilldown(self, element_id: str, snapshot_id: Optional[str] = None) -> DrilldownNode:
        snapshot = (
            self.store.get_snapshot(snapshot_id) if snapshot_id else self.store.latest_snapshot()
        )
        if snapshot is None:
            raise LookupError("no snapshot available yet")
        return alerts_mod.drilldown(snapshot, element_id, self.model)

    def history(self, element_id: str, window: Optional[Window] = None):
        return self.store.element_series(element_id, window)

    def alerts(self, since: Optional[datetime] = None) -> list[Alert]:
        return alerts_mod.load_alerts(self.store, since)

    def acknowledge(self, alert_id: str) -> bool:
        return alerts_mod.acknowledge_alert(self.store, alert_id)
