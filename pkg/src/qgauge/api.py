"""HTTP interface over the engine: assessments, history, drill-down, alerts,
ingestion, model management, and what-if recomputation.

Read endpoints never mutate the store. Writes funnel through the store's
single writer and the assessment single-flight lock. Every non-2xx response
body is an ApiError: {"status": ..., "code": ..., "detail": ...}.
"""

from __future__ import annotations

import logging
from datetime import datetime
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .alerts import drilldown_to_doc
from .assessment import WhatIfDelta
from .engine import AssessmentRunning, Engine
from .ingestion import IngestError, PARSERS
from .model import ModelError, model_to_document, parse_model_document
from .records import RecordError, format_instant, parse_instant
from .store import Snapshot, Window

logger = logging.getLogger(__name__)


class ApiError(Exception):
    def __init__(self, status: int, code: str, detail: str, violations: Optional[list] = None):
        super().__init__(detail)
        self.status = status
        self.code = code
        self.detail = detail
        self.violations = violations

    def body(self) -> dict:
        doc = {"status": self.status, "code": self.code, "detail": self.detail}
        if self.violations is not None:
            doc["violations"] = self.violations
        return doc


def snapshot_to_doc(snapshot: Snapshot) -> dict:
    return snapshot.to_doc()


def _parse_window_args(from_text: Optional[str], to_text: Optional[str]) -> Optional[Window]:
    if from_text is None and to_text is None:
        return None
    try:
        start = parse_instant(from_text) if from_text else None
        end = parse_instant(to_text) if to_text else None
    except RecordError as exc:
        raise ApiError(400, "bad_window", str(exc)) from None
    from .store import EPOCH, FAR_FUTURE

    try:
        return Window(start or EPOCH, end or FAR_FUTURE)
    except ValueError as exc:
        raise ApiError(400, "bad_window", str(exc)) from None


def _parse_since(text: Optional[str]) -> Optional[datetime]:
    if not text:
        return None
    try:
        return parse_instant(text)
    except RecordError as exc:
        raise ApiError(400, "bad_since", str(exc)) from None


def _page(items: list, limit: Optional[int], offset: int) -> list:
    if offset:
        items = items[offset:]
    if limit is not None:
        items = items[:limit]
    return items


def create_app(engine: Engine, cors_origins: Optional[list[str]] = None) -> FastAPI:
    app = FastAPI(title="qgauge", docs_url=None, redoc_url=None)
    app.state.engine = engine

    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def api_error_handler(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(StarletteHTTPException)
    async def http_error_handler(_request: Request, exc: StarletteHTTPException):
        body = {"status": exc.status_code, "code": "http_error", "detail": str(exc.detail)}
        return JSONResponse(status_code=exc.status_code, content=body)

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(_request: Request, exc: RequestValidationError):
        body = {"status": 400, "code": "bad_request", "detail": str(exc.errors())}
        return JSONResponse(status_code=400, content=body)

    # --- reads -----------------------------------------------------------------

    @app.get("/health")
    def health():
        return {"status": "ok", "project": engine.store.project}

    @app.get("/assessment/current")
    def assessment_current():
        snapshot = engine.latest_snapshot()
        if snapshot is None:
            raise ApiError(404, "no_snapshot", "no assessment has been run yet")
        return snapshot_to_doc(snapshot)

    @app.get("/assessment/history")
    def assessment_history(
        element: str,
        from_: Optional[str] = Query(default=None, alias="from"),
        to: Optional[str] = None,
        limit: Optional[int] = None,
        offset: int = 0,
    ):
        if engine.model.stratum_of(element) is None:
            raise ApiError(404, "unknown_element", f"no element {element!r} in the model")
        window = _parse_window_args(from_, to)
        series = engine.history(element, window)
        points = [
            {"evaluated_at": format_instant(at), "value": value, "color": color.value}
            for at, value, color in series
        ]
        return {"element": element, "points": _page(points, limit, offset)}

    @app.get("/drilldown/{element_id}")
    def drilldown_element(element_id: str, snapshot: Optional[str] = None):
        try:
            node = engine.drilldown(element_id, snapshot_id=snapshot)
        except LookupError:
            raise ApiError(404, "no_snapshot", "no assessment has been run yet") from None
        except KeyError:
            raise ApiError(
                404, "unknown_element", f"no element {element_id!r} in the snapshot"
            ) from None
        return drilldown_to_doc(node)

    @app.get("/alerts")
    def alerts_list(since: Optional[str] = None, limit: Optional[int] = None, offset: int = 0):
        items = engine.alerts(since=_parse_since(since))
        items = sorted(items, key=lambda a: a.evaluated_at, reverse=True)
        return {"alerts": [a.to_doc() for a in _page(items, limit, offset)]}

    @app.get("/model")
    def model_document():
        return model_to_document(engine.model)

    # --- writes -----------------------------------------------------------------

    @app.post("/ingest/{format_name}")
    async def ingest(format_name: str, request: Request):
        if format_name not in PARSERS:
            raise ApiError(404, "unknown_format", f"no ingestion format {format_name!r}")
        body = (await request.body()).decode("utf-8", errors="replace")
        try:
            outcome = engine.ingest(format_name, body)
        except IngestError as exc:
            raise ApiError(400, "unparseable_input", str(exc)) from None
        return {
            "inserted": outcome.inserted,
            "duplicates": outcome.duplicates,
            "warnings": outcome.warnings,
        }

    @app.post("/assess")
    async def assess(request: Request):
        body = await request.body()
        window = None
        window_days = None
        if body.strip():
            import json

            try:
                doc = json.loads(body)
            except json.JSONDecodeError as exc:
                raise ApiError(400, "bad_request", f"bad JSON body: {exc.msg}") from None
            window = _parse_window_args(doc.get("from"), doc.get("to"))
            window_days = doc.get("window_days")
        try:
            outcome = engine.assess(window=window, window_days=window_days, trigger="manual")
        except AssessmentRunning as exc:
            raise ApiError(409, "assessment_running", str(exc)) from None
        return {
            "snapshot_id": outcome.snapshot.snapshot_id,
            "evaluated_at": format_instant(outcome.snapshot.evaluated_at),
            "alerts": [a.to_doc() for a in outcome.alerts],
        }

    @app.put("/model")
    async def replace_model(request: Request):
        import json

        body = (await request.body()).decode("utf-8", errors="replace")
        try:
            doc = json.loads(body)
            new_model = parse_model_document(doc)
        except json.JSONDecodeError as exc:
            raise ApiError(422, "invalid_model", f"bad JSON: {exc.msg}") from None
        except ModelError as exc:
            raise ApiError(422, "invalid_model", str(exc)) from None
        violations = engine.replace_model(new_model)
        if violations:
            raise ApiError(
                422,
                "invalid_model",
                "model validation failed",
                violations=[{"element": v.element, "message": v.message} for v in violations],
            )
        return {"replaced": True, "metrics": len(new_model.metrics)}

    @app.post("/whatif")
    async def what_if(request: Request):
        import json

        body = (await request.body()).decode("utf-8", errors="replace")
        try:
            doc = json.loads(body) if body.strip() else {}
            delta = WhatIfDelta.from_document(doc)
        except json.JSONDecodeError as exc:
            raise ApiError(422, "invalid_delta", f"bad JSON: {exc.msg}") from None
        except ModelError as exc:
            raise ApiError(422, "invalid_delta", str(exc)) from None
        window = _parse_window_args(doc.get("from"), doc.get("to"))
        try:
            snapshot = engine.what_if(
                delta, window=window, window_days=doc.get("window_days")
            )
        except ModelError as exc:
            raise ApiError(422, "invalid_delta", str(exc)) from None
        return snapshot_to_doc(snapshot)

    @app.post("/alerts/{alert_id}/ack")
    def acknowledge(alert_id: str):
        if not engine.acknowledge(alert_id):
            raise ApiError(404, "unknown_alert", f"no alert {alert_id!r}")
        return {"alert_id": alert_id, "acknowledged": True}

    return app


def serve(config) -> None:
    """Build the engine from a config and run the HTTP service (blocking)."""
    import uvicorn

    from .model import parse_model
    from .store import Store

    model = parse_model(config.model_path.read_text(encoding="utf-8"))
    store = Store(config.store_path, project=config.project)
    engine = Engine(model, store, model_path=config.model_path)
    app = create_app(engine, cors_origins=config.cors_origins)

    scheduler = None
    if config.period_minutes:
        from .assessment import AssessmentScheduler

        def run_scheduled():
            try:
                engine.assess(window_days=config.window_days, trigger="scheduled")
            except AssessmentRunning:
                logger.warning("scheduled assessment skipped: previous run still active")

        scheduler = AssessmentScheduler(run_scheduled, config.period_minutes * 60).start()
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    finally:
        if scheduler is not None:
            scheduler.cancel()
