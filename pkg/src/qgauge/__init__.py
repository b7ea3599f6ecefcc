"""qgauge: a desk-scale quality-model assessment engine.

Ingests heterogeneous development and runtime data, scores it through a
weighted three-strata quality model with utility functions, persists
assessment snapshots, raises traffic-light alerts, and serves drill-down and
what-if analysis over HTTP.
"""

from .alerts import Alert, DrilldownNode, detect_alerts, drilldown
from .assessment import (
    AssessmentRequest,
    WhatIfDelta,
    aggregate_children,
    run_assessment,
    what_if,
)
from .engine import AssessmentRunning, Engine
from .metrics import CATALOG, MetricValue, compute_assessed_metric
from .model import (
    Color,
    MetricDef,
    ModelError,
    PiecewiseLinear,
    QualityModel,
    Step,
    Stratum,
    Thresholds,
    UtilityFunction,
    Violation,
    classify_color,
    evaluate_utility,
    model_to_document,
    parse_model,
    validate_model,
)
from .records import RawRecord, SourceKind
from .store import ElementResult, Offender, Snapshot, Store, Window

__version__ = "0.1.0"

__all__ = [
    "Alert",
    "AssessmentRequest",
    "AssessmentRunning",
    "CATALOG",
    "Color",
    "DrilldownNode",
    "ElementResult",
    "Engine",
    "MetricDef",
    "MetricValue",
    "ModelError",
    "Offender",
    "PiecewiseLinear",
    "QualityModel",
    "RawRecord",
    "Snapshot",
    "SourceKind",
    "Step",
    "Store",
    "Stratum",
    "Thresholds",
    "UtilityFunction",
    "Violation",
    "WhatIfDelta",
    "Window",
    "aggregate_children",
    "classify_color",
    "compute_assessed_metric",
    "detect_alerts",
    "drilldown",
    "evaluate_utility",
    "model_to_document",
    "parse_model",
    "run_assessment",
    "validate_model",
    "what_if",
]
