"""Quality model: the three-strata weighted DAG and its two primitive
evaluations, utility-function application and traffic-light classification.

A model wires metric definitions into factors and factors into quality
aspects through weighted edges. Models are immutable after parsing; swap the
whole object to change one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Optional, Sequence, Union

from .records import SourceKind

WEIGHT_SUM_TOL = 1e-6
DEFAULT_WARNING = 0.67
DEFAULT_CRITICAL = 0.33
DEFAULT_WINDOW_DAYS = 14


class ModelError(ValueError):
    """A model document cannot be turned into a QualityModel."""


class Color(str, Enum):
    GREEN = "green"
    ORANGE = "orange"
    RED = "red"
    NO_DATA = "no-data"


_COLOR_RANK = {Color.GREEN: 0, Color.ORANGE: 1, Color.RED: 2}


def color_rank(color: Color) -> int:
    """Severity order green < orange < red; no-data has no rank."""
    try:
        return _COLOR_RANK[color]
    except KeyError:
        raise ValueError("no-data has no severity rank") from None


def is_deterioration(previous: Color, new: Color) -> bool:
    """True when new is strictly worse than previous; no-data never qualifies."""
    if Color.NO_DATA in (previous, new):
        return False
    return _COLOR_RANK[new] > _COLOR_RANK[previous]


class Stratum(str, Enum):
    ASPECT = "aspect"
    FACTOR = "factor"
    METRIC = "metric"


@dataclass(frozen=True)
class PiecewiseLinear:
    """Breakpoint interpolation mapping a raw scale into [0, 1].

    Exact at breakpoints, affine between adjacent ones, clamped to the first
    and last y outside the breakpoint domain.
    """

    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class Step:
    """Two-level mapping: below_value left of the threshold, at_or_above right of it."""

    threshold: float
    below: float
    at_or_above: float


UtilityFunction = Union[PiecewiseLinear, Step]

IDENTITY_UTILITY = PiecewiseLinear(((0.0, 0.0), (1.0, 1.0)))


def utility_invariant_error(u: UtilityFunction) -> Optional[str]:
    """Return a description of the broken invariant, or None when u is valid."""
    if isinstance(u, Step):
        for name, y in (("below", u.below), ("at_or_above", u.at_or_above)):
            if not (0.0 <= y <= 1.0):
                return f"step {name} value {y:g} outside [0, 1]"
        return None
    if isinstance(u, PiecewiseLinear):
        if len(u.points) < 2:
            return "piecewise-linear needs at least 2 breakpoints"
        xs = [x for x, _ in u.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            return "breakpoint x values must be strictly increasing"
        for _, y in u.points:
            if not (0.0 <= y <= 1.0):
                return f"breakpoint y value {y:g} outside [0, 1]"
        return None
    return f"unknown utility type {type(u).__name__}"


def evaluate_utility(u: UtilityFunction, x: float) -> float:
    """Map a raw-scale value into [0, 1] through the utility function."""
    if isinstance(u, Step):
        return u.below if x < u.threshold else u.at_or_above
    pts = u.points
    if x <= pts[0][0]:
        return pts[0][1]
    if x >= pts[-1][0]:
        return pts[-1][1]
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if x == x0:
            return y0
        if x0 < x < x1:
            return y0 + (x - x0) * (y1 - y0) / (x1 - x0)
    return pts[-1][1]


@dataclass(frozen=True)
class Thresholds:
    """Traffic-light cut points on the normalized scale."""

    warning: float = DEFAULT_WARNING
    critical: float = DEFAULT_CRITICAL

    def invariant_error(self) -> Optional[str]:
        if not (0.0 <= self.critical <= self.warning <= 1.0):
            return (
                f"thresholds need 0 <= critical <= warning <= 1, "
                f"got critical {self.critical:g}, warning {self.warning:g}"
            )
        return None


def classify_color(value: Optional[float], thresholds: Thresholds) -> Color:
    """Traffic light for a normalized value; boundaries are inclusive upward."""
    if value is None:
        return Color.NO_DATA
    if value >= thresholds.warning:
        return Color.GREEN
    if value >= thresholds.critical:
        return Color.ORANGE
    return Color.RED


@dataclass(frozen=True)
class AspectDef:
    id: str
    name: str
    thresholds: Thresholds = Thresholds()


@dataclass(frozen=True)
class FactorDef:
    id: str
    name: str
    thresholds: Thresholds = Thresholds()


@dataclass(frozen=True)
class MetricDef:
    """One assessed metric: which extractor feeds it and how raw values are scored."""

    id: str
    name: str
    extractor: str
    source_kind: SourceKind
    utility: UtilityFunction
    description: str = ""
    params: Mapping[str, object] = field(default_factory=dict)
    window_days: Optional[int] = None
    thresholds: Thresholds = Thresholds()


@dataclass(frozen=True)
class Edge:
    parent_id: str
    child_id: str
    weight: float


@dataclass(frozen=True)
class Violation:
    """One broken model invariant; data, not an exception."""

    element: str
    message: str

    def __str__(self) -> str:
        return f"{self.element}: {self.message}"


@dataclass(frozen=True)
class QualityModel:
    aspects: tuple[AspectDef, ...]
    factors: tuple[FactorDef, ...]
    metrics: tuple[MetricDef, ...]
    edges: tuple[Edge, ...]
    default_window_days: int = DEFAULT_WINDOW_DAYS

    def element_ids(self) -> list[str]:
        return (
            [m.id for m in self.metrics]
            + [f.id for f in self.factors]
            + [a.id for a in self.aspects]
        )

    def stratum_of(self, element_id: str) -> Optional[Stratum]:
        if any(a.id == element_id for a in self.aspects):
            return Stratum.ASPECT
        if any(f.id == element_id for f in self.factors):
            return Stratum.FACTOR
        if any(m.id == element_id for m in self.metrics):
            return Stratum.METRIC
        return None

    def metric(self, metric_id: str) -> MetricDef:
        for m in self.metrics:
            if m.id == metric_id:
                return m
        raise KeyError(metric_id)

    def thresholds_of(self, element_id: str) -> Thresholds:
        for group in (self.aspects, self.factors, self.metrics):
            for el in group:
                if el.id == element_id:
                    return el.thresholds
        raise KeyError(element_id)

    def name_of(self, element_id: str) -> str:
        for group in (self.aspects, self.factors, self.metrics):
            for el in group:
                if el.id == element_id:
                    return el.name
        raise KeyError(element_id)

    def children_of(self, parent_id: str) -> list[tuple[str, float]]:
        """(child_id, weight) pairs in declaration order."""
        return [(e.child_id, e.weight) for e in self.edges if e.parent_id == parent_id]

    def parents_of(self, child_id: str) -> list[str]:
        return [e.parent_id for e in self.edges if e.child_id == child_id]

    def effective_window_days(self, metric: MetricDef) -> int:
        return metric.window_days if metric.window_days is not None else self.default_window_days


# --- parsing ----------------------------------------------------------------


def _utility_from_doc(doc: Mapping, where: str) -> UtilityFunction:
    kind = doc.get("kind")
    if kind == "linear":
        points = doc.get("points")
        if not isinstance(points, Sequence) or not points:
            raise ModelError(f"{where}: linear utility needs a points array")
        try:
            pts = tuple((float(x), float(y)) for x, y in points)
        except (TypeError, ValueError):
            raise ModelError(f"{where}: points must be [x, y] pairs") from None
        return PiecewiseLinear(pts)
    if kind == "step":
        try:
            return Step(
                threshold=float(doc["threshold"]),
                below=float(doc["below"]),
                at_or_above=float(doc["at_or_above"]),
            )
        except KeyError as exc:
            raise ModelError(f"{where}: step utility missing {exc}") from None
    raise ModelError(f"{where}: unknown utility kind {kind!r}")


def _utility_to_doc(u: UtilityFunction) -> dict:
    if isinstance(u, Step):
        return {
            "kind": "step",
            "threshold": u.threshold,
            "below": u.below,
            "at_or_above": u.at_or_above,
        }
    return {"kind": "linear", "points": [[x, y] for x, y in u.points]}


def _thresholds_from_doc(doc: Optional[Mapping], where: str) -> Thresholds:
    if doc is None:
        return Thresholds()
    try:
        return Thresholds(warning=float(doc["warning"]), critical=float(doc["critical"]))
    except (KeyError, TypeError, ValueError):
        raise ModelError(f"{where}: thresholds need numeric warning and critical") from None


def parse_model(text: str) -> QualityModel:
    """Parse a model-definition JSON document.

    Raises ModelError on syntax errors (with position), unknown extractor
    ids, or duplicate element ids. Semantic rule violations (weight sums,
    childless elements, ...) are left to validate_model.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_model_document(doc)


def parse_model_document(doc: Mapping) -> QualityModel:
    from . import metrics as metrics_catalog  # late import, metrics imports this module

    if not isinstance(doc, Mapping):
        raise ModelError("model document must be a JSON object")

    default_window = doc.get("default_window_days", DEFAULT_WINDOW_DAYS)
    if not isinstance(default_window, int) or default_window <= 0:
        raise ModelError("default_window_days must be a positive integer")

    seen: set[str] = set()

    def check_id(element_id: object, where: str) -> str:
        if not isinstance(element_id, str) or not element_id:
            raise ModelError(f"{where}: element needs a non-empty string id")
        if element_id in seen:
            raise ModelError(f"duplicate id {element_id!r}")
        seen.add(element_id)
        return element_id

    aspects = []
    for entry in doc.get("aspects", []):
        el_id = check_id(entry.get("id"), "aspects")
        aspects.append(
            AspectDef(
                id=el_id,
                name=entry.get("name", el_id),
                thresholds=_thresholds_from_doc(entry.get("thresholds"), el_id),
            )
        )

    factors = []
    for entry in doc.get("factors", []):
        el_id = check_id(entry.get("id"), "factors")
        factors.append(
            FactorDef(
                id=el_id,
                name=entry.get("name", el_id),
                thresholds=_thresholds_from_doc(entry.get("thresholds"), el_id),
            )
        )

    metric_defs = []
    for entry in doc.get("metrics", []):
        el_id = check_id(entry.get("id"), "metrics")
        extractor_id = entry.get("extractor", el_id)
        spec = metrics_catalog.CATALOG.get(extractor_id)
        if spec is None:
            raise ModelError(f"unknown extractor {extractor_id!r} for metric {el_id!r}")
        params = dict(entry.get("params", {}))
        if "source_kind" in entry:
            try:
                source_kind = SourceKind(entry["source_kind"])
            except ValueError:
                raise ModelError(f"{el_id}: unknown source_kind {entry['source_kind']!r}") from None
            if source_kind is not spec.source_kind:
                raise ModelError(
                    f"{el_id}: extractor {extractor_id!r} reads {spec.source_kind.value}, "
                    f"not {source_kind.value}"
                )
        if "utility" in entry:
            utility = _utility_from_doc(entry["utility"], el_id)
        else:
            utility = spec.default_utility(metrics_catalog.merged_params(spec, params))
        window_days = entry.get("window_days")
        if window_days is not None and (not isinstance(window_days, int) or window_days <= 0):
            raise ModelError(f"{el_id}: window_days must be a positive integer")
        metric_defs.append(
            MetricDef(
                id=el_id,
                name=entry.get("name", el_id),
                description=entry.get("description", ""),
                extractor=extractor_id,
                source_kind=spec.source_kind,
                utility=utility,
                params=params,
                window_days=window_days,
                thresholds=_thresholds_from_doc(entry.get("thresholds"), el_id),
            )
        )

    edges = []
    for entry in doc.get("edges", []):
        try:
            edges.append(
                Edge(
                    parent_id=entry["parent"],
                    child_id=entry["child"],
                    weight=float(entry["weight"]),
                )
            )
        except (KeyError, TypeError, ValueError):
            raise ModelError(f"bad edge entry {entry!r}: needs parent, child, weight") from None

    return QualityModel(
        aspects=tuple(aspects),
        factors=tuple(factors),
        metrics=tuple(metric_defs),
        edges=tuple(edges),
        default_window_days=default_window,
    )


def model_to_document(model: QualityModel) -> dict:
    """Serialize a model back into its JSON document form (parse round-trips)."""

    def thresholds_doc(t: Thresholds) -> dict:
        return {"warning": t.warning, "critical": t.critical}

    doc: dict = {"default_window_days": model.default_window_days}
    doc["aspects"] = [
        {"id": a.id, "name": a.name, "thresholds": thresholds_doc(a.thresholds)}
        for a in model.aspects
    ]
    doc["factors"] = [
        {"id": f.id, "name": f.name, "thresholds": thresholds_doc(f.thresholds)}
        for f in model.factors
    ]
    metric_docs = []
    for m in model.metrics:
        entry: dict = {
            "id": m.id,
            "name": m.name,
            "extractor": m.extractor,
            "source_kind": m.source_kind.value,
            "utility": _utility_to_doc(m.utility),
            "params": dict(m.params),
            "thresholds": thresholds_doc(m.thresholds),
        }
        if m.description:
            entry["description"] = m.description
        if m.window_days is not None:
            entry["window_days"] = m.window_days
        metric_docs.append(entry)
    doc["metrics"] = metric_docs
    doc["edges"] = [
        {"parent": e.parent_id, "child": e.child_id, "weight": e.weight} for e in model.edges
    ]
    return doc


def model_to_json(model: QualityModel) -> str:
    return json.dumps(model_to_document(model), indent=2)


# --- validation ---------------------------------------------------------------


def validate_model(model: QualityModel) -> list[Violation]:
    """Check every model invariant; an empty list means the model is valid."""
    from . import metrics as metrics_catalog  # late import, see parse_model_document

    violations: list[Violation] = []
    add = violations.append

    ids = model.element_ids()
    seen = set()
    for element_id in ids:
        if element_id in seen:
            add(Violation(element_id, "duplicate id"))
        seen.add(element_id)

    aspect_ids = {a.id for a in model.aspects}
    factor_ids = {f.id for f in model.factors}
    metric_ids = {m.id for m in model.metrics}

    for el in list(model.aspects) + list(model.factors) + list(model.metrics):
        err = el.thresholds.invariant_error()
        if err:
            add(Violation(el.id, err))

    for m in model.metrics:
        err = utility_invariant_error(m.utility)
        if err:
            add(Violation(m.id, f"bad utility: {err}"))
        spec = metrics_catalog.CATALOG.get(m.extractor)
        if spec is None:
            add(Violation(m.id, f"unknown extractor {m.extractor!r}"))
            continue
        if m.source_kind is not spec.source_kind:
            add(Violation(m.id, f"source_kind {m.source_kind.value} does not match extractor"))
        merged = metrics_catalog.merged_params(spec, m.params)
        for key in spec.required_params:
            if key not in merged:
                add(Violation(m.id, f"missing required param {key!r}"))
        if m.window_days is not None and m.window_days <= 0:
            add(Violation(m.id, "window_days must be positive"))

    children: dict[str, list[Edge]] = {}
    for edge in model.edges:
        children.setdefault(edge.parent_id, []).append(edge)
        parent_stratum = model.stratum_of(edge.parent_id)
        child_stratum = model.stratum_of(edge.child_id)
        where = f"{edge.parent_id}->{edge.child_id}"
        if edge.parent_id not in aspect_ids | factor_ids:
            add(Violation(where, f"unknown parent {edge.parent_id!r}"))
            continue
        if edge.child_id not in factor_ids | metric_ids:
            add(Violation(where, f"unknown child {edge.child_id!r}"))
            continue
        valid_pair = (parent_stratum, child_stratum) in (
            (Stratum.ASPECT, Stratum.FACTOR),
            (Stratum.FACTOR, Stratum.METRIC),
        )
        if not valid_pair:
            add(
                Violation(
                    where,
                    "edges must connect aspect to factor or factor to metric, "
                    f"got {parent_stratum.value if parent_stratum else '?'} to "
                    f"{child_stratum.value if child_stratum else '?'}",
                )
            )
        if not (0.0 < edge.weight <= 1.0):
            add(Violation(where, f"weight {edge.weight:g} outside (0, 1]"))

    for a in model.aspects:
        if not children.get(a.id):
            add(Violation(a.id, f"aspect {a.id} has no factors"))
    for f in model.factors:
        if not children.get(f.id):
            add(Violation(f.id, f"factor {f.id} has no metrics"))

    for parent_id, edge_list in children.items():
        if model.stratum_of(parent_id) is None:
            continue
        total = sum(e.weight for e in edge_list)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            add(Violation(parent_id, f"weights sum {total:g} != 1 for parent {parent_id}"))
        child_ids = [e.child_id for e in edge_list]
        for child_id in set(child_ids):
            if child_ids.count(child_id) > 1:
                add(Violation(parent_id, f"duplicate edge to child {child_id}"))

    return violations


def with_replaced_edges(model: QualityModel, parent_id: str, weights: Mapping[str, float]) -> QualityModel:
    """Copy of the model with the given parent's child weights replaced."""
    new_edges = []
    known_children = {e.child_id for e in model.edges if e.parent_id == parent_id}
    unknown = set(weights) - known_children
    if unknown:
        raise ModelError(f"{parent_id}: no edge to {sorted(unknown)}")
    for edge in model.edges:
        if edge.parent_id == parent_id and edge.child_id in weights:
            new_edges.append(replace(edge, weight=float(weights[edge.child_id])))
        else:
            new_edges.append(edge)
    return replace(model, edges=tuple(new_edges))
