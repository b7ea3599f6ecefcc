"""Traffic-light deterioration alerts and drill-down trees.

An alert records that an element's color got strictly worse between two
consecutive snapshots (or was already non-green in the very first one).
Drill-down walks from any element through its weighted children down to the
metric leaves with their raw offenders.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Mapping, Optional

from .model import Color, QualityModel, Stratum, is_deterioration
from .records import UTC, format_instant, parse_instant
from .store import Offender, Snapshot, Store

_BOOTSTRAP_BASELINE = Color.GREEN  # first snapshot is judged as if installed clean


class AlertError(ValueError):
    """Snapshots handed to alert detection do not line up."""


@dataclass(frozen=True)
class Alert:
    alert_id: str
    element_id: str
    stratum: Stratum
    previous_color: Color
    new_color: Color
    value: Optional[float]
    threshold_crossed: str  # "warning" or "critical"
    evaluated_at: datetime
    acknowledged: bool = False

    def to_doc(self) -> dict:
        return {
            "alert_id": self.alert_id,
            "element_id": self.element_id,
            "stratum": self.stratum.value,
            "previous_color": self.previous_color.value,
            "new_color": self.new_color.value,
            "value": self.value,
            "threshold_crossed": self.threshold_crossed,
            "evaluated_at": format_instant(self.evaluated_at),
            "acknowledged": self.acknowledged,
        }

    @staticmethod
    def from_doc(doc: Mapping) -> "Alert":
        return Alert(
            alert_id=doc["alert_id"],
            element_id=doc["element_id"],
            stratum=Stratum(doc["stratum"]),
            previous_color=Color(doc["previous_color"]),
            new_color=Color(doc["new_color"]),
            value=doc.get("value"),
            threshold_crossed=doc["threshold_crossed"],
            evaluated_at=parse_instant(doc["evaluated_at"]),
            acknowledged=bool(doc.get("acknowledged", False)),
        )


def _alert_id(snapshot_id: str, element_id: str) -> str:
    # Deterministic so replaying history never duplicates alerts.
    return hashlib.sha1(f"{snapshot_id}|{element_id}".encode("utf-8")).hexdigest()[:16]


def detect_alerts(
    prev: Optional[Snapshot], curr: Snapshot, model: QualityModel
) -> list[Alert]:
    """Alerts for every element whose color strictly worsened from prev to curr.

    With no previous snapshot, every element already orange or red alerts
    against a green baseline. Transitions into or out of no-data never alert.
    """
    if prev is not None and set(prev.entries) != set(curr.entries):
        raise AlertError("snapshots cover different element sets")

    alerts = []
    for element_id in curr.entries:
        entry = curr.entries[element_id]
        previous_color = (
            prev.entries[element_id].color if prev is not None else _BOOTSTRAP_BASELINE
        )
        if not is_deterioration(previous_color, entry.color):
            continue
        alerts.append(
            Alert(
                alert_id=_alert_id(curr.snapshot_id, element_id),
                element_id=element_id,
                stratum=entry.stratum,
                previous_color=previous_color,
                new_color=entry.color,
                value=entry.value,
                threshold_crossed="critical" if entry.color is Color.RED else "warning",
                evaluated_at=curr.evaluated_at,
            )
        )
    return alerts


# --- persistence (fifth store file, alerts.jsonl) -------------------------------


def persist_alerts(store: Store, alerts: list[Alert]) -> int:
    return store.append_alert_docs([a.to_doc() for a in alerts])


def load_alerts(store: Store, since: Optional[datetime] = None) -> list[Alert]:
    """Stored alerts with acknowledgement lines folded in, oldest first."""
    alerts: dict[str, Alert] = {}
    for doc in store.read_alert_docs():
        if "alert_id" in doc:
            alert = Alert.from_doc(doc)
            alerts[alert.alert_id] = alert
        elif "ack" in doc and doc["ack"] in alerts:
            alerts[doc["ack"]] = replace(alerts[doc["ack"]], acknowledged=True)
    ordered = sorted(alerts.values(), key=lambda a: (a.evaluated_at, a.element_id))
    if since is not None:
        ordered = [a for a in ordered if a.evaluated_at >= since]
    return ordered


def acknowledge_alert(store: Store, alert_id: str, at: Optional[datetime] = None) -> bool:
    known = {a.alert_id for a in load_alerts(store)}
    if alert_id not in known:
        return False
    store.append_ack_doc(alert_id, at or datetime.now(UTC))
    return True


# --- drill-down ---------------------------------------------------------------------


@dataclass(frozen=True)
class DrilldownNode:
    """One element in a drill-down tree, children ordered worst first."""

    element_id: str
    name: str
    stratum: Stratum
    value: Optional[float]
    color: Color
    weight_from_parent: Optional[float]
    contribution: Optional[float]  # renormalized weight x value; sums to the parent value
    children: tuple["DrilldownNode", ...] = ()
    offenders: tuple[Offender, ...] = ()
    raw_summary: Mapping[str, float] = field(default_factory=dict)


def drilldown(snapshot: Snapshot, element_id: str, model: QualityModel) -> DrilldownNode:
    """Subtree from the element down to metric leaves with weights and offenders."""
    if element_id not in snapshot.entries:
        raise KeyError(element_id)

    def build(eid: str, weight: Optional[float], parent_bearing: Optional[float]) -> DrilldownNode:
        entry = snapshot.entries[eid]
        child_edges = model.children_of(eid)
        bearing = sum(
            w for cid, w in child_edges if snapshot.entries[cid].value is not None
        )
        children = [build(cid, w, bearing) for cid, w in child_edges]
        children.sort(
            key=lambda node: (node.value is None, node.value if node.value is not None else 0.0, node.element_id)
        )
        contribution = None
        if weight is not None and entry.value is not None and parent_bearing:
            contribution = (weight / parent_bearing) * entry.value
        return DrilldownNode(
            element_id=eid,
            name=model.name_of(eid),
            stratum=entry.stratum,
            value=entry.value,
            color=entry.color,
            weight_from_parent=weight,
            contribution=contribution,
            children=tuple(children),
            offenders=entry.offenders,
            raw_summary=dict(entry.raw_summary),
        )

    return build(element_id, None, None)


def drilldown_to_doc(node: DrilldownNode) -> dict:
    return {
        "element_id": node.element_id,
        "name": node.name,
        "stratum": node.stratum.value,
        "value": node.value,
        "color": node.color.value,
        "weight_from_parent": node.weight_from_parent,
        "contribution": node.contribution,
        "raw_summary": dict(node.raw_summary or {}),
        "offenders": [o.to_doc() for o in node.offenders],
        "children": [drilldown_to_doc(child) for child in node.children],
    }
