"""Embedded append-only store for raw records and assessment snapshots.

Layout under the store directory:

    manifest.json    format version and project id
    raw.jsonl        ingested raw records, one per line
    metrics.jsonl    assessed metric entries, one per snapshot element
    factors.jsonl    assessed factor entries
    aspects.jsonl    assessed aspect entries
    alerts.jsonl     quality alerts and acknowledgement lines

Lines are only ever appended, never rewritten. One writer at a time is
enforced with an advisory file lock plus an in-process mutex; readers see a
consistent prefix (a torn trailing line without a newline is ignored).
"""

from __future__ import annotations

import fcntl
import json
import logging
import os
import threading
import uuid
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .model import Color, Stratum
from .records import (
    RawRecord,
    SourceKind,
    UTC,
    format_instant,
    parse_instant,
    record_from_doc,
    record_to_doc,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
EPOCH = datetime(1970, 1, 1, tzinfo=UTC)
FAR_FUTURE = datetime(9999, 1, 1, tzinfo=UTC)


class StoreError(RuntimeError):
    """Storage failed; nothing from the failing batch is visible."""


@dataclass(frozen=True)
class Window:
    """Half-open time range [start, end)."""

    start: datetime
    end: datetime

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("window start after end")

    def contains(self, instant: datetime) -> bool:
        return self.start <= instant < self.end

    def to_doc(self) -> dict:
        return {"from": format_instant(self.start), "to": format_instant(self.end)}

    @staticmethod
    def from_doc(doc: Mapping) -> "Window":
        return Window(parse_instant(doc["from"]), parse_instant(doc["to"]))


ALL_TIME = Window(EPOCH, FAR_FUTURE)


@dataclass(frozen=True)
class Offender:
    """One raw entity dragging a metric down, with its actual value."""

    entity: str
    base_value: float
    utility: float

    def to_doc(self) -> dict:
        return {"entity": self.entity, "base_value": self.base_value, "utility": self.utility}

    @staticmethod
    def from_doc(doc: Mapping) -> "Offender":
        return Offender(
            entity=doc["entity"],
            base_value=float(doc["base_value"]),
            utility=float(doc["utility"]),
        )


@dataclass(frozen=True)
class ElementResult:
    """Assessed state of one model element inside a snapshot."""

    element_id: str
    stratum: Stratum
    value: Optional[float]
    color: Color
    raw_summary: Mapping[str, float] = field(default_factory=dict)
    offenders: tuple[Offender, ...] = ()

    def to_doc(self) -> dict:
        doc: dict = {
            "element_id": self.element_id,
            "stratum": self.stratum.value,
            "value": self.value,
            "color": self.color.value,
            "raw_summary": dict(self.raw_summary),
        }
        if self.offenders:
            doc["offenders"] = [o.to_doc() for o in self.offenders]
        return doc

    @staticmethod
    def from_doc(doc: Mapping) -> "ElementResult":
        return ElementResult(
            element_id=doc["element_id"],
            stratum=Stratum(doc["stratum"]),
            value=doc.get("value"),
            color=Color(doc["color"]),
            raw_summary=dict(doc.get("raw_summary", {})),
            offenders=tuple(Offender.from_doc(o) for o in doc.get("offenders", [])),
        )


@dataclass(frozen=True)
class Snapshot:
    """One full bottom-up assessment: every model element, valued and colored."""

    snapshot_id: str
    evaluated_at: datetime
    window: Window
    entries: Mapping[str, ElementResult]
    transient: bool = False

    def entry(self, element_id: str) -> ElementResult:
        return self.entries[element_id]

    def to_doc(self) -> dict:
        return {
            "snapshot_id": self.snapshot_id,
            "evaluated_at": format_instant(self.evaluated_at),
            "window": self.window.to_doc(),
            "transient": self.transient,
            "entries": {eid: e.to_doc() for eid, e in self.entries.items()},
        }


def new_snapshot_id() -> str:
    return uuid.uuid4().hex


_STRATUM_FILES = {
    Stratum.METRIC: "metrics.jsonl",
    Stratum.FACTOR: "factors.jsonl",
    Stratum.ASPECT: "aspects.jsonl",
}


class _TailReader:
    """Incremental reader over a jsonl file; remembers how far it has parsed."""

    def __init__(self, path: Path):
        self.path = path
        self.offset = 0
        self.docs: list[dict] = []

    def refresh(self) -> None:
        if not self.path.exists():
            return
        size = self.path.stat().st_size
        if size <= self.offset:
            return
        with open(self.path, "rb") as fh:
            fh.seek(self.offset)
            chunk = fh.read()
        end = chunk.rfind(b"\n")
        if end < 0:
            return  # torn tail only, wait for the newline
        for line in chunk[: end + 1].splitlines():
            if not line.strip():
                continue
            try:
                self.docs.append(json.loads(line))
            except json.JSONDecodeError:
                logger.warning("skipping undecodable line in %s", self.path.name)
        self.offset += end + 1


class Store:
    """Append-only record store; see the module docstring for the layout."""

    def __init__(self, root: Path | str, project: str = "default", create: bool = True):
        self.root = Path(root)
        manifest_path = self.root / "manifest.json"
        if not manifest_path.exists():
            if not create:
                raise StoreError(f"no store at {self.root}")
            self.root.mkdir(parents=True, exist_ok=True)
            payload = json.dumps({"format_version": FORMAT_VERSION, "project": project})
            manifest_path.write_text(payload + "\n", encoding="utf-8")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        if manifest.get("format_version") != FORMAT_VERSION:
            raise StoreError(f"unsupported store format {manifest.get('format_version')!r}")
        self.project = manifest.get("project", project)

        self._write_mutex = threading.Lock()
        self._lock_path = self.root / ".lock"
        self._raw = _TailReader(self.root / "raw.jsonl")
        self._strata = {s: _TailReader(self.root / name) for s, name in _STRATUM_FILES.items()}
        self._alerts = _TailReader(self.root / "alerts.jsonl")
        self._raw_ids: set[str] = set()
        self._raw_records: list[RawRecord] = []

    # --- low-level ---------------------------------------------------------

    def _refresh_raw(self) -> None:
        before = len(self._raw.docs)
        self._raw.refresh()
        for doc in self._raw.docs[before:]:
            try:
                record = record_from_doc(doc)
            except Exception:
                logger.warning("skipping bad raw record line in %s", self._raw.path.name)
                continue
            self._raw_ids.add(record.record_id)
            self._raw_records.append(record)

    @contextmanager
    def _writer_lock(self):
        """In-process mutex plus advisory file lock: one writer at a time."""
        with self._write_mutex, open(self._lock_path, "a+b") as lock_fh:
            fcntl.flock(lock_fh, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(lock_fh, fcntl.LOCK_UN)

    def _append_locked(self, path: Path, docs: Sequence[Mapping]) -> None:
        """Append all docs as one write; serialize everything before touching the file."""
        if not docs:
            return
        try:
            blob = "".join(json.dumps(doc, ensure_ascii=False) + "\n" for doc in docs)
        except (TypeError, ValueError) as exc:
            raise StoreError(f"unserializable record: {exc}") from exc
        data = blob.encode("utf-8")
        try:
            with open(path, "ab") as fh:
                # A crash can leave a torn tail; start a fresh line before appending.
                if fh.tell() > 0:
                    with open(path, "rb") as check:
                        check.seek(-1, os.SEEK_END)
                        if check.read(1) != b"\n":
                            fh.write(b"\n")
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise StoreError(f"append to {path.name} failed: {exc}") from exc

    def _append_lines(self, path: Path, docs: Sequence[Mapping]) -> None:
        with self._writer_lock():
            self._append_locked(path, docs)

    # --- raw records --------------------------------------------------------

    def append(self, records: Iterable[RawRecord]) -> "AppendResult":
        """Append unseen records; re-submitted record_ids count as duplicates.

        The dedup check runs under the writer lock so concurrent writers
        (CLI alongside the service) cannot double-insert a record.
        """
        batch = list(records)
        with self._writer_lock():
            self._refresh_raw()
            fresh: list[RawRecord] = []
            seen_now: set[str] = set()
            duplicates = 0
            for record in batch:
                if record.record_id in self._raw_ids or record.record_id in seen_now:
                    duplicates += 1
                    continue
                seen_now.add(record.record_id)
                fresh.append(record)
            self._append_locked(self._raw.path, [record_to_doc(r) for r in fresh])
        self._refresh_raw()
        return AppendResult(inserted=len(fresh), duplicates=duplicates)

    def query_raw(self, kind: SourceKind, window: Window = ALL_TIME) -> list[RawRecord]:
        """Records of one kind with window.start <= timestamp < window.end, time-ordered."""
        self._refresh_raw()
        hits = [
            r for r in self._raw_records if r.source_kind is kind and window.contains(r.timestamp)
        ]
        hits.sort(key=lambda r: (r.timestamp, r.record_id))
        return hits

    def raw_count(self) -> int:
        self._refresh_raw()
        return len(self._raw_records)

    # --- snapshots -----------------------------------------------------------

    def save_snapshot(self, snapshot: Snapshot) -> str:
        if snapshot.transient:
            raise StoreError("refusing to persist a transient snapshot")
        header = {
            "snapshot_id": snapshot.snapshot_id,
            "evaluated_at": format_instant(snapshot.evaluated_at),
            "window": snapshot.window.to_doc(),
        }
        by_stratum: dict[Stratum, list[dict]] = {s: [] for s in _STRATUM_FILES}
        for entry in snapshot.entries.values():
            by_stratum[entry.stratum].append({**header, "element": entry.to_doc()})
        for stratum, docs in by_stratum.items():
            self._append_lines(self._strata[stratum].path, docs)
        return snapshot.snapshot_id

    def query_snapshots(self, window: Optional[Window] = None) -> list[Snapshot]:
        """Snapshots with evaluated_at inside the window, oldest first."""
        groups: dict[str, dict] = {}
        order: list[str] = []
        for reader in self._strata.values():
            reader.refresh()
            for doc in reader.docs:
                sid = doc["snapshot_id"]
                if sid not in groups:
                    groups[sid] = {
                        "evaluated_at": parse_instant(doc["evaluated_at"]),
                        "window": Window.from_doc(doc["window"]),
                        "entries": {},
                    }
                    order.append(sid)
                element = ElementResult.from_doc(doc["element"])
                groups[sid]["entries"][element.element_id] = element
        snapshots = [
            Snapshot(
                snapshot_id=sid,
                evaluated_at=groups[sid]["evaluated_at"],
                window=groups[sid]["window"],
                entries=groups[sid]["entries"],
            )
            for sid in order
        ]
        if window is not None:
            snapshots = [s for s in snapshots if window.contains(s.evaluated_at)]
        snapshots.sort(key=lambda s: (s.evaluated_at, s.snapshot_id))
        return snapshots

    def latest_snapshot(self) -> Optional[Snapshot]:
        snapshots = self.query_snapshots()
        return snapshots[-1] if snapshots else None

    def get_snapshot(self, snapshot_id: str) -> Optional[Snapshot]:
        for snapshot in self.query_snapshots():
            if snapshot.snapshot_id == snapshot_id:
                return snapshot
        return None

    def element_series(
        self, element_id: str, window: Optional[Window] = None
    ) -> list[tuple[datetime, Optional[float], Color]]:
        """Per-element (evaluated_at, value, color) time series across snapshots."""
        series = []
        for snapshot in self.query_snapshots(window):
            entry = snapshot.entries.get(element_id)
            if entry is not None:
                series.append((snapshot.evaluated_at, entry.value, entry.color))
        return series

    # --- alerts (doc level; semantics live in the alerts module) -------------

    def append_alert_docs(self, docs: Sequence[Mapping]) -> int:
        """Append alert docs not already present (dedup on alert_id)."""
        with self._writer_lock():
            self._alerts.refresh()
            known = {doc.get("alert_id") for doc in self._alerts.docs if "alert_id" in doc}
            fresh = []
            for doc in docs:
                alert_id = doc.get("alert_id")
                if alert_id and alert_id not in known:
                    known.add(alert_id)
                    fresh.append(doc)
            self._append_locked(self._alerts.path, fresh)
        self._alerts.refresh()
        return len(fresh)

    def read_alert_docs(self) -> list[dict]:
        self._alerts.refresh()
        return list(self._alerts.docs)

    def append_ack_doc(self, alert_id: str, at: datetime) -> None:
        self._append_lines(self._alerts.path, [{"ack": alert_id, "at": format_instant(at)}])
        self._alerts.refresh()

    # --- lifecycle ------------------------------------------------------------

    def file_paths(self) -> list[Path]:
        names = ["manifest.json", "raw.jsonl", "metrics.jsonl", "factors.jsonl", "aspects.jsonl", "alerts.jsonl"]
        return [self.root / n for n in names]

    def close(self) -> None:
        """Nothing buffered beyond each append's fsync; kept for symmetry."""

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


@dataclass(frozen=True)
class AppendResult:
    inserted: int
    duplicates: int
