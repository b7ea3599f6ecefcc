"""Raw record envelope and the per-source payload types.

Every piece of ingested data is a RawRecord: a timestamped, deduplicatable
envelope whose payload variant matches its source kind (static-analysis file
measures, commits, test runs, issues, log entries, usage events, availability
samples).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, fields
from datetime import datetime, timezone
from enum import Enum
from typing import Optional, Union

UTC = timezone.utc


class SourceKind(str, Enum):
    FILE_MEASURE = "file_measure"
    COMMIT = "commit"
    TEST_RUN = "test_run"
    ISSUE = "issue"
    LOG_ENTRY = "log_entry"
    USAGE_EVENT = "usage_event"
    AVAILABILITY_SAMPLE = "availability_sample"


class Severity(str, Enum):
    BLOCKER = "blocker"
    CRITICAL = "critical"
    MAJOR = "major"
    MINOR = "minor"
    INFO = "info"


class ViolationType(str, Enum):
    CODE_SMELL = "code_smell"
    BUG = "bug"
    VULNERABILITY = "vulnerability"


class IssueType(str, Enum):
    BUG = "bug"
    MAINTENANCE = "maintenance"
    FEATURE = "feature"
    OTHER = "other"


class IssueStatus(str, Enum):
    OPEN = "open"
    IN_PROGRESS = "in_progress"
    DONE = "done"
    OTHER = "other"


class LogLevel(str, Enum):
    FATAL = "fatal"
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"
    DEBUG = "debug"
    TRACE = "trace"


class RecordError(ValueError):
    """A record or payload violates one of its invariants."""


def parse_instant(text: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise RecordError(f"bad timestamp {text!r}: {exc}") from None
    if dt.tzinfo is None:
        return dt.replace(tzinfo=UTC)
    return dt.astimezone(UTC)


def format_instant(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=UTC)
    return dt.astimezone(UTC).isoformat().replace("+00:00", "Z")


def derive_record_id(*parts: object) -> str:
    """Deterministic dedup key from the identifying parts of a record."""
    joined = "\x1f".join(str(p) for p in parts)
    return hashlib.sha1(joined.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RuleViolation:
    rule: str
    severity: Severity
    type: ViolationType


@dataclass(frozen=True)
class FileMeasure:
    """Static-analysis measures for one file."""

    path: str
    loc: int
    comment_lines: int
    duplicated_lines: int = 0
    function_complexities: tuple[int, ...] = ()
    violations: tuple[RuleViolation, ...] = ()
    line_coverage: Optional[float] = None
    condition_coverage: Optional[float] = None

    def __post_init__(self):
        if not self.path:
            raise RecordError("file measure needs a path")
        if not (self.loc >= self.comment_lines >= 0):
            raise RecordError(f"{self.path}: need loc >= comment_lines >= 0")
        if not (0 <= self.duplicated_lines <= self.loc):
            raise RecordError(f"{self.path}: duplicated_lines outside [0, loc]")
        for name in ("line_coverage", "condition_coverage"):
            pct = getattr(self, name)
            if pct is not None and not (0.0 <= pct <= 100.0):
                raise RecordError(f"{self.path}: {name} outside [0, 100]")

    @property
    def mean_complexity(self) -> Optional[float]:
        """Mean cyclomatic complexity per function; None for files without functions."""
        if not self.function_complexities:
            return None
        return sum(self.function_complexities) / len(self.function_complexities)

    @property
    def comment_density_pct(self) -> Optional[float]:
        if self.loc == 0:
            return None
        return 100.0 * self.comment_lines / self.loc

    @property
    def duplication_pct(self) -> Optional[float]:
        if self.loc == 0:
            return None
        return 100.0 * self.duplicated_lines / self.loc

    @property
    def critical_or_blocker_count(self) -> int:
        return sum(
            1 for v in self.violations if v.severity in (Severity.BLOCKER, Severity.CRITICAL)
        )


@dataclass(frozen=True)
class FileChange:
    path: str
    lines_added: int
    lines_deleted: int


@dataclass(frozen=True)
class CommitRecord:
    revision: str
    author: str
    files: tuple[FileChange, ...] = ()

    def __post_init__(self):
        if not self.revision:
            raise RecordError("commit needs a revision")


@dataclass(frozen=True)
class TestRun:
    build_id: str
    total: int
    errors: int
    failures: int
    skipped: int
    duration_sec: float

    def __post_init__(self):
        if min(self.total, self.errors, self.failures, self.skipped) < 0:
            raise RecordError("test counts must be non-negative")
        if self.errors + self.failures + self.skipped > self.total:
            raise RecordError("errors + failures + skipped exceed total")
        if self.duration_sec < 0:
            raise RecordError("duration_sec must be non-negative")

    @property
    def success_density(self) -> Optional[float]:
        """Passed fraction of the non-skipped tests; None when every test was skipped."""
        considered = self.total - self.skipped
        if considered <= 0:
            return None
        return (considered - self.errors - self.failures) / considered


@dataclass(frozen=True)
class Issue:
    issue_id: str
    issue_type: IssueType
    status: IssueStatus
    created: datetime
    updated: datetime
    resolved: Optional[datetime] = None
    iteration: Optional[str] = None
    release: Optional[str] = None
    due_date: Optional[datetime] = None
    assignee: Optional[str] = None
    estimate_hours: Optional[float] = None
    description: Optional[str] = None

    def __post_init__(self):
        if not self.issue_id:
            raise RecordError("issue needs an id")
        if self.updated < self.created:
            raise RecordError(f"{self.issue_id}: updated before created")
        if self.resolved is not None and self.resolved < self.created:
            raise RecordError(f"{self.issue_id}: resolved before created")


@dataclass(frozen=True)
class LogEntry:
    level: LogLevel
    message: str
    source_file: Optional[str] = None
    source_line: Optional[int] = None


@dataclass(frozen=True)
class UsageEvent:
    feature: str
    duration_sec: Optional[float] = None

    def __post_init__(self):
        if not self.feature:
            raise RecordError("usage event needs a feature name")
        if self.duration_sec is not None and self.duration_sec < 0:
            raise RecordError("duration_sec must be non-negative")


@dataclass(frozen=True)
class AvailabilitySample:
    up: bool


Payload = Union[
    FileMeasure,
    CommitRecord,
    TestRun,
    Issue,
    LogEntry,
    UsageEvent,
    AvailabilitySample,
]

PAYLOAD_TYPES: dict[SourceKind, type] = {
    SourceKind.FILE_MEASURE: FileMeasure,
    SourceKind.COMMIT: CommitRecord,
    SourceKind.TEST_RUN: TestRun,
    SourceKind.ISSUE: Issue,
    SourceKind.LOG_ENTRY: LogEntry,
    SourceKind.USAGE_EVENT: UsageEvent,
    SourceKind.AVAILABILITY_SAMPLE: AvailabilitySample,
}

KIND_BY_PAYLOAD_TYPE = {cls: kind for kind, cls in PAYLOAD_TYPES.items()}


@dataclass(frozen=True)
class RawRecord:
    """Timestamped envelope around one source-specific payload."""

    record_id: str
    source_kind: SourceKind
    project: str
    timestamp: datetime
    payload: Payload

    def __post_init__(self):
        if not self.record_id:
            raise RecordError("record needs a record_id")
        expected = PAYLOAD_TYPES[self.source_kind]
        if not isinstance(self.payload, expected):
            raise RecordError(
                f"payload {type(self.payload).__name__} does not match kind {self.source_kind.value}"
            )
        if self.timestamp.tzinfo is None:
            object.__setattr__(self, "timestamp", self.timestamp.replace(tzinfo=UTC))
        else:
            object.__setattr__(self, "timestamp", self.timestamp.astimezone(UTC))


# --- JSON codec -----------------------------------------------------------


def _payload_to_doc(payload: Payload) -> dict:
    if isinstance(payload, FileMeasure):
        doc = {
            "path": payload.path,
            "loc": payload.loc,
            "comment_lines": payload.comment_lines,
            "duplicated_lines": payload.duplicated_lines,
            "function_complexities": list(payload.function_complexities),
            "violations": [
                {"rule": v.rule, "severity": v.severity.value, "type": v.type.value}
                for v in payload.violations
            ],
        }
        if payload.line_coverage is not None:
            doc["line_coverage"] = payload.line_coverage
        if payload.condition_coverage is not None:
            doc["condition_coverage"] = payload.condition_coverage
        return doc
    if isinstance(payload, CommitRecord):
        return {
            "revision": payload.revision,
            "author": payload.author,
            "files": [
                {"path": f.path, "lines_added": f.lines_added, "lines_deleted": f.lines_deleted}
                for f in payload.files
            ],
        }
    if isinstance(payload, Issue):
        doc = {
            "issue_id": payload.issue_id,
            "issue_type": payload.issue_type.value,
            "status": payload.status.value,
            "created": format_instant(payload.created),
            "updated": format_instant(payload.updated),
        }
        for name in ("resolved", "due_date"):
            value = getattr(payload, name)
            if value is not None:
                doc[name] = format_instant(value)
        for name in ("iteration", "release", "assignee", "estimate_hours", "description"):
            value = getattr(payload, name)
            if value is not None:
                doc[name] = value
        return doc
    if isinstance(payload, LogEntry):
        doc = {"level": payload.level.value, "message": payload.message}
        if payload.source_file is not None:
            doc["source_file"] = payload.source_file
        if payload.source_line is not None:
            doc["source_line"] = payload.source_line
        return doc
    if isinstance(payload, (TestRun, UsageEvent, AvailabilitySample)):
        return {
            f.name: getattr(payload, f.name)
            for f in fields(payload)
            if getattr(payload, f.name) is not None
        }
    raise RecordError(f"unknown payload type {type(payload).__name__}")


def _payload_from_doc(kind: SourceKind, doc: dict) -> Payload:
    try:
        if kind is SourceKind.FILE_MEASURE:
            return FileMeasure(
                path=doc["path"],
                loc=int(doc["loc"]),
                comment_lines=int(doc["comment_lines"]),
                duplicated_lines=int(doc.get("duplicated_lines", 0)),
                function_complexities=tuple(int(c) for c in doc.get("function_complexities", [])),
                violations=tuple(
                    RuleViolation(
                        rule=v.get("rule", ""),
                        severity=Severity(v["severity"]),
                        type=ViolationType(v.get("type", "code_smell")),
                    )
                    for v in doc.get("violations", [])
                ),
                line_coverage=doc.get("line_coverage"),
                condition_coverage=doc.get("condition_coverage"),
            )
        if kind is SourceKind.COMMIT:
            return CommitRecord(
                revision=doc["revision"],
                author=doc.get("author", ""),
                files=tuple(
                    FileChange(
                        path=f["path"],
                        lines_added=int(f.get("lines_added", 0)),
                        lines_deleted=int(f.get("lines_deleted", 0)),
                    )
                    for f in doc.get("files", [])
                ),
            )
        if kind is SourceKind.TEST_RUN:
            return TestRun(
                build_id=doc["build_id"],
                total=int(doc["total"]),
                errors=int(doc.get("errors", 0)),
                failures=int(doc.get("failures", 0)),
                skipped=int(doc.get("skipped", 0)),
                duration_sec=float(doc.get("duration_sec", 0.0)),
            )
        if kind is SourceKind.ISSUE:
            return Issue(
                issue_id=doc["issue_id"],
                issue_type=IssueType(doc.get("issue_type", "other")),
                status=IssueStatus(doc.get("status", "other")),
                created=parse_instant(doc["created"]),
                updated=parse_instant(doc["updated"]),
                resolved=parse_instant(doc["resolved"]) if doc.get("resolved") else None,
                iteration=doc.get("iteration"),
                release=doc.get("release"),
                due_date=parse_instant(doc["due_date"]) if doc.get("due_date") else None,
                assignee=doc.get("assignee"),
                estimate_hours=(
                    float(doc["estimate_hours"]) if doc.get("estimate_hours") is not None else None
                ),
                description=doc.get("description"),
            )
        if kind is SourceKind.LOG_ENTRY:
            return LogEntry(
                level=LogLevel(doc["level"]),
                message=doc.get("message", ""),
                source_file=doc.get("source_file"),
                source_line=int(doc["source_line"]) if doc.get("source_line") is not None else None,
            )
        if kind is SourceKind.USAGE_EVENT:
            return UsageEvent(
                feature=doc["feature"],
                duration_sec=(
                    float(doc["duration_sec"]) if doc.get("duration_sec") is not None else None
                ),
            )
        if kind is SourceKind.AVAILABILITY_SAMPLE:
            return AvailabilitySample(up=bool(doc["up"]))
    except KeyError as exc:
        raise RecordError(f"{kind.value} payload missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, RecordError):
            raise
        raise RecordError(f"bad {kind.value} payload: {exc}") from None
    raise RecordError(f"unknown source kind {kind!r}")


def record_to_doc(record: RawRecord) -> dict:
    return {
        "record_id": record.record_id,
        "source_kind": record.source_kind.value,
        "project": record.project,
        "timestamp": format_instant(record.timestamp),
        "payload": _payload_to_doc(record.payload),
    }


def record_from_doc(doc: dict) -> RawRecord:
    """Build a RawRecord from its canonical JSON document.

    Accepts either a nested ``payload`` object or payload fields laid flat
    beside the envelope keys. A missing record_id is derived deterministically
    from the kind, timestamp, and payload content.
    """
    if not isinstance(doc, dict):
        raise RecordError("record document must be an object")
    try:
        kind = SourceKind(doc["source_kind"])
    except KeyError:
        raise RecordError("record document missing source_kind") from None
    except ValueError:
        raise RecordError(f"unknown kind {doc.get('source_kind')!r}") from None
    if "timestamp" not in doc:
        raise RecordError("record document missing timestamp")
    timestamp = parse_instant(str(doc["timestamp"]))
    envelope_keys = {"record_id", "source_kind", "project", "timestamp", "payload"}
    if "payload" in doc:
        payload_doc = doc["payload"]
    else:
        payload_doc = {k: v for k, v in doc.items() if k not in envelope_keys}
    payload = _payload_from_doc(kind, payload_doc)
    record_id = doc.get("record_id") or derive_record_id(
        kind.value,
        format_instant(timestamp),
        json.dumps(_payload_to_doc(payload), sort_keys=True),
    )
    return RawRecord(
        record_id=record_id,
        source_kind=kind,
        project=doc.get("project", "default"),
        timestamp=timestamp,
        payload=payload,
    )
