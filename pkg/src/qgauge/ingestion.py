"""Parsers turning native developer-tool export formats into canonical
raw records with deterministic dedup keys.

Every parser is a pure function from input text to a ParseResult: the records
it could read plus warnings for what it had to skip. Formats are documented
in docs/formats.md and exercised by the shipped fixtures.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, Optional

from .records import (
    CommitRecord,
    FileChange,
    FileMeasure,
    Issue,
    IssueStatus,
    IssueType,
    LogEntry,
    LogLevel,
    RawRecord,
    RecordError,
    RuleViolation,
    Severity,
    SourceKind,
    TestRun,
    ViolationType,
    derive_record_id,
    parse_instant,
    record_from_doc,
)


class IngestError(ValueError):
    """The input container itself is unusable (not just single bad entries)."""


@dataclass
class ParseResult:
    records: list[RawRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def warn(self, message: str) -> None:
        self.warnings.append(message)


# --- test reports (JUnit-style XML) ------------------------------------------


def parse_test_report_xml(
    text: str,
    project: str = "default",
    build_id: Optional[str] = None,
    default_timestamp: Optional[datetime] = None,
) -> ParseResult:
    """One TestRun per <testsuite>; totals map straight off the attributes.

    The dedup key hashes build id, suite name, and suite timestamp. Suites
    missing a mandatory attribute are skipped with a warning.
    """
    result = ParseResult()
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise IngestError(f"malformed XML: {exc}") from exc

    if root.tag == "testsuite":
        suites = [root]
    elif root.tag == "testsuites":
        suites = list(root.iter("testsuite"))
    else:
        raise IngestError(f"expected testsuites/testsuite root, got <{root.tag}>")

    effective_build = build_id or root.get("name") or "build"
    for suite in suites:
        name = suite.get("name", "")
        try:
            total = int(suite.attrib["tests"])
            failures = int(suite.get("failures", 0))
            errors = int(suite.get("errors", 0))
            skipped = int(suite.get("skipped", 0))
            duration = float(suite.get("time", 0.0))
        except KeyError as exc:
            result.warn(f"testsuite {name!r}: missing attribute {exc}, skipped")
            continue
        except ValueError as exc:
            result.warn(f"testsuite {name!r}: bad attribute value ({exc}), skipped")
            continue
        ts_text = suite.get("timestamp")
        if ts_text:
            try:
                timestamp = parse_instant(ts_text)
            except RecordError as exc:
                result.warn(f"testsuite {name!r}: {exc}, skipped")
                continue
        elif default_timestamp is not None:
            timestamp = default_timestamp
        else:
            result.warn(f"testsuite {name!r}: no timestamp attribute and no default, skipped")
            continue
        try:
            payload = TestRun(
                build_id=effective_build,
                total=total,
                errors=errors,
                failures=failures,
                skipped=skipped,
                duration_sec=duration,
            )
        except RecordError as exc:
            result.warn(f"testsuite {name!r}: {exc}, skipped")
            continue
        result.records.append(
            RawRecord(
                record_id=derive_record_id(effective_build, name, timestamp.isoformat()),
                source_kind=SourceKind.TEST_RUN,
                project=project,
                timestamp=timestamp,
                payload=payload,
            )
        )
    return result


# --- commit logs with numstat lines --------------------------------------------

_NUMSTAT_RE = re.compile(r"^(-|\d+)\t(-|\d+)\t(.+)$")


def parse_commit_log(text: str, project: str = "default") -> ParseResult:
    """Commit blocks: `commit <rev>` / `author <name>` / `date <iso>` headers
    followed by tab-separated `added<TAB>deleted<TAB>path` lines.

    Binary markers (`-`) become zero line counts. The revision is the dedup key.
    """
    result = ParseResult()
    blocks: list[list[str]] = []
    current: list[str] = []
    for line in text.splitlines():
        if line.startswith("commit "):
            if current:
                blocks.append(current)
            current = [line]
        elif current:
            current.append(line)
        elif line.strip():
            result.warn(f"ignoring line before first commit header: {line.strip()!r}")
    if current:
        blocks.append(current)

    for block in blocks:
        revision = block[0][len("commit "):].strip()
        author = ""
        date: Optional[datetime] = None
        files: list[FileChange] = []
        bad = False
        for line in block[1:]:
            if line.startswith("author "):
                author = line[len("author "):].strip()
            elif line.startswith("date "):
                try:
                    date = parse_instant(line[len("date "):].strip())
                except RecordError as exc:
                    result.warn(f"commit {revision}: {exc}, skipped")
                    bad = True
                    break
            elif not line.strip():
                continue
            else:
                match = _NUMSTAT_RE.match(line)
                if not match:
                    result.warn(f"commit {revision}: unparseable line {line.strip()!r}, skipped")
                    bad = True
                    break
                added, deleted, path = match.groups()
                files.append(
                    FileChange(
                        path=path,
                        lines_added=0 if added == "-" else int(added),
                        lines_deleted=0 if deleted == "-" else int(deleted),
                    )
                )
        if bad:
            continue
        if not revision or date is None:
            result.warn(f"commit block missing revision or date (rev={revision!r}), skipped")
            continue
        result.records.append(
            RawRecord(
                record_id=revision,
                source_kind=SourceKind.COMMIT,
                project=project,
                timestamp=date,
                payload=CommitRecord(revision=revision, author=author, files=tuple(files)),
            )
        )
    return result


# --- static-analysis JSON exports ------------------------------------------------


def parse_static_analysis_export(text: str, project: str = "default") -> ParseResult:
    """Per-file measures from a static-analysis JSON export.

    Accepts {"analysis_timestamp": ..., "files": [...]} or a bare array whose
    entries each carry an analysis_timestamp. Dedup key hashes the analysis
    timestamp and the path, so re-analyses produce new records.
    """
    result = ParseResult()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(f"bad JSON: line {exc.lineno}: {exc.msg}") from exc

    if isinstance(doc, dict):
        entries = doc.get("files", [])
        shared_ts = doc.get("analysis_timestamp")
    elif isinstance(doc, list):
        entries = doc
        shared_ts = None
    else:
        raise IngestError("export must be an object with a files array, or an array")

    for index, entry in enumerate(entries):
        where = f"entry {index} ({entry.get('path', '?') if isinstance(entry, dict) else '?'})"
        if not isinstance(entry, dict):
            result.warn(f"{where}: not an object, skipped")
            continue
        ts_text = entry.get("analysis_timestamp", shared_ts)
        if not ts_text:
            result.warn(f"{where}: no analysis_timestamp, skipped")
            continue
        try:
            timestamp = parse_instant(str(ts_text))
            violations = tuple(
                RuleViolation(
                    rule=str(v.get("rule", "")),
                    severity=Severity(v["severity"]),
                    type=ViolationType(v.get("type", "code_smell")),
                )
                for v in entry.get("violations", [])
            )
            payload = FileMeasure(
                path=entry["path"],
                loc=int(entry["loc"]),
                comment_lines=int(entry["comment_lines"]),
                duplicated_lines=int(entry.get("duplicated_lines", 0)),
                function_complexities=tuple(
                    int(c) for c in entry.get("function_complexities", [])
                ),
                violations=violations,
                line_coverage=(
                    float(entry["line_coverage"]) if entry.get("line_coverage") is not None else None
                ),
                condition_coverage=(
                    float(entry["condition_coverage"])
                    if entry.get("condition_coverage") is not None
                    else None
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            result.warn(f"{where}: {exc}, skipped")
            continue
        result.records.append(
            RawRecord(
                record_id=derive_record_id(timestamp.isoformat(), payload.path),
                source_kind=SourceKind.FILE_MEASURE,
                project=project,
                timestamp=timestamp,
                payload=payload,
            )
        )
    return result


# --- issue-tracker CSV exports -----------------------------------------------------

ISSUE_CSV_COLUMNS = (
    "issue_id", "type", "status", "created", "updated", "resolved",
    "iteration", "release", "due_date", "assignee", "estimate_hours", "description",
)

_STATUS_ALIASES = {
    "open": IssueStatus.OPEN,
    "in_progress": IssueStatus.IN_PROGRESS,
    "in progress": IssueStatus.IN_PROGRESS,
    "done": IssueStatus.DONE,
    "closed": IssueStatus.DONE,
    "resolved": IssueStatus.DONE,
}

_TYPE_ALIASES = {
    "bug": IssueType.BUG,
    "maintenance": IssueType.MAINTENANCE,
    "task": IssueType.MAINTENANCE,
    "feature": IssueType.FEATURE,
    "story": IssueType.FEATURE,
}


def parse_issue_csv(text: str, project: str = "default") -> ParseResult:
    """One Issue per data row; the header row names the columns.

    Unknown columns are ignored (trackers differ wildly), empty cells become
    absent optional fields, and rows with unusable mandatory fields are
    skipped with a warning. The dedup key hashes issue_id and updated, so a
    later export of the same issue adds a version instead of being dropped.
    """
    import csv
    import io

    result = ParseResult()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("empty CSV") from None
    columns = [c.strip().lower() for c in header]
    if "issue_id" not in columns:
        raise IngestError("CSV header must name an issue_id column")

    def cell(row: list[str], name: str) -> Optional[str]:
        try:
            index = columns.index(name)
        except ValueError:
            return None
        if index >= len(row):
            return None
        value = row[index].strip()
        return value or None

    for line_no, row in enumerate(reader, start=2):
        if not any(c.strip() for c in row):
            continue
        try:
            issue_id = cell(row, "issue_id")
            created_text = cell(row, "created")
            updated_text = cell(row, "updated")
            status_text = cell(row, "status")
            type_text = cell(row, "type") or cell(row, "issue_type")
            if not all((issue_id, created_text, updated_text, status_text, type_text)):
                raise RecordError("missing mandatory field")
            estimate = cell(row, "estimate_hours")
            payload = Issue(
                issue_id=issue_id,
                issue_type=_TYPE_ALIASES.get(type_text.lower(), IssueType.OTHER),
                status=_STATUS_ALIASES.get(status_text.lower(), IssueStatus.OTHER),
                created=parse_instant(created_text),
                updated=parse_instant(updated_text),
                resolved=parse_instant(cell(row, "resolved")) if cell(row, "resolved") else None,
                iteration=cell(row, "iteration"),
                release=cell(row, "release"),
                due_date=parse_instant(cell(row, "due_date")) if cell(row, "due_date") else None,
                assignee=cell(row, "assignee"),
                estimate_hours=float(estimate) if estimate else None,
                description=cell(row, "description"),
            )
        except (RecordError, ValueError) as exc:
            result.warn(f"row {line_no}: {exc}, skipped")
            continue
        result.records.append(
            RawRecord(
                record_id=derive_record_id(payload.issue_id, payload.updated.isoformat()),
                source_kind=SourceKind.ISSUE,
                project=project,
                timestamp=payload.updated,
                payload=payload,
            )
        )
    return result


# --- plain-text logs ------------------------------------------------------------

DEFAULT_LOG_PATTERN = (
    r"^(?P<timestamp>\S+)\s+(?P<level>[A-Za-z]+)\s+"
    r"(?:(?P<file>[^\s:]+):(?P<line>\d+)\s+)?(?P<message>.*)$"
)


@dataclass(frozen=True)
class LogPattern:
    """Regex with named captures {timestamp, level, file?, line?, message}."""

    pattern: str = DEFAULT_LOG_PATTERN
    timestamp_format: str = "iso"

    def __post_init__(self):
        try:
            compiled = re.compile(self.pattern)
        except re.error as exc:
            raise ValueError(f"log pattern does not compile: {exc}") from None
        required = {"timestamp", "level", "message"}
        missing = required - set(compiled.groupindex)
        if missing:
            raise ValueError(f"log pattern missing named captures: {sorted(missing)}")
        object.__setattr__(self, "_compiled", compiled)

    def regex(self) -> re.Pattern:
        return self._compiled  # type: ignore[attr-defined]

    def parse_timestamp(self, text: str) -> datetime:
        if self.timestamp_format == "iso":
            return parse_instant(text)
        from .records import UTC

        dt = datetime.strptime(text, self.timestamp_format)
        return dt.replace(tzinfo=UTC) if dt.tzinfo is None else dt


def parse_log_lines(
    text: str, pattern: Optional[LogPattern] = None, project: str = "default"
) -> ParseResult:
    """One LogEntry per matching line; non-matching lines are counted.

    All levels are kept; filtering down to fatal/error is the metric's job.
    The dedup key hashes timestamp, message, and the line number in the file.
    """
    pattern = pattern or LogPattern()
    regex = pattern.regex()
    result = ParseResult()
    skipped = 0
    total = 0
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        total += 1
        match = regex.match(line)
        if not match:
            skipped += 1
            continue
        try:
            timestamp = pattern.parse_timestamp(match.group("timestamp"))
            level = LogLevel(match.group("level").lower())
        except (RecordError, ValueError):
            skipped += 1
            continue
        file_group = match.groupdict().get("file")
        line_group = match.groupdict().get("line")
        message = match.group("message")
        result.records.append(
            RawRecord(
                record_id=derive_record_id(timestamp.isoformat(), message, line_no),
                source_kind=SourceKind.LOG_ENTRY,
                project=project,
                timestamp=timestamp,
                payload=LogEntry(
                    level=level,
                    message=message,
                    source_file=file_group,
                    source_line=int(line_group) if line_group else None,
                ),
            )
        )
    if skipped:
        result.warn(f"{skipped} line(s) did not match the log pattern")
    if total and not result.records:
        result.warn("pattern matched nothing")
    return result


# --- canonical line-delimited JSON records ------------------------------------------


def ingest_generic_records(text: str, project: str = "default") -> ParseResult:
    """Validated RawRecords from canonical line-delimited JSON.

    Covers usage events, availability samples, and any producer without a
    dedicated parser. Invalid lines are reported with their line numbers.
    """
    result = ParseResult()
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            result.warn(f"line {line_no}: bad JSON ({exc.msg})")
            continue
        if isinstance(doc, dict) and "project" not in doc:
            doc = {**doc, "project": project}
        try:
            result.records.append(record_from_doc(doc))
        except RecordError as exc:
            result.warn(f"line {line_no}: {exc}")
    return result


# --- format registry (shared by CLI and API) -------------------------------------

PARSERS: dict[str, Callable[..., ParseResult]] = {
    "testxml": parse_test_report_xml,
    "commits": parse_commit_log,
    "static": parse_static_analysis_export,
    "issues": parse_issue_csv,
    "logs": parse_log_lines,
    "records": ingest_generic_records,
}


def parse_input(format_name: str, text: str, project: str = "default", **kwargs) -> ParseResult:
    try:
        parser = PARSERS[format_name]
    except KeyError:
        raise IngestError(
            f"unknown format {format_name!r}; expected one of {', '.join(sorted(PARSERS))}"
        ) from None
    return parser(text, project=project, **kwargs)
