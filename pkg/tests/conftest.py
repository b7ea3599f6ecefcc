"""Shared fixtures: record builders, a small valid model, demo fixture access."""

from __future__ import annotations

from datetime import datetime, timedelta

import pytest

from qgauge.demo import fixture_text
from qgauge.model import (
    AspectDef,
    Edge,
    FactorDef,
    MetricDef,
    QualityModel,
    Step,
    parse_model,
)
from qgauge.records import (
    UTC,
    AvailabilitySample,
    CommitRecord,
    FileChange,
    FileMeasure,
    Issue,
    IssueStatus,
    IssueType,
    LogEntry,
    LogLevel,
    RawRecord,
    RuleViolation,
    Severity,
    SourceKind,
    TestRun,
    UsageEvent,
    ViolationType,
)
from qgauge.store import Store, Window

T0 = datetime(2018, 1, 1, tzinfo=UTC)


def at_day(day: float) -> datetime:
    return T0 + timedelta(days=day)


def window_days(start_day: float, end_day: float) -> Window:
    return Window(at_day(start_day), at_day(end_day))


def file_record(
    path: str,
    day: float = 1.0,
    loc: int = 100,
    comment_lines: int = 20,
    duplicated_lines: int = 0,
    complexities: tuple[int, ...] = (2, 4),
    blockers: int = 0,
    criticals: int = 0,
    line_coverage: float | None = None,
    record_id: str | None = None,
) -> RawRecord:
    violations = tuple(
        RuleViolation(rule=f"B{i}", severity=Severity.BLOCKER, type=ViolationType.CODE_SMELL)
        for i in range(blockers)
    ) + tuple(
        RuleViolation(rule=f"C{i}", severity=Severity.CRITICAL, type=ViolationType.BUG)
        for i in range(criticals)
    )
    return RawRecord(
        record_id=record_id or f"fm-{path}-{day}",
        source_kind=SourceKind.FILE_MEASURE,
        project="test",
        timestamp=at_day(day),
        payload=FileMeasure(
            path=path,
            loc=loc,
            comment_lines=comment_lines,
            duplicated_lines=duplicated_lines,
            function_complexities=complexities,
            violations=violations,
            line_coverage=line_coverage,
        ),
    )


def commit_record(revision: str, paths: list[str], day: float = 1.0, author: str = "dev") -> RawRecord:
    return RawRecord(
        record_id=revision,
        source_kind=SourceKind.COMMIT,
        project="test",
        timestamp=at_day(day),
        payload=CommitRecord(
            revision=revision,
            author=author,
            files=tuple(FileChange(path=p, lines_added=1, lines_deleted=0) for p in paths),
        ),
    )


def make_test_run(
    build_id: str,
    day: float = 1.0,
    total: int = 100,
    errors: int = 0,
    failures: int = 0,
    skipped: int = 0,
    duration_sec: float = 60.0,
) -> RawRecord:
    return RawRecord(
        record_id=f"tr-{build_id}-{day}",
        source_kind=SourceKind.TEST_RUN,
        project="test",
        timestamp=at_day(day),
        payload=TestRun(
            build_id=build_id,
            total=total,
            errors=errors,
            failures=failures,
            skipped=skipped,
            duration_sec=duration_sec,
        ),
    )


def issue_record(
    issue_id: str,
    created_day: float,
    updated_day: float,
    status: IssueStatus = IssueStatus.OPEN,
    issue_type: IssueType = IssueType.FEATURE,
    resolved_day: float | None = None,
    due_day: float | None = None,
    iteration: str | None = None,
    release: str | None = None,
    assignee: str | None = None,
    estimate_hours: float | None = None,
    description: str | None = None,
) -> RawRecord:
    updated = at_day(updated_day)
    return RawRecord(
        record_id=f"issue-{issue_id}-{updated_day}",
        source_kind=SourceKind.ISSUE,
        project="test",
        timestamp=updated,
        payload=Issue(
            issue_id=issue_id,
            issue_type=issue_type,
            status=status,
            created=at_day(created_day),
            updated=updated,
            resolved=at_day(resolved_day) if resolved_day is not None else None,
            iteration=iteration,
            release=release,
            due_date=at_day(due_day) if due_day is not None else None,
            assignee=assignee,
            estimate_hours=estimate_hours,
            description=description,
        ),
    )


def log_record(
    day: float, level: LogLevel = LogLevel.INFO, message: str = "m", source_file: str | None = None
) -> RawRecord:
    return RawRecord(
        record_id=f"log-{day}-{level.value}-{message}",
        source_kind=SourceKind.LOG_ENTRY,
        project="test",
        timestamp=at_day(day),
        payload=LogEntry(level=level, message=message, source_file=source_file),
    )


def usage_record(feature: str, day: float) -> RawRecord:
    return RawRecord(
        record_id=f"use-{feature}-{day}",
        source_kind=SourceKind.USAGE_EVENT,
        project="test",
        timestamp=at_day(day),
        payload=UsageEvent(feature=feature, duration_sec=10.0),
    )


def availability_record(day: float, up: bool = True) -> RawRecord:
    return RawRecord(
        record_id=f"avail-{day}",
        source_kind=SourceKind.AVAILABILITY_SAMPLE,
        project="test",
        timestamp=at_day(day),
        payload=AvailabilitySample(up=up),
    )


def tiny_model() -> QualityModel:
    """One aspect, two factors, three metrics; all weights valid."""
    return QualityModel(
        aspects=(AspectDef(id="maintainability", name="Maintainability"),),
        factors=(
            FactorDef(id="code_quality", name="Code Quality"),
            FactorDef(id="blocking_code", name="Blocking Code"),
        ),
        metrics=(
            MetricDef(
                id="non_complex_files",
                name="Non-complex files",
                extractor="non_complex_files",
                source_kind=SourceKind.FILE_MEASURE,
                utility=Step(threshold=10.0, below=1.0, at_or_above=0.0),
            ),
            MetricDef(
                id="fulfillment_critical_blocker_rules",
                name="Rule fulfillment",
                extractor="fulfillment_critical_blocker_rules",
                source_kind=SourceKind.FILE_MEASURE,
                utility=Step(threshold=1.0, below=1.0, at_or_above=0.0),
            ),
            MetricDef(
                id="highly_changed_files",
                name="Highly changed files",
                extractor="highly_changed_files",
                source_kind=SourceKind.COMMIT,
                utility=Step(threshold=5.0, below=1.0, at_or_above=0.0),
                params={"change_limit": 5},
            ),
        ),
        edges=(
            Edge(parent_id="maintainability", child_id="code_quality", weight=0.5),
            Edge(parent_id="maintainability", child_id="blocking_code", weight=0.5),
            Edge(parent_id="code_quality", child_id="non_complex_files", weight=1.0),
            Edge(parent_id="blocking_code", child_id="fulfillment_critical_blocker_rules", weight=0.5),
            Edge(parent_id="blocking_code", child_id="highly_changed_files", weight=0.5),
        ),
        default_window_days=7,
    )


@pytest.fixture
def store(tmp_path) -> Store:
    return Store(tmp_path / "store", project="test")


@pytest.fixture
def demo_model() -> QualityModel:
    return parse_model(fixture_text("model.json"))


@pytest.fixture
def small_model() -> QualityModel:
    return tiny_model()
