"""Assessed-metric computation: the extractor catalog and the windowed
evaluation that turns raw records into one normalized value per metric.

The single aggregation rule is: a metric's value is the mean of the
per-entity utilities. Step utilities therefore recover "proportion of good
entities"; linear utilities give graded scores. Scalar extractors apply the
utility to one base value computed over the whole window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Optional, Sequence

from .model import (
    IDENTITY_UTILITY,
    MetricDef,
    PiecewiseLinear,
    Step,
    UtilityFunction,
    evaluate_utility,
)
from .records import (
    CommitRecord,
    FileMeasure,
    Issue,
    IssueStatus,
    IssueType,
    LogEntry,
    LogLevel,
    RawRecord,
    SourceKind,
    TestRun,
)
from .store import EPOCH, Offender, Window

DEFAULT_TOP_N = 20


class MetricComputeError(ValueError):
    """Records or params handed to a metric computation violate its contract."""


class EntityKind(str, Enum):
    PER_FILE = "per_file"
    PER_COMMIT_WINDOW_FILE = "per_commit_window_file"
    PER_TEST_RUN = "per_test_run"
    SCALAR = "scalar"


@dataclass(frozen=True)
class ExtractorSpec:
    """Catalog entry: how one assessed metric reads its raw records."""

    id: str
    entity: EntityKind
    source_kind: SourceKind
    description: str
    default_utility: Callable[[Mapping], UtilityFunction]
    required_params: tuple[str, ...] = ()
    defaults: Mapping[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class MetricValue:
    """One assessed metric over one window, with the actual values kept visible."""

    metric_id: str
    value: Optional[float]
    n_entities: int
    raw_summary: Mapping[str, float]
    offenders: tuple[Offender, ...] = ()


def merged_params(spec: ExtractorSpec, params: Mapping[str, object]) -> dict:
    merged = dict(spec.defaults)
    merged.update(params)
    return merged


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def _mean(values: Sequence[float]) -> float:
    return _clamp01(sum(values) / len(values))


def _round2(x: float) -> float:
    return round(x, 2)


# --- catalog -----------------------------------------------------------------


def _u_step_complexity(params: Mapping) -> UtilityFunction:
    return Step(threshold=float(params.get("complexity_limit", 10)), below=1.0, at_or_above=0.0)


def _u_comment_band(params: Mapping) -> UtilityFunction:
    low = float(params.get("band_low_pct", 10))
    high = float(params.get("band_high_pct", 30))
    return PiecewiseLinear(((0.0, 0.0), (low, 1.0), (high, 1.0), (100.0, 0.0)))


def _u_step_duplication(params: Mapping) -> UtilityFunction:
    return Step(threshold=float(params["dup_threshold_pct"]), below=1.0, at_or_above=0.0)


def _u_step_one(params: Mapping) -> UtilityFunction:
    return Step(threshold=1.0, below=1.0, at_or_above=0.0)


def _u_step_changes(params: Mapping) -> UtilityFunction:
    return Step(threshold=float(params["change_limit"]), below=1.0, at_or_above=0.0)


def _u_identity(params: Mapping) -> UtilityFunction:
    return IDENTITY_UTILITY


def _u_step_duration(params: Mapping) -> UtilityFunction:
    return Step(threshold=float(params["duration_limit_sec"]), below=1.0, at_or_above=0.0)


def _u_coverage(params: Mapping) -> UtilityFunction:
    return PiecewiseLinear(((0.0, 0.0), (float(params["target_pct"]), 1.0)))


def _u_errors(params: Mapping) -> UtilityFunction:
    return PiecewiseLinear(((0.0, 1.0), (float(params["max_errors"]), 0.0)))


def _u_availability(params: Mapping) -> UtilityFunction:
    return PiecewiseLinear(((float(params["floor_pct"]), 0.0), (float(params["goal_pct"]), 1.0)))


CATALOG: dict[str, ExtractorSpec] = {
    spec.id: spec
    for spec in (
        ExtractorSpec(
            id="non_complex_files",
            entity=EntityKind.PER_FILE,
            source_kind=SourceKind.FILE_MEASURE,
            description="Files whose mean cyclomatic complexity per function stays below the limit.",
            default_utility=_u_step_complexity,
            defaults={"complexity_limit": 10},
        ),
        ExtractorSpec(
            id="commented_files",
            entity=EntityKind.PER_FILE,
            source_kind=SourceKind.FILE_MEASURE,
            description="Files whose comment density sits inside the healthy band.",
            default_utility=_u_comment_band,
            defaults={"band_low_pct": 10, "band_high_pct": 30},
        ),
        ExtractorSpec(
            id="absence_of_duplications",
            entity=EntityKind.PER_FILE,
            source_kind=SourceKind.FILE_MEASURE,
            description="Files below the duplicated-line percentage threshold.",
            default_utility=_u_step_duplication,
            defaults={"dup_threshold_pct": 5},
        ),
        ExtractorSpec(
            id="fulfillment_critical_blocker_rules",
            entity=EntityKind.PER_FILE,
            source_kind=SourceKind.FILE_MEASURE,
            description="Files without critical or blocker quality rule violations.",
            default_utility=_u_step_one,
        ),
        ExtractorSpec(
            id="highly_changed_files",
            entity=EntityKind.PER_COMMIT_WINDOW_FILE,
            source_kind=SourceKind.COMMIT,
            description="Touched files changed in fewer commits than the stability limit.",
            default_utility=_u_step_changes,
            defaults={"change_limit": 5},
        ),
        ExtractorSpec(
            id="passed_tests",
            entity=EntityKind.PER_TEST_RUN,
            source_kind=SourceKind.TEST_RUN,
            description="Unit-test success density per run, skipped tests excluded.",
            default_utility=_u_identity,
        ),
        ExtractorSpec(
            id="fast_test_builds",
            entity=EntityKind.PER_TEST_RUN,
            source_kind=SourceKind.TEST_RUN,
            description="Test runs finishing below the duration limit.",
            default_utility=_u_step_duration,
            defaults={"duration_limit_sec": 300},
        ),
        ExtractorSpec(
            id="test_coverage",
            entity=EntityKind.PER_FILE,
            source_kind=SourceKind.FILE_MEASURE,
            description="Line coverage per file scored against the coverage target.",
            default_utility=_u_coverage,
            defaults={"target_pct": 80},
        ),
        ExtractorSpec(
            id="non_bug_density",
            entity=EntityKind.SCALAR,
            source_kind=SourceKind.ISSUE,
            description="One minus the share of open bugs among the window's issues.",
            default_utility=_u_identity,
            defaults={"open_statuses": ["open", "in_progress"]},
        ),
        ExtractorSpec(
            id="errors_at_runtime",
            entity=EntityKind.SCALAR,
            source_kind=SourceKind.LOG_ENTRY,
            description="Count of fatal/error log entries, scored down to zero at the cap.",
            default_utility=_u_errors,
            defaults={"max_errors": 10},
        ),
        ExtractorSpec(
            id="availability_uptime",
            entity=EntityKind.SCALAR,
            source_kind=SourceKind.AVAILABILITY_SAMPLE,
            description="Uptime percentage scored between a floor and a goal.",
            default_utility=_u_availability,
            defaults={"floor_pct": 99.0, "goal_pct": 99.9},
        ),
        ExtractorSpec(
            id="feature_usage",
            entity=EntityKind.SCALAR,
            source_kind=SourceKind.USAGE_EVENT,
            description="Share of cataloged features actually used in the window.",
            default_utility=_u_identity,
            required_params=("feature_catalog",),
        ),
        ExtractorSpec(
            id="resolved_issues_dated",
            entity=EntityKind.SCALAR,
            source_kind=SourceKind.ISSUE,
            description="Share of the window's resolved issues tied to a date, iteration, or release.",
            default_utility=_u_identity,
        ),
        ExtractorSpec(
            id="issues_completely_specified",
            entity=EntityKind.SCALAR,
            source_kind=SourceKind.ISSUE,
            description="One minus the share of issues missing any required field.",
            default_utility=_u_identity,
            defaults={"required_fields": ["description", "due_date", "assignee", "estimate_hours"]},
        ),
    )
}

# Issue extractors decide membership on payload fields, so their raw fetch
# must reach back before the window start.
MEMBERSHIP_WINDOWED = frozenset(
    {"non_bug_density", "resolved_issues_dated", "issues_completely_specified"}
)


def fetch_window(defn: MetricDef, window: Window) -> Window:
    """The raw-record query window a metric needs for an assessment window."""
    if defn.extractor in MEMBERSHIP_WINDOWED:
        return Window(EPOCH, window.end)
    return window


# --- entity helpers ------------------------------------------------------------


def latest_file_measures(records: Sequence[RawRecord]) -> list[tuple[RawRecord, FileMeasure]]:
    """Latest measure per path; analysis exports are state, not events."""
    latest: dict[str, tuple[RawRecord, FileMeasure]] = {}
    for record in records:
        measure = record.payload
        assert isinstance(measure, FileMeasure)
        current = latest.get(measure.path)
        if current is None or record.timestamp >= current[0].timestamp:
            latest[measure.path] = (record, measure)
    return [latest[path] for path in sorted(latest)]


def latest_issue_versions(records: Sequence[RawRecord]) -> list[Issue]:
    """Latest version per issue_id (highest updated, then envelope timestamp)."""
    latest: dict[str, tuple[RawRecord, Issue]] = {}
    for record in records:
        issue = record.payload
        assert isinstance(issue, Issue)
        current = latest.get(issue.issue_id)
        if current is None or (issue.updated, record.timestamp) >= (
            current[1].updated,
            current[0].timestamp,
        ):
            latest[issue.issue_id] = (record, issue)
    return [latest[key][1] for key in sorted(latest)]


def _check_kinds(records: Sequence[RawRecord], kind: SourceKind) -> None:
    for record in records:
        if record.source_kind is not kind:
            raise MetricComputeError(
                f"expected {kind.value} records, got {record.source_kind.value}"
            )


def _sorted_offenders(
    scored: list[tuple[str, float, float]], top_n: int
) -> tuple[Offender, ...]:
    """Offenders = entities scoring below 1, worst first, capped at top_n."""
    offending = [(e, b, u) for e, b, u in scored if u < 1.0]
    offending.sort(key=lambda t: (t[2], -t[1], t[0]))
    return tuple(Offender(entity=e, base_value=b, utility=u) for e, b, u in offending[:top_n])


def _no_data(metric_id: str, raw_summary: Optional[dict] = None) -> MetricValue:
    return MetricValue(
        metric_id=metric_id, value=None, n_entities=0, raw_summary=raw_summary or {}
    )


# --- the main entry point -------------------------------------------------------


def compute_assessed_metric(
    defn: MetricDef, records: Sequence[RawRecord], window: Window
) -> MetricValue:
    """Evaluate one metric over its windowed raw records.

    `records` must already be restricted to the metric's source kind and to
    fetch_window(defn, window); membership-windowed extractors filter further
    on payload fields. Zero usable records yields a no-data value.
    """
    spec = CATALOG.get(defn.extractor)
    if spec is None:
        raise MetricComputeError(f"unknown extractor {defn.extractor!r}")
    _check_kinds(records, spec.source_kind)
    params = merged_params(spec, defn.params)
    for key in spec.required_params:
        if key not in params:
            raise MetricComputeError(f"{defn.id}: missing required param {key!r}")

    if spec.entity is EntityKind.PER_COMMIT_WINDOW_FILE:
        return compute_highly_changed(
            records, change_limit=float(params["change_limit"]), metric_id=defn.id,
            utility=defn.utility, top_n=int(params.get("top_n", DEFAULT_TOP_N)),
        )
    if spec.entity is EntityKind.SCALAR:
        return _compute_scalar(defn, spec, params, records, window)
    return _compute_entity_metric(defn, spec, params, records)


# --- entity-based metrics -------------------------------------------------------


def _file_base(extractor: str, measure: FileMeasure) -> Optional[float]:
    if extractor == "non_complex_files":
        return measure.mean_complexity
    if extractor == "commented_files":
        return measure.comment_density_pct
    if extractor == "absence_of_duplications":
        return measure.duplication_pct
    if extractor == "fulfillment_critical_blocker_rules":
        return float(measure.critical_or_blocker_count)
    if extractor == "test_coverage":
        return measure.line_coverage
    raise MetricComputeError(f"no per-file base value for {extractor!r}")


def _run_base(extractor: str, run: TestRun) -> Optional[float]:
    if extractor == "passed_tests":
        return run.success_density
    if extractor == "fast_test_builds":
        return run.duration_sec
    raise MetricComputeError(f"no per-run base value for {extractor!r}")


def _compute_entity_metric(
    defn: MetricDef, spec: ExtractorSpec, params: Mapping, records: Sequence[RawRecord]
) -> MetricValue:
    top_n = int(params.get("top_n", DEFAULT_TOP_N))
    scored: list[tuple[str, float, float]] = []

    if spec.entity is EntityKind.PER_FILE:
        pairs = latest_file_measures(records)
        for record, measure in pairs:
            base = _file_base(defn.extractor, measure)
            if base is None:
                continue
            scored.append((measure.path, base, evaluate_utility(defn.utility, base)))
        summary = _file_summary(defn.extractor, [m for _, m in pairs], scored)
    else:  # per test run
        for record in records:
            run = record.payload
            assert isinstance(run, TestRun)
            base = _run_base(defn.extractor, run)
            if base is None:
                continue
            entity = f"{run.build_id} {record.timestamp:%Y-%m-%d %H:%M}"
            scored.append((entity, base, evaluate_utility(defn.utility, base)))
        summary = _run_summary(defn.extractor, [r.payload for r in records], scored)

    if not scored:
        return _no_data(defn.id, summary)
    return MetricValue(
        metric_id=defn.id,
        value=_mean([u for _, _, u in scored]),
        n_entities=len(scored),
        raw_summary=summary,
        offenders=_sorted_offenders(scored, top_n),
    )


def _file_summary(
    extractor: str, measures: Sequence[FileMeasure], scored: Sequence[tuple[str, float, float]]
) -> dict:
    summary: dict = {"files": len(measures)}
    bases = [b for _, b, _ in scored]
    if not bases:
        return summary
    if extractor == "non_complex_files":
        summary["mean_complexity"] = _round2(sum(bases) / len(bases))
        summary["max_complexity"] = _round2(max(bases))
        summary["files_over_limit"] = sum(1 for _, _, u in scored if u < 1.0)
    elif extractor == "commented_files":
        summary["mean_density_pct"] = _round2(sum(bases) / len(bases))
        summary["min_density_pct"] = _round2(min(bases))
        summary["max_density_pct"] = _round2(max(bases))
        summary["files_outside_band"] = sum(1 for _, _, u in scored if u < 1.0)
    elif extractor == "absence_of_duplications":
        summary["mean_duplication_pct"] = _round2(sum(bases) / len(bases))
        summary["max_duplication_pct"] = _round2(max(bases))
        summary["files_over_threshold"] = sum(1 for _, _, u in scored if u < 1.0)
    elif extractor == "fulfillment_critical_blocker_rules":
        summary["files_with_critical_or_blocker"] = sum(1 for b in bases if b >= 1)
        summary["critical_or_blocker_violations"] = int(sum(bases))
    elif extractor == "test_coverage":
        summary["files_with_coverage"] = len(bases)
        summary["mean_line_coverage_pct"] = _round2(sum(bases) / len(bases))
        summary["min_line_coverage_pct"] = _round2(min(bases))
    return summary


def _run_summary(
    extractor: str, runs: Sequence[TestRun], scored: Sequence[tuple[str, float, float]]
) -> dict:
    summary: dict = {"runs": len(runs)}
    if not runs:
        return summary
    if extractor == "passed_tests":
        summary["total_tests"] = sum(r.total for r in runs)
        summary["failures"] = sum(r.failures for r in runs)
        summary["errors"] = sum(r.errors for r in runs)
        summary["skipped"] = sum(r.skipped for r in runs)
    else:
        durations = [r.duration_sec for r in runs]
        summary["mean_duration_sec"] = _round2(sum(durations) / len(durations))
        summary["max_duration_sec"] = _round2(max(durations))
        summary["slow_runs"] = sum(1 for _, _, u in scored if u < 1.0)
    return summary


def compute_highly_changed(
    records: Sequence[RawRecord],
    change_limit: float,
    metric_id: str = "highly_changed_files",
    utility: Optional[UtilityFunction] = None,
    top_n: int = DEFAULT_TOP_N,
) -> MetricValue:
    """Share of touched files changed in fewer than change_limit commits.

    Offenders are the files at or over the limit, most-changed first.
    """
    _check_kinds(records, SourceKind.COMMIT)
    if utility is None:
        utility = Step(threshold=change_limit, below=1.0, at_or_above=0.0)
    counts: dict[str, int] = {}
    revisions: set[str] = set()
    for record in records:
        commit = record.payload
        assert isinstance(commit, CommitRecord)
        if commit.revision in revisions:
            continue
        revisions.add(commit.revision)
        for change in {f.path for f in commit.files}:
            counts[change] = counts.get(change, 0) + 1
    if not counts:
        return _no_data(metric_id, {"commits": len(revisions), "touched_files": 0})
    scored = [
        (path, float(n), evaluate_utility(utility, float(n))) for path, n in sorted(counts.items())
    ]
    summary = {
        "commits": len(revisions),
        "touched_files": len(counts),
        "highly_changed_files": sum(1 for _, _, u in scored if u < 1.0),
        "max_changes": max(counts.values()),
    }
    return MetricValue(
        metric_id=metric_id,
        value=_mean([u for _, _, u in scored]),
        n_entities=len(scored),
        raw_summary=summary,
        offenders=_sorted_offenders(scored, top_n),
    )


# --- scalar metrics --------------------------------------------------------------


def _compute_scalar(
    defn: MetricDef,
    spec: ExtractorSpec,
    params: Mapping,
    records: Sequence[RawRecord],
    window: Window,
) -> MetricValue:
    top_n = int(params.get("top_n", DEFAULT_TOP_N))
    if defn.extractor == "non_bug_density":
        return compute_non_bug_density(
            records, window, metric_id=defn.id, utility=defn.utility,
            open_statuses=params["open_statuses"], top_n=top_n,
        )
    if defn.extractor == "errors_at_runtime":
        return _compute_runtime_errors(defn, records, top_n)
    if defn.extractor == "availability_uptime":
        return compute_availability(
            records,
            floor_pct=float(params["floor_pct"]),
            goal_pct=float(params["goal_pct"]),
            metric_id=defn.id,
            utility=defn.utility,
        )
    if defn.extractor == "feature_usage":
        return _compute_feature_usage(defn, params, records, top_n)
    if defn.extractor == "resolved_issues_dated":
        return _compute_resolved_dated(defn, records, window, top_n)
    if defn.extractor == "issues_completely_specified":
        return _compute_completeness(defn, params, records, window, top_n)
    raise MetricComputeError(f"no scalar computation for {defn.extractor!r}")


def _member_issues(records: Sequence[RawRecord], window: Window) -> list[Issue]:
    """Latest issue versions created or updated inside the window."""
    return [
        issue
        for issue in latest_issue_versions(records)
        if window.contains(issue.created) or window.contains(issue.updated)
    ]


def compute_non_bug_density(
    records: Sequence[RawRecord],
    window: Window,
    metric_id: str = "non_bug_density",
    utility: UtilityFunction = IDENTITY_UTILITY,
    open_statuses: Sequence[str] = ("open", "in_progress"),
    top_n: int = DEFAULT_TOP_N,
) -> MetricValue:
    """1 - openBugs/total over the window's issues; no issues means no data."""
    _check_kinds(records, SourceKind.ISSUE)
    issues = _member_issues(records, window)
    if not issues:
        return _no_data(metric_id, {"issues": 0})
    open_set = {IssueStatus(s) for s in open_statuses}
    open_bugs = [
        i for i in issues if i.issue_type is IssueType.BUG and i.status in open_set
    ]
    base = 1.0 - len(open_bugs) / len(issues)
    offenders = _sorted_offenders([(i.issue_id, 1.0, 0.0) for i in open_bugs], top_n)
    return MetricValue(
        metric_id=metric_id,
        value=_clamp01(evaluate_utility(utility, base)),
        n_entities=len(issues),
        raw_summary={"issues": len(issues), "open_bugs": len(open_bugs)},
        offenders=offenders,
    )


def _compute_runtime_errors(
    defn: MetricDef, records: Sequence[RawRecord], top_n: int
) -> MetricValue:
    _check_kinds(records, SourceKind.LOG_ENTRY)
    if not records:
        return _no_data(defn.id, {"log_entries": 0})
    severe = (LogLevel.FATAL, LogLevel.ERROR)
    per_file: dict[str, int] = {}
    error_count = 0
    for record in records:
        entry = record.payload
        assert isinstance(entry, LogEntry)
        if entry.level in severe:
            error_count += 1
            key = entry.source_file or "(unknown)"
            per_file[key] = per_file.get(key, 0) + 1
    scored = [(path, float(n), 0.0) for path, n in sorted(per_file.items())]
    return MetricValue(
        metric_id=defn.id,
        value=_clamp01(evaluate_utility(defn.utility, float(error_count))),
        n_entities=len(records),
        raw_summary={"log_entries": len(records), "error_count": error_count},
        offenders=_sorted_offenders(scored, top_n),
    )


def compute_availability(
    records: Sequence[RawRecord],
    floor_pct: float = 99.0,
    goal_pct: float = 99.9,
    metric_id: str = "availability_uptime",
    utility: Optional[UtilityFunction] = None,
) -> MetricValue:
    """Uptime percentage scored linearly between floor (0) and goal (1).

    The raw summary carries the uptime percentage and, when at least two
    recoveries happened, the mean gap in seconds between successive down-to-up
    transitions.
    """
    _check_kinds(records, SourceKind.AVAILABILITY_SAMPLE)
    if not records:
        return _no_data(metric_id, {"samples": 0})
    if utility is None:
        utility = PiecewiseLinear(((floor_pct, 0.0), (goal_pct, 1.0)))
    ordered = sorted(records, key=lambda r: r.timestamp)
    ups = sum(1 for r in ordered if r.payload.up)
    uptime_pct = 100.0 * ups / len(ordered)
    summary: dict = {
        "samples": len(ordered),
        "up_samples": ups,
        "uptime_pct": _round2(uptime_pct),
    }
    recoveries = [
        curr.timestamp
        for prev, curr in zip(ordered, ordered[1:])
        if not prev.payload.up and curr.payload.up
    ]
    if len(recoveries) >= 2:
        gaps = [
            (b - a).total_seconds() for a, b in zip(recoveries, recoveries[1:])
        ]
        summary["mean_time_between_failures_sec"] = _round2(sum(gaps) / len(gaps))
    return MetricValue(
        metric_id=metric_id,
        value=_clamp01(evaluate_utility(utility, uptime_pct)),
        n_entities=len(ordered),
        raw_summary=summary,
    )


def _compute_feature_usage(
    defn: MetricDef, params: Mapping, records: Sequence[RawRecord], top_n: int
) -> MetricValue:
    _check_kinds(records, SourceKind.USAGE_EVENT)
    catalog = list(params["feature_catalog"])
    if not records or not catalog:
        return _no_data(defn.id, {"events": len(records), "catalog_features": len(catalog)})
    used = {r.payload.feature for r in records}
    covered = [f for f in catalog if f in used]
    base = len(covered) / len(catalog)
    unused = [(f, 0.0, 0.0) for f in catalog if f not in used]
    return MetricValue(
        metric_id=defn.id,
        value=_clamp01(evaluate_utility(defn.utility, base)),
        n_entities=len(records),
        raw_summary={
            "events": len(records),
            "catalog_features": len(catalog),
            "used_features": len(covered),
        },
        offenders=_sorted_offenders(unused, top_n),
    )


def _compute_resolved_dated(
    defn: MetricDef, records: Sequence[RawRecord], window: Window, top_n: int
) -> MetricValue:
    _check_kinds(records, SourceKind.ISSUE)
    resolved = [
        issue
        for issue in latest_issue_versions(records)
        if issue.resolved is not None and window.contains(issue.resolved)
    ]
    if not resolved:
        return _no_data(defn.id, {"resolved_issues": 0})
    def has_date(issue: Issue) -> bool:
        return issue.due_date is not None or bool(issue.iteration) or bool(issue.release)

    dated = [i for i in resolved if has_date(i)]
    undated = [i for i in resolved if not has_date(i)]
    base = len(dated) / len(resolved)
    return MetricValue(
        metric_id=defn.id,
        value=_clamp01(evaluate_utility(defn.utility, base)),
        n_entities=len(resolved),
        raw_summary={"resolved_issues": len(resolved), "dated_issues": len(dated)},
        offenders=_sorted_offenders([(i.issue_id, 1.0, 0.0) for i in undated], top_n),
    )


def _compute_completeness(
    defn: MetricDef,
    params: Mapping,
    records: Sequence[RawRecord],
    window: Window,
    top_n: int,
) -> MetricValue:
    _check_kinds(records, SourceKind.ISSUE)
    issues = _member_issues(records, window)
    if not issues:
        return _no_data(defn.id, {"issues": 0})
    required = list(params["required_fields"])
    incomplete: list[tuple[str, float, float]] = []
    for issue in issues:
        missing = [name for name in required if getattr(issue, name, None) in (None, "")]
        if missing:
            incomplete.append((issue.issue_id, float(len(missing)), 0.0))
    base = 1.0 - len(incomplete) / len(issues)
    return MetricValue(
        metric_id=defn.id,
        value=_clamp01(evaluate_utility(defn.utility, base)),
        n_entities=len(issues),
        raw_summary={"issues": len(issues), "incomplete_issues": len(incomplete)},
        offenders=_sorted_offenders(incomplete, top_n),
    )
