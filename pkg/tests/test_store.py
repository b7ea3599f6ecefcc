"""Store: append-only semantics, windowed queries, snapshot round-trips,
durability across close/reopen."""

import hashlib
import json
from datetime import datetime

import pytest
from hypothesis import given, settings, strategies as st

from conftest import at_day, availability_record, issue_record, log_record, window_days
from qgauge.model import Color, Stratum
from qgauge.records import UTC, SourceKind
from qgauge.store import (
    ALL_TIME,
    ElementResult,
    Offender,
    Snapshot,
    Store,
    StoreError,
    new_snapshot_id,
)


def _checksums(store: Store) -> dict:
    sums = {}
    for path in store.file_paths():
        if path.exists():
            sums[path.name] = hashlib.sha256(path.read_bytes()).hexdigest()
    return sums


class TestAppend:
    def test_append_twice_is_idempotent(self, store):
        batch = [issue_record(f"I-{i}", 1, 2) for i in range(5)]
        first = store.append(batch)
        second = store.append(batch)
        assert (first.inserted, first.duplicates) == (5, 0)
        assert (second.inserted, second.duplicates) == (0, 5)
        assert store.raw_count() == 5

    def test_append_empty_batch(self, store):
        result = store.append([])
        assert (result.inserted, result.duplicates) == (0, 0)

    def test_mixed_kinds_queryable_per_kind(self, store):
        store.append(
            [
                issue_record("I-1", 1, 2),
                log_record(1.5),
                availability_record(2.0),
            ]
        )
        assert len(store.query_raw(SourceKind.ISSUE, ALL_TIME)) == 1
        assert len(store.query_raw(SourceKind.LOG_ENTRY, ALL_TIME)) == 1
        assert len(store.query_raw(SourceKind.AVAILABILITY_SAMPLE, ALL_TIME)) == 1

    def test_duplicates_inside_one_batch_collapse(self, store):
        record = issue_record("I-1", 1, 2)
        result = store.append([record, record])
        assert (result.inserted, result.duplicates) == (1, 1)


class TestQueryRaw:
    def test_window_filtering(self, store):
        store.append(
            [issue_record("A", 0.5, 1), issue_record("B", 4, 5), issue_record("C", 19, 20)]
        )
        hits = store.query_raw(SourceKind.ISSUE, window_days(0, 10))
        assert [r.payload.issue_id for r in hits] == ["A", "B"]

    def test_empty_store_returns_nothing(self, store):
        assert store.query_raw(SourceKind.ISSUE, window_days(0, 10)) == []

    def test_boundary_record_at_end_excluded(self, store):
        store.append([log_record(10.0, message="edge")])
        assert store.query_raw(SourceKind.LOG_ENTRY, window_days(0, 10)) == []
        assert len(store.query_raw(SourceKind.LOG_ENTRY, window_days(0, 10.001))) == 1

    def test_boundary_record_at_start_included(self, store):
        store.append([log_record(0.0, message="edge")])
        assert len(store.query_raw(SourceKind.LOG_ENTRY, window_days(0, 1))) == 1

    def test_results_in_timestamp_order(self, store):
        store.append([log_record(3), log_record(1), log_record(2)])
        hits = store.query_raw(SourceKind.LOG_ENTRY, ALL_TIME)
        assert [h.timestamp for h in hits] == sorted(h.timestamp for h in hits)


@settings(max_examples=25, deadline=None)
@given(
    days=st.lists(st.floats(min_value=0, max_value=30), min_size=0, max_size=40),
)
def test_query_completeness_whole_range(tmp_path_factory, days):
    store = Store(tmp_path_factory.mktemp("stores") / "s", project="prop")
    records = [log_record(day, message=f"m{i}") for i, day in enumerate(days)]
    store.append(records)
    hits = store.query_raw(SourceKind.LOG_ENTRY, ALL_TIME)
    assert {h.record_id for h in hits} == {r.record_id for r in records}


def _snapshot(day: float = 3.0) -> Snapshot:
    entries = {
        "non_complex_files": ElementResult(
            element_id="non_complex_files",
            stratum=Stratum.METRIC,
            value=0.5,
            color=Color.ORANGE,
            raw_summary={"files": 4, "mean_complexity": 7.25},
            offenders=(Offender(entity="a.c", base_value=12.0, utility=0.0),),
        ),
        "code_quality": ElementResult(
            element_id="code_quality",
            stratum=Stratum.FACTOR,
            value=0.5,
            color=Color.ORANGE,
            raw_summary={"children": 1, "children_with_data": 1},
        ),
        "maintainability": ElementResult(
            element_id="maintainability",
            stratum=Stratum.ASPECT,
            value=None,
            color=Color.NO_DATA,
            raw_summary={"children": 1, "children_with_data": 0},
        ),
    }
    return Snapshot(
        snapshot_id=new_snapshot_id(),
        evaluated_at=at_day(day),
        window=window_days(0, 3),
        entries=entries,
    )


class TestSnapshots:
    def test_round_trip_deep_equality(self, store):
        snapshot = _snapshot()
        store.save_snapshot(snapshot)
        loaded = store.query_snapshots(window_days(0, 10))
        assert len(loaded) == 1
        assert loaded[0].snapshot_id == snapshot.snapshot_id
        assert loaded[0].evaluated_at == snapshot.evaluated_at
        assert loaded[0].window == snapshot.window
        assert dict(loaded[0].entries) == dict(snapshot.entries)

    def test_narrow_window_selects_one(self, store):
        s1, s2 = _snapshot(day=1.0), _snapshot(day=9.0)
        store.save_snapshot(s1)
        store.save_snapshot(s2)
        inside = store.query_snapshots(window_days(0, 5))
        assert [s.snapshot_id for s in inside] == [s1.snapshot_id]

    def test_element_series_over_history(self, store):
        store.save_snapshot(_snapshot(day=1.0))
        store.save_snapshot(_snapshot(day=2.0))
        series = store.element_series("code_quality")
        assert len(series) == 2
        assert [v for _, v, _ in series] == [0.5, 0.5]
        assert series[0][0] < series[1][0]

    def test_transient_snapshot_refused(self, store):
        import dataclasses

        transient = dataclasses.replace(_snapshot(), transient=True)
        with pytest.raises(StoreError):
            store.save_snapshot(transient)

    def test_latest_snapshot(self, store):
        assert store.latest_snapshot() is None
        s1, s2 = _snapshot(day=1.0), _snapshot(day=2.0)
        store.save_snapshot(s1)
        store.save_snapshot(s2)
        assert store.latest_snapshot().snapshot_id == s2.snapshot_id


class TestDurability:
    def test_close_reopen_preserves_everything(self, tmp_path):
        store = Store(tmp_path / "s", project="p")
        store.append([issue_record("I-1", 1, 2), log_record(1.0)])
        store.save_snapshot(_snapshot())
        sums_before = _checksums(store)
        store.close()

        reopened = Store(tmp_path / "s")
        assert reopened.project == "p"
        assert reopened.raw_count() == 2
        assert len(reopened.query_snapshots()) == 1
        # reads never rewrite: files are bit-identical after reopen + queries
        assert _checksums(reopened) == sums_before

    def test_reopen_then_append_dedups_across_processes(self, tmp_path):
        store = Store(tmp_path / "s")
        store.append([issue_record("I-1", 1, 2)])
        store.close()
        reopened = Store(tmp_path / "s")
        result = reopened.append([issue_record("I-1", 1, 2)])
        assert (result.inserted, result.duplicates) == (0, 1)

    def test_second_handle_sees_fresh_appends(self, tmp_path):
        writer = Store(tmp_path / "s")
        reader = Store(tmp_path / "s")
        writer.append([log_record(1.0)])
        assert reader.raw_count() == 1

    def test_torn_tail_is_ignored_by_readers(self, tmp_path):
        store = Store(tmp_path / "s")
        store.append([log_record(1.0)])
        with open(store.root / "raw.jsonl", "ab") as fh:
            fh.write(b'{"half a record')  # no newline: simulated crash
        fresh = Store(tmp_path / "s")
        assert fresh.raw_count() == 1
        # the writer starts a clean line, so the torn bytes never corrupt a batch
        fresh.append([log_record(2.0)])
        assert Store(tmp_path / "s").raw_count() == 2

    def test_missing_store_without_create(self, tmp_path):
        with pytest.raises(StoreError):
            Store(tmp_path / "nope", create=False)


class TestAlertDocs:
    def test_alert_docs_dedup_on_alert_id(self, store):
        doc = {"alert_id": "a1", "element_id": "x"}
        assert store.append_alert_docs([doc]) == 1
        assert store.append_alert_docs([doc]) == 0
        assert len([d for d in store.read_alert_docs() if "alert_id" in d]) == 1

    def test_ack_appends_instead_of_rewriting(self, store):
        store.append_alert_docs([{"alert_id": "a1"}])
        before = (store.root / "alerts.jsonl").read_bytes()
        store.append_ack_doc("a1", datetime(2018, 1, 5, tzinfo=UTC))
        after = (store.root / "alerts.jsonl").read_bytes()
        assert after.startswith(before)
        assert json.loads(after.splitlines()[-1])["ack"] == "a1"
