import pytest

from mapcheck.c11 import (
    batty_linearization_gap,
    c11_allows,
    compute_hb,
    find_sc_order,
    forced_cycle,
    forced_sc_edges,
)
from mapcheck.corpus import load_sources, source_test
from mapcheck.harness import (
    BugReport,
    Ok,
    SweepError,
    compare,
    default_jobs,
    run_corpus,
    sweep,
)
from mapcheck.hw import hw_allows, hw_consistent
from mapcheck.litmus import MemoryOrder as MO
from mapcheck.mapping import compile_test, mapping_catalog

ORDERS = [MO.ACQUIRE, MO.SEQ_CST]
IRIW_FIRST_LOADS = [("T2", 0), ("T3", 0)]


def test_iriw_trailing_power_is_bug(iriw):
    r = compare(iriw, "trailing-sync-power")
    assert isinstance(r, BugReport)
    assert r.source_verdict.text == "forbidden"
    assert r.target_verdict.text == "allowed"
    assert r.forced_cycle == ["c", "f", "d", "h"]
    assert r.gap is True


def test_iriw_leading_power_ok(iriw):
    r = compare(iriw, "leading-sync-power")
    assert isinstance(r, Ok)
    assert (r.source_verdict.text, r.target_verdict.text) == ("forbidden", "forbidden")


def test_rwc_gcc_ok(rwc):
    r = compare(rwc, "gcc-armv7")
    assert isinstance(r, Ok)
    assert (r.source_verdict.text, r.target_verdict.text) == ("forbidden", "forbidden")


def test_rwc_trailing_armv7_bug(rwc):
    r = compare(rwc, "trailing-sync-armv7")
    assert r.is_bug and r.forced_cycle == ["c", "e", "f", "g"]


def test_verdict_witness_iff_allowed(c11_corpus):
    for test in c11_corpus:
        for table in mapping_catalog():
            r = compare(test, table)
            for v in (r.source_verdict, r.target_verdict):
                assert (v.witness is not None) == v.allowed


def test_bug_reports_rederive_independently(c11_corpus):
    seen = 0
    for test in c11_corpus:
        for table in mapping_catalog():
            r = compare(test, table)
            c11_forbidden = not c11_allows(test).allowed
            hw_allowed = hw_allows(compile_test(test, table)).allowed
            assert r.is_bug == (c11_forbidden and hw_allowed)
            if r.is_bug:
                seen += 1
                w = r.target_witness
                assert w.satisfies(test.outcome)
                assert hw_consistent(w)
                # the reported C11 execution has no sc order and a forced cycle
                hb = compute_hb(r.c11_execution)
                assert find_sc_order(r.c11_execution, hb) is None
                assert forced_cycle(forced_sc_edges(r.c11_execution, hb)) is not None
                assert batty_linearization_gap(r.c11_execution, hb).gap == r.gap
    assert seen == 8  # 4 acquire-bearing tests x 2 trailing mappings


def test_bug_json_shape(iriw):
    js = compare(iriw, "trailing-sync-power").to_json()
    assert js["status"] == "bug"
    assert js["target_verdict"]["witness"]["registers"] == {"r1": 1, "r2": 0, "r3": 1, "r4": 0}
    assert js["source_verdict"]["witness"] is None
    assert js["compiled"].startswith("isa test IRIW-acq-acq.trailing-sync-power arch power")


def test_iriw_sweep_trailing(iriw):
    rows = sweep(iriw, IRIW_FIRST_LOADS, ORDERS, ["trailing-sync-power"], jobs=1)
    assert len(rows) == 4
    flagged = [r for r in rows if r.flagged]
    assert len(flagged) == 3
    for r in flagged:
        assert any(o is MO.ACQUIRE for _, _, o in r.assignment)
    (clean,) = [r for r in rows if not r.flagged]
    assert all(o is MO.SEQ_CST for _, _, o in clean.assignment)


def test_iriw_sweep_leading_no_flags(iriw):
    rows = sweep(iriw, IRIW_FIRST_LOADS, ORDERS, ["leading-sync-power"], jobs=1)
    assert not any(r.flagged for r in rows)


def test_rwc_sweep(rwc):
    rows = sweep(rwc, [("T1", 0)], ORDERS, jobs=1)
    by_order = {r.assignment[0][2]: r.flagged for r in rows}
    assert by_order[MO.ACQUIRE] == ["trailing-sync-power", "trailing-sync-armv7"]
    assert by_order[MO.SEQ_CST] == []


def test_sweep_parallel_matches_serial(iriw):
    serial = sweep(iriw, IRIW_FIRST_LOADS, ORDERS, jobs=1)
    parallel = sweep(iriw, IRIW_FIRST_LOADS, ORDERS, jobs=2)
    assert [(r.variant, r.assignment, r.flagged) for r in serial] == [
        (r.variant, r.assignment, r.flagged) for r in parallel
    ]


def test_sweep_variant_names(iriw):
    rows = sweep(iriw, [("T2", 0)], ORDERS, ["leading-sync-power"], jobs=1)
    assert [r.variant.name for r in rows] == [
        "IRIW-acq-acq+T2.0-acquire",
        "IRIW-acq-acq+T2.0-seq_cst",
    ]


@pytest.mark.parametrize(
    "positions, orders",
    [
        ([("T9", 0)], ORDERS),
        ([("T2", 5)], ORDERS),
        ([("T0", 0)], [MO.ACQUIRE]),  # a store cannot be acquire
    ],
)
def test_sweep_errors(iriw, positions, orders):
    with pytest.raises(SweepError):
        sweep(iriw, positions, orders, jobs=1)


def test_sweep_rejects_isa_skeleton(iriw):
    with pytest.raises(SweepError):
        sweep(compile_test(iriw, "leading-sync-power"), [("T2", 0)], ORDERS)


def test_default_jobs(monkeypatch):
    monkeypatch.setenv("MAPCHECK_JOBS", "3")
    assert default_jobs() == 3
    monkeypatch.setenv("MAPCHECK_JOBS", "nope")
    assert default_jobs() == 1
    monkeypatch.delenv("MAPCHECK_JOBS")
    assert default_jobs() == 1


def test_run_corpus():
    report = run_corpus()
    assert report["schema"] == 1
    assert report["ok"] is True
    assert len(report["entries"]) == len(load_sources()) * 6
    bugs = {(b["source"], b["mapping"]) for b in report["bugs"]}
    acq = {"IRIW-acq-acq", "IRIW-acq-sc", "IRIW-sc-acq", "RWC-acq"}
    assert bugs == {(s, m) for s in acq for m in ("trailing-sync-power", "trailing-sync-armv7")}


def test_source_names_used_in_bugs():
    assert source_test("iriw_acq_sc").name == "IRIW-acq-sc"
