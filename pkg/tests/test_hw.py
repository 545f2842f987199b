import dataclasses

import pytest

from mapcheck.corpus import load_compiled
from mapcheck.executions import enumerate_executions, filter_outcome
from mapcheck.hw import FencePlacementError, hw_allows, hw_consistent, hw_relations
from mapcheck.litmus import FenceKind, IsaOp, LitmusTest, Thread, parse_litmus
from mapcheck.mapping import compile_test


def by_dest(ex, reg):
    return next(e.id for e in ex.events if e.dest == reg)


def witness(test):
    (ex,) = filter_outcome(enumerate_executions(test))
    return ex


def isa(body, outcome, arch="power"):
    return parse_litmus(f"isa test t arch {arch}\ninit x=0 y=0 z=0\n{body}\noutcome {outcome}\n")


def swap_fences(test, mapping):
    threads = tuple(
        Thread(th.tid, tuple(
            dataclasses.replace(op, fence=mapping.get(op.fence, op.fence)) if op.kind == "fence" else op
            for op in th.ops
        ))
        for th in test.threads
    )
    return dataclasses.replace(test, threads=threads)


# --- relations --------------------------------------------------------------

def test_ppo_from_ctrlisync(iriw):
    ex = witness(compile_test(iriw, "trailing-sync-power"))
    r = hw_relations(ex)
    assert (by_dest(ex, "r1"), by_dest(ex, "r2")) in r.ppo
    assert (by_dest(ex, "r3"), by_dest(ex, "r4")) in r.ppo
    assert not r.ffence.restrict(lambda e: ex.events[e].is_read)


def test_ffence_between_leading_loads(iriw):
    ex = witness(compile_test(iriw, "leading-sync-power"))
    r = hw_relations(ex)
    assert (by_dest(ex, "r1"), by_dest(ex, "r2")) in r.ffence


def test_lwfence_shapes():
    t = isa("thread 0 { st x = 1; lwsync; st y = 1; r1 = ld z }\n"
            "thread 1 { r2 = ld x; lwsync; r3 = ld y }", "r1=0")
    ex = enumerate_executions(t)[0]
    r = hw_relations(ex)
    labels = ex.label_pairs(r.lwfence)
    d, f, g = ex.ids("d", "f", "g")  # st x, st y, ld z
    assert ("d", "f") in labels  # W -> W across lwsync
    assert (d, g) not in r.lwfence  # W -> R excluded
    assert (by_dest(ex, "r2"), by_dest(ex, "r3")) in r.lwfence
    assert r.lwfence <= r.po and r.ffence <= r.po and r.ppo <= r.po


def test_fr_is_rf_inverse_then_co(iriw):
    for ex in enumerate_executions(compile_test(iriw, "trailing-sync-power")):
        r = hw_relations(ex)
        assert r.fr == r.rf.inverse().then(r.co)


def test_misplaced_ctrl_fence_raises():
    bad = LitmusTest(
        "bad", "isa", (("x", 0),),
        (Thread("0", (IsaOp("st", "x", 1), IsaOp("fence", fence=FenceKind.CTRLISYNC))),),
        (("x", 1),), None, "power",
    )
    with pytest.raises(FencePlacementError):
        hw_relations(enumerate_executions(bad)[0])


# --- counterexample verdicts ---------------------------------------------------------

@pytest.mark.parametrize("mapping", ["trailing-sync-power", "trailing-sync-armv7"])
def test_trailing_iriw_consistent(iriw, mapping):
    assert hw_consistent(witness(compile_test(iriw, mapping)))
    assert hw_allows(compile_test(iriw, mapping)).allowed


@pytest.mark.parametrize("mapping", ["leading-sync-power", "leading-sync-armv7", "gcc-armv7"])
def test_fenced_iriw_inconsistent(iriw, mapping):
    v = hw_consistent(witness(compile_test(iriw, mapping)))
    assert not v
    # the two full fences make prop cyclic between the readers' second loads
    assert v.axiom == "propagation"
    assert v.cycle


@pytest.mark.parametrize("mapping", ["trailing-sync-power", "trailing-sync-armv7"])
def test_trailing_rwc_allowed(rwc, mapping):
    res = hw_allows(compile_test(rwc, mapping))
    assert res.allowed and res.witness.satisfies(rwc.outcome)


@pytest.mark.parametrize("mapping", ["leading-sync-power", "leading-sync-armv7", "gcc-armv7"])
def test_fenced_rwc_forbidden(rwc, mapping):
    assert not hw_allows(compile_test(rwc, mapping)).allowed


def test_single_thread_coherence():
    t = isa("thread 0 { st x = 1; st x = 2; r1 = ld x }", "r1=1")
    res = hw_allows(t)
    assert not res.allowed
    assert {v.axiom for _, v in res.failures} == {"sc-per-location"}


def test_rejects_c11_test(iriw):
    with pytest.raises(ValueError):
        hw_allows(iriw)


# --- classic Power litmus results (herd model) ------------------------------

CLASSIC = [
    ("MP", "thread 0 { st x = 1; st y = 1 }\nthread 1 { r1 = ld y; r2 = ld x }", "r1=1 /\\ r2=0", True),
    ("MP+lwsync+ctrlisync", "thread 0 { st x = 1; lwsync; st y = 1 }\nthread 1 { r1 = ld y; ctrlisync; r2 = ld x }",
     "r1=1 /\\ r2=0", False),
    ("MP+lwsync+po", "thread 0 { st x = 1; lwsync; st y = 1 }\nthread 1 { r1 = ld y; r2 = ld x }",
     "r1=1 /\\ r2=0", True),
    ("MP+syncs", "thread 0 { st x = 1; sync; st y = 1 }\nthread 1 { r1 = ld y; sync; r2 = ld x }",
     "r1=1 /\\ r2=0", False),
    ("SB", "thread 0 { st x = 1; r1 = ld y }\nthread 1 { st y = 1; r2 = ld x }", "r1=0 /\\ r2=0", True),
    ("SB+lwsyncs", "thread 0 { st x = 1; lwsync; r1 = ld y }\nthread 1 { st y = 1; lwsync; r2 = ld x }",
     "r1=0 /\\ r2=0", True),
    ("SB+syncs", "thread 0 { st x = 1; sync; r1 = ld y }\nthread 1 { st y = 1; sync; r2 = ld x }",
     "r1=0 /\\ r2=0", False),
    ("LB", "thread 0 { r1 = ld x; st y = 1 }\nthread 1 { r2 = ld y; st x = 1 }", "r1=1 /\\ r2=1", True),
    ("LB+ctrlisyncs", "thread 0 { r1 = ld x; ctrlisync; st y = 1 }\nthread 1 { r2 = ld y; ctrlisync; st x = 1 }",
     "r1=1 /\\ r2=1", False),
    ("WRC+lwsync+ctrlisync",
     "thread 0 { st x = 1 }\nthread 1 { r1 = ld x; lwsync; st y = 1 }\nthread 2 { r2 = ld y; ctrlisync; r3 = ld x }",
     "r1=1 /\\ r2=1 /\\ r3=0", False),
    ("WRC+po+ctrlisync",
     "thread 0 { st x = 1 }\nthread 1 { r1 = ld x; st y = 1 }\nthread 2 { r2 = ld y; ctrlisync; r3 = ld x }",
     "r1=1 /\\ r2=1 /\\ r3=0", True),
    ("IRIW+lwsyncs",
     "thread 0 { st x = 1 }\nthread 1 { st y = 1 }\nthread 2 { r1 = ld x; lwsync; r2 = ld y }\n"
     "thread 3 { r3 = ld y; lwsync; r4 = ld x }", "r1=1 /\\ r2=0 /\\ r3=1 /\\ r4=0", True),
    ("IRIW+syncs",
     "thread 0 { st x = 1 }\nthread 1 { st y = 1 }\nthread 2 { r1 = ld x; sync; r2 = ld y }\n"
     "thread 3 { r3 = ld y; sync; r4 = ld x }", "r1=1 /\\ r2=0 /\\ r3=1 /\\ r4=0", False),
    ("R+lwsync+sync", "thread 0 { st x = 1; lwsync; st y = 1 }\nthread 1 { st y = 2; sync; r1 = ld x }",
     "y=2 /\\ r1=0", True),
    ("R+syncs", "thread 0 { st x = 1; sync; st y = 1 }\nthread 1 { st y = 2; sync; r1 = ld x }",
     "y=2 /\\ r1=0", False),
    ("2+2W+lwsyncs", "thread 0 { st x = 1; lwsync; st y = 2 }\nthread 1 { st y = 1; lwsync; st x = 2 }",
     "x=1 /\\ y=1", False),
    ("2+2W", "thread 0 { st x = 1; st y = 2 }\nthread 1 { st y = 1; st x = 2 }", "x=1 /\\ y=1", True),
]


@pytest.mark.parametrize("name, body, outcome, allowed", CLASSIC, ids=[c[0] for c in CLASSIC])
def test_classic_power_verdicts(name, body, outcome, allowed):
    assert hw_allows(isa(body, outcome)).allowed is allowed


# --- properties -------------------------------------------------------------

def _compiled():
    return [e.test for e in load_compiled()]


def test_strengthening_any_lwsync_keeps_forbidden():
    for test in _compiled() + [isa(b, o) for _, b, o, _ in CLASSIC]:
        if hw_allows(test).allowed:
            continue
        for ti, th in enumerate(test.threads):
            for oi, op in enumerate(th.ops):
                if op.kind == "fence" and op.fence is FenceKind.LWSYNC:
                    ops = list(th.ops)
                    ops[oi] = IsaOp("fence", fence=FenceKind.SYNC)
                    threads = list(test.threads)
                    threads[ti] = Thread(th.tid, tuple(ops))
                    stronger = dataclasses.replace(test, threads=tuple(threads))
                    assert not hw_allows(stronger).allowed, test.name


def test_lwfence_subsumed_by_ffence_after_swap():
    for test in _compiled() + [isa(b, o) for _, b, o, _ in CLASSIC]:
        swapped = swap_fences(test, {FenceKind.LWSYNC: FenceKind.SYNC})
        for a, b in zip(enumerate_executions(test), enumerate_executions(swapped)):
            assert hw_relations(a).lwfence <= hw_relations(b).ffence


def test_dmbish_and_sync_agree():
    to_arm = {FenceKind.SYNC: FenceKind.DMBISH, FenceKind.CTRLISYNC: FenceKind.CTRLISB}
    for test in _compiled():
        if test.arch != "power":
            continue
        arm = dataclasses.replace(swap_fences(test, to_arm), arch="armv7")
        assert hw_allows(arm).allowed == hw_allows(test).allowed, test.name


def test_compiled_corpus_expectations():
    for test in _compiled():
        assert hw_allows(test).verdict == test.expectation, test.name


def test_allowed_witness_rechecks():
    for test in _compiled():
        res = hw_allows(test)
        if res.allowed:
            assert res.witness.satisfies(test.outcome)
            assert hw_consistent(res.witness)
