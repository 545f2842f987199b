"""End-to-end comparison of C11 verdicts against compiled hardware verdicts."""

from __future__ import annotations

import dataclasses
import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from . import c11, hw
from .corpus import load_sources, load_compiled
from .executions import Execution
from .litmus import (
    LOAD_ORDERS,
    STORE_ORDERS,
    C11Op,
    LitmusTest,
    MemoryOrder,
    Thread,
    render_litmus,
)
from .mapping import MappingTable, compile_test, get_mapping, mapping_catalog

log = logging.getLogger(__name__)

SCHEMA = 1


@dataclass
class Verdict:
    model: str  # "c11" | "hw"
    allowed: bool
    witness: Optional[Execution] = None
    reason: str = ""
    arch: Optional[str] = None
    mapping: Optional[str] = None

    @property
    def text(self) -> str:
        return "allowed" if self.allowed else "forbidden"

    def to_json(self) -> dict:
        out = {"model": self.model, "verdict": self.text, "reason": self.reason}
        if self.model == "hw":
            out["arch"] = self.arch
            out["mapping"] = self.mapping
        out["witness"] = execution_json(self.witness) if self.witness is not None else None
        return out


def c11_verdict(test: LitmusTest) -> tuple:
    """(Verdict, C11Result) for a C11 test."""
    res = c11.c11_allows(test)
    if res.allowed:
        return Verdict("c11", True, res.witness.execution, "consistent witness"), res
    if not res.failures:
        reason = "no execution produces the outcome"
    else:
        reason = res.failures[0].reason
        if len(res.failures) > 1:
            reason += f" (+{len(res.failures) - 1} more executions rejected)"
    return Verdict("c11", False, None, reason), res


def hw_verdict(test: LitmusTest, mapping: Optional[str] = None) -> Verdict:
    res = hw.hw_allows(test)
    if res.allowed:
        return Verdict("hw", True, res.witness, "consistent witness", test.arch, mapping)
    if not res.failures:
        reason = "no execution produces the outcome"
    else:
        counts: dict = {}
        for _, v in res.failures:
            counts[v.axiom] = counts.get(v.axiom, 0) + 1
        reason = "violates " + ", ".join(f"{k} ({n})" for k, n in counts.items())
    return Verdict("hw", False, None, reason, test.arch, mapping)


def check(test: LitmusTest) -> Verdict:
    if test.level == "c11":
        return c11_verdict(test)[0]
    return hw_verdict(test)


@dataclass
class BugReport:
    source: LitmusTest
    mapping: str
    compiled: LitmusTest
    source_verdict: Verdict
    target_verdict: Verdict
    forced_cycle: Optional[list]  # event labels
    gap: Optional[bool]
    c11_execution: Optional[Execution] = None

    is_bug = True

    @property
    def target_witness(self) -> Execution:
        return self.target_verdict.witness

    def to_json(self) -> dict:
        return {
            "status": "bug",
            "source": self.source.name,
            "mapping": self.mapping,
            "source_verdict": self.source_verdict.to_json(),
            "target_verdict": self.target_verdict.to_json(),
            "forced_cycle": self.forced_cycle,
            "loophole_gap": self.gap,
            "compiled": render_litmus(self.compiled),
        }


@dataclass
class Ok:
    source: LitmusTest
    mapping: str
    compiled: LitmusTest
    source_verdict: Verdict
    target_verdict: Verdict

    is_bug = False

    def to_json(self) -> dict:
        return {
            "status": "ok",
            "source": self.source.name,
            "mapping": self.mapping,
            "source_verdict": self.source_verdict.to_json(),
            "target_verdict": self.target_verdict.to_json(),
            "compiled": render_litmus(self.compiled),
        }


def compare(test: LitmusTest, mapping: Union[str, MappingTable]) -> Union[BugReport, Ok]:
    table = get_mapping(mapping)
    src, res = c11_verdict(test)
    compiled = compile_test(test, table)
    tgt = hw_verdict(compiled, table.name)
    if src.allowed or not tgt.allowed:
        return Ok(test, table.name, compiled, src, tgt)

    cycle = gap = None
    c11_ex = None
    for w in res.failures:
        if w.consistent or not w.forced:
            continue
        cyc = w.cycle
        if cyc is not None:
            c11_ex = w.execution
            cycle = [c11_ex.events[i].label for i in cyc]
            gap = c11.batty_linearization_gap(c11_ex, w.hb).gap
            break
    if c11_ex is None and res.failures:
        c11_ex = res.failures[0].execution
    return BugReport(test, table.name, compiled, src, tgt, cycle, gap, c11_ex)


# --- sweeps -----------------------------------------------------------------

@dataclass
class SweepRow:
    variant: LitmusTest
    assignment: tuple  # ((tid, index, order), ...)
    results: dict  # mapping name -> BugReport | Ok

    @property
    def flagged(self) -> list:
        return [name for name, r in self.results.items() if r.is_bug]


class SweepError(ValueError):
    pass


def _variant(skeleton: LitmusTest, assignment: tuple) -> LitmusTest:
    threads = [list(th.ops) for th in skeleton.threads]
    for tid, idx, order in assignment:
        ti = skeleton.thread_index(tid)
        threads[ti][idx] = dataclasses.replace(threads[ti][idx], order=order)
    tag = "+".join(f"{tid}.{idx}-{order.value}" for tid, idx, order in assignment)
    return dataclasses.replace(
        skeleton,
        name=f"{skeleton.name}+{tag}" if tag else skeleton.name,
        threads=tuple(Thread(th.tid, tuple(ops)) for th, ops in zip(skeleton.threads, threads)),
    )


def sweep_variants(skeleton: LitmusTest, positions: Iterable, orders: Iterable) -> list:
    if skeleton.level != "c11":
        raise SweepError("sweeps need a c11 skeleton")
    orders = sorted(set(MemoryOrder(o) for o in orders), key=list(MemoryOrder).index)
    choices = []
    for tid, idx in positions:
        try:
            th = skeleton.threads[skeleton.thread_index(tid)]
        except KeyError:
            raise SweepError(f"no thread {tid!r}") from None
        if not 0 <= idx < len(th.ops):
            raise SweepError(f"thread {tid} has no op {idx}")
        op: C11Op = th.ops[idx]
        valid = [o for o in orders if o in c11_orders(op.kind)]
        if not valid:
            raise SweepError(f"no requested order is valid for the {op.kind} at {tid}:{idx}")
        choices.append([(tid, idx, o) for o in valid])
    return [(a, _variant(skeleton, a)) for a in itertools.product(*choices)]


def c11_orders(kind: str) -> frozenset:
    return LOAD_ORDERS if kind == "load" else STORE_ORDERS


def _compare_all(args) -> dict:
    variant, tables = args
    return {t.name: compare(variant, t) for t in tables}


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("MAPCHECK_JOBS", "1")))
    except ValueError:
        log.warning("ignoring non-integer MAPCHECK_JOBS=%r", os.environ["MAPCHECK_JOBS"])
        return 1


def sweep(
    skeleton: LitmusTest,
    positions: Iterable,
    orders: Iterable,
    mappings: Optional[Iterable] = None,
    jobs: Optional[int] = None,
) -> list:
    """Run ``compare`` for every order assignment and every mapping.

    Rows come back in assignment order regardless of ``jobs``.
    """
    variants = sweep_variants(skeleton, list(positions), orders)
    tables = [get_mapping(m) for m in (mappings or mapping_catalog())]
    jobs = default_jobs() if jobs is None else jobs
    work = [(v, tables) for _, v in variants]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_compare_all, work))
    else:
        results = [_compare_all(w) for w in work]
    return [SweepRow(v, a, r) for (a, v), r in zip(variants, results)]


# --- corpus -----------------------------------------------------------------

def run_corpus() -> dict:
    """Check every bundled expectation; returns the JSON report."""
    entries = []
    ok = True
    sources = {e.path[: -len(".lit")]: e for e in load_sources()}
    for stem, entry in sources.items():
        v = check(entry.test)
        good = v.text == entry.test.expectation
        ok &= good
        entries.append(_corpus_row(entry.path, entry.test, v, good))
    for entry in load_compiled():
        v = check(entry.test)
        good = v.text == entry.test.expectation
        src = sources.get(entry.source)
        matches = src is not None and dataclasses.replace(
            compile_test(src.test, entry.mapping), expectation=entry.test.expectation
        ) == entry.test
        ok &= good and matches
        row = _corpus_row(entry.path, entry.test, v, good)
        row["compiled_matches_source"] = matches
        entries.append(row)
    bugs = []
    for stem, entry in sources.items():
        for table in mapping_catalog():
            r = compare(entry.test, table)
            if r.is_bug:
                bugs.append({
                    "source": entry.test.name,
                    "mapping": table.name,
                    "forced_cycle": r.forced_cycle,
                    "loophole_gap": r.gap,
                })
    return {"schema": SCHEMA, "command": "corpus", "ok": ok, "entries": entries, "bugs": bugs}


def _corpus_row(path: str, test: LitmusTest, v: Verdict, good: bool) -> dict:
    return {
        "path": path,
        "name": test.name,
        "level": test.level,
        "expected": test.expectation,
        "verdict": v.text,
        "reason": v.reason,
        "ok": good,
    }


# --- serialization ----------------------------------------------------------

def execution_json(ex: Execution) -> dict:
    ev = ex.events
    tids = [th.tid for th in ex.test.threads]

    def one(e):
        d = {"id": e.label, "thread": "init" if e.is_init else tids[e.thread], "kind": e.kind}
        if e.is_fence:
            d["fence"] = str(e.fence)
            return d
        d["location"] = e.location
        d["value"] = e.value if e.is_write else ex.read_values.get(e.id)
        if e.order is not None:
            d["order"] = str(e.order)
        if e.dest is not None:
            d["register"] = e.dest
        return d

    return {
        "events": [one(e) for e in ev],
        "rf": sorted([ev[w].label, ev[r].label] for w, r in ex.rf),
        "mo": {loc: [ev[i].label for i in chain] for loc, chain in ex.mo_chains},
        "registers": dict(sorted(ex.registers.items())),
    }

