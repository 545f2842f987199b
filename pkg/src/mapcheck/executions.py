"""Candidate executions: every choice of reads-from source and per-location
modification order, with register values derived from reads-from."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional

from .litmus import Event, LitmusTest, build_events, is_register
from .relation import Relation


@dataclass(frozen=True)
class Execution:
    test: LitmusTest
    events: tuple
    sb: Relation
    rf: Relation
    mo: Relation  # transitively closed, per location
    mo_chains: tuple  # ((loc, (w0, w1, ...)), ...) with w0 the init write

    @cached_property
    def registers(self) -> dict:
        regs = {}
        for w, r in self.rf.pairs:
            ev = self.events[r]
            if ev.dest is not None:
                regs[ev.dest] = self.events[w].value
        return regs

    @cached_property
    def read_values(self) -> dict:
        """Read event id -> observed value."""
        return {r: self.events[w].value for w, r in self.rf.pairs}

    @cached_property
    def final_memory(self) -> dict:
        return {loc: self.events[chain[-1]].value for loc, chain in self.mo_chains}

    @cached_property
    def rf_source(self) -> dict:
        return {r: w for w, r in self.rf.pairs}

    @cached_property
    def fr(self) -> Relation:
        return compute_fr(self)

    @property
    def access_ids(self) -> list:
        return [e.id for e in self.events if not e.is_fence]

    def event(self, label: str) -> Event:
        for ev in self.events:
            if ev.label == label:
                return ev
        raise KeyError(label)

    def ids(self, *labels: str) -> tuple:
        return tuple(self.event(l).id for l in labels)

    def same_thread(self, a: int, b: int) -> bool:
        return self.events[a].thread == self.events[b].thread

    def rfe(self) -> Relation:
        return self.rf.filter(lambda w, r: not self.same_thread(w, r))

    def label_pairs(self, rel: Relation) -> set:
        """Relation rendered as ``{(label, label), ...}`` for reports and tests."""
        return {(self.events[a].label, self.events[b].label) for a, b in rel}

    def satisfies(self, outcome: Iterable) -> bool:
        regs, mem = self.registers, self.final_memory
        for name, value in outcome:
            actual = regs.get(name) if is_register(name) else mem.get(name)
            if actual != value:
                return False
        return True


def enumerate_executions(test: LitmusTest) -> list:
    """All candidate executions in deterministic order: the product of read
    source choices (reads in id order, sources in id order) and per-location
    write orders (init first, remaining writes permuted)."""
    events, sb = build_events(test)
    reads = [e for e in events if e.is_read]
    writes_at: dict = {}
    for e in events:
        if e.is_write:
            writes_at.setdefault(e.location, []).append(e)
    source_choices = [[w.id for w in writes_at[r.location]] for r in reads]

    locs = [loc for loc, _ in test.init]
    mo_choices = []
    for loc in locs:
        ws = writes_at.get(loc, [])
        init = [w.id for w in ws if w.is_init]
        rest = [w.id for w in ws if not w.is_init]
        mo_choices.append([tuple(init) + perm for perm in itertools.permutations(rest)])

    out = []
    for sources in itertools.product(*source_choices):
        rf = Relation(zip(sources, (r.id for r in reads)))
        for chains in itertools.product(*mo_choices):
            mo = Relation()
            for chain in chains:
                mo = mo | Relation.from_order(chain)
            out.append(
                Execution(test, events, sb, rf, mo, tuple(zip(locs, chains)))
            )
    return out


def filter_outcome(execs: Iterable[Execution], outcome: Optional[Iterable] = None) -> list:
    """Executions whose registers and final memory satisfy ``outcome``
    (defaults to each execution's own test outcome)."""
    result = []
    for ex in execs:
        if ex.satisfies(ex.test.outcome if outcome is None else outcome):
            result.append(ex)
    return result


def iter_outcome_executions(test: LitmusTest) -> Iterator[Execution]:
    yield from filter_outcome(enumerate_executions(test), test.outcome)


def compute_fr(ex: Execution) -> Relation:
    """from-reads: each read to every write mo-after its source."""
    mo_succ = ex.mo.successors()
    return Relation(
        (r, w2) for w, r in ex.rf.pairs for w2 in mo_succ.get(w, ())
    )
