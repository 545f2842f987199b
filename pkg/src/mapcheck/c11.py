"""C/C++11 consistency for candidate executions.

Happens-before is ``(sb | sw | initvis)+`` where ``initvis`` puts every init
write before every program event.  Release sequences are not modelled: sw
relates a release/seq_cst write directly to the acquire/seq_cst read that
reads from it.

Coherence is checked as ``irreflexive(hb ; eco?)`` with
``eco = (rf | mo | fr)+``, split into the named shapes

    CoWW   hb ; mo           write hb-before an mo-earlier write
    CoWR   hb ; fr           read sees a write mo-before one that hb-precedes it
    CoRW1  hb ; rf           read hb-before the write it reads from
    CoRW2  hb ; mo ; rf      read hb-before a write mo-before its source
    CoRR   hb ; fr ; rf      hb-ordered reads see mo-inverted writes

The sc order is searched exhaustively among linear extensions of
``(hb | mo)`` on SC events.  An SC read ``r`` reading from ``w`` is accepted
when the last SC write to its location sc-before it is ``w`` itself, or ``w``
is non-SC and does not happen-before that write.  When no SC write to the
location precedes ``r`` in sc, any source is accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .executions import Execution, enumerate_executions, filter_outcome
from .litmus import MemoryOrder, LitmusTest
from .relation import Relation, union

_RELEASE = {MemoryOrder.RELEASE, MemoryOrder.SEQ_CST}
_ACQUIRE = {MemoryOrder.ACQUIRE, MemoryOrder.SEQ_CST}


def compute_sw(ex: Execution) -> Relation:
    ev = ex.events
    return ex.rf.filter(
        lambda w, r: not ev[w].is_init and ev[w].order in _RELEASE and ev[r].order in _ACQUIRE
    )


def init_visibility(ex: Execution) -> Relation:
    inits = [e.id for e in ex.events if e.is_init]
    prog = [e.id for e in ex.events if not e.is_init]
    return Relation.cross(inits, prog)


def compute_hb(ex: Execution, sw: Optional[Relation] = None) -> Relation:
    if sw is None:
        sw = compute_sw(ex)
    return union(ex.sb, sw, init_visibility(ex)).plus()


@dataclass(frozen=True)
class Coherence:
    ok: bool
    shape: Optional[str] = None
    pair: Optional[tuple] = None  # (a, b) with a hb b closing the violating cycle

    def __bool__(self) -> bool:
        return self.ok


def coherence_shapes(ex: Execution) -> dict:
    """Name -> relation R such that ``hb ; R`` must be irreflexive."""
    fr = ex.fr
    return {
        "CoWW": ex.mo,
        "CoWR": fr,
        "CoRW1": ex.rf,
        "CoRW2": ex.mo.then(ex.rf),
        "CoRR": fr.then(ex.rf),
    }


def check_coherence(ex: Execution, hb: Relation) -> Coherence:
    for shape, rel in coherence_shapes(ex).items():
        for a, b in hb:
            if (b, a) in rel:
                return Coherence(False, shape, (a, b))
    return Coherence(True)


def sc_events(ex: Execution) -> list:
    return [e.id for e in ex.events if e.is_sc and not e.is_fence]


def _sc_reads_ok(ex: Execution, hb: Relation, order: list) -> bool:
    ev = ex.events
    last_write: dict = {}
    for eid in order:
        e = ev[eid]
        if e.is_write:
            last_write[e.location] = eid
            continue
        wl = last_write.get(e.location)
        if wl is None:
            continue
        w = ex.rf_source[eid]
        if w == wl:
            continue
        if ev[w].is_sc or (w, wl) in hb:
            return False
    return True


def iter_sc_orders(ex: Execution, hb: Relation):
    """Linear extensions of ``(hb | mo)`` on SC events, in lexicographic
    order of event ids, that satisfy the SC-read restriction."""
    nodes = sc_events(ex)
    sc_set = set(nodes)
    must = (hb | ex.mo).restrict(lambda x: x in sc_set)
    preds = {n: {a for a, b in must.pairs if b == n} for n in nodes}
    order: list = []
    placed: set = set()

    def extend():
        if len(order) == len(nodes):
            if _sc_reads_ok(ex, hb, order):
                yield tuple(order)
            return
        for n in nodes:
            if n not in placed and preds[n] <= placed:
                order.append(n)
                placed.add(n)
                yield from extend()
                placed.discard(n)
                order.pop()

    yield from extend()


def find_sc_order(ex: Execution, hb: Relation) -> Optional[tuple]:
    return next(iter_sc_orders(ex, hb), None)


def forced_sc_edges(ex: Execution, hb: Relation) -> dict:
    """Edges every valid sc order must contain, labelled by their origin.

    ``sc_fr`` relates an SC read ``r`` (source ``w``) to an SC write ``w2``
    mo-after ``w`` whenever placing ``w2`` before ``r`` would break the
    SC-read restriction: ``w`` is SC, or ``w`` happens-before every SC write
    to the location that is mo-after-or-equal ``w2``.
    """
    ev = ex.events
    sc = set(sc_events(ex))
    in_sc = sc.__contains__
    sc_fr = set()
    mo_succ = ex.mo.successors()
    for w, r in ex.rf.pairs:
        if r not in sc:
            continue
        for w2 in mo_succ.get(w, ()):
            if w2 not in sc:
                continue
            later = [w2] + [x for x in mo_succ.get(w2, ()) if x in sc]
            if ev[w].is_sc or all((w, x) in hb for x in later):
                sc_fr.add((r, w2))
    return {
        "sc_hb": hb.restrict(in_sc),
        "sc_mo": ex.mo.restrict(in_sc),
        "sc_fr": Relation(sc_fr),
    }


def forced_cycle(edges: dict) -> Optional[list]:
    return union(*edges.values()).find_cycle()


@dataclass
class C11Witness:
    execution: Execution
    sw: Relation
    hb: Relation
    sc_order: Optional[tuple]
    forced: dict
    consistent: bool
    reason: str = ""

    @property
    def cycle(self) -> Optional[list]:
        return forced_cycle(self.forced)


def analyse(ex: Execution) -> C11Witness:
    sw = compute_sw(ex)
    hb = compute_hb(ex, sw)
    if not hb.is_irreflexive():
        cyc = (ex.sb | sw).find_cycle()
        return C11Witness(ex, sw, hb, None, {}, False, f"hb cyclic: {_cycle_text(ex, cyc)}")
    coh = check_coherence(ex, hb)
    forced = forced_sc_edges(ex, hb)
    if not coh:
        a, b = coh.pair
        why = f"coherence {coh.shape}: {ex.events[a].label} hb {ex.events[b].label}"
        return C11Witness(ex, sw, hb, None, forced, False, why)
    order = find_sc_order(ex, hb)
    if order is None:
        cyc = forced_cycle(forced)
        why = "no valid sc order"
        if cyc:
            why += f"; forced cycle {_cycle_text(ex, cyc)}"
        return C11Witness(ex, sw, hb, None, forced, False, why)
    return C11Witness(ex, sw, hb, order, forced, True, "consistent")


def is_consistent(ex: Execution) -> bool:
    return analyse(ex).consistent


@dataclass
class C11Result:
    allowed: bool
    witness: Optional[C11Witness]
    failures: list = field(default_factory=list)  # C11Witness per rejected execution

    @property
    def verdict(self) -> str:
        return "allowed" if self.allowed else "forbidden"


def c11_allows(test: LitmusTest, outcome=None) -> C11Result:
    if test.level != "c11":
        raise ValueError(f"{test.name} is not a c11 test")
    failures = []
    for ex in filter_outcome(enumerate_executions(test), outcome if outcome is not None else test.outcome):
        w = analyse(ex)
        if w.consistent:
            return C11Result(True, w, failures)
        failures.append(w)
    return C11Result(False, None, failures)


@dataclass(frozen=True)
class GapReport:
    batty_relation: Relation
    batty_acyclic: bool
    sc_order_found: bool
    degenerate: bool = False

    @property
    def gap(self) -> bool:
        return self.batty_acyclic and not self.sc_order_found and not self.degenerate


def batty_linearization_gap(ex: Execution, hb: Optional[Relation] = None) -> GapReport:
    """Compare the sc order admitted by linearizing program order and
    coherence edges between SC accesses against the real sc axioms.

    A gap means that relation is acyclic (so a linearization exists) while no
    sc order satisfies the axioms, which happens when hb between SC accesses
    is only induced through a non-SC access.
    """
    if hb is None:
        hb = compute_hb(ex)
    sc = set(sc_events(ex))
    if not sc:
        return GapReport(Relation(), True, True, degenerate=True)
    b = union(ex.sb, ex.mo, ex.fr, ex.rfe()).restrict(sc.__contains__)
    acyclic = b.is_acyclic()
    found = find_sc_order(ex, hb) is not None
    return GapReport(b, acyclic, found)


def _cycle_text(ex: Execution, cyc) -> str:
    if not cyc:
        return ""
    labels = [ex.events[i].label for i in cyc]
    return " -> ".join(labels + [labels[0]])


__all__ = [
    "C11Result",
    "C11Witness",
    "Coherence",
    "GapReport",
    "analyse",
    "batty_linearization_gap",
    "c11_allows",
    "check_coherence",
    "compute_hb",
    "compute_sw",
    "find_sc_order",
    "forced_cycle",
    "forced_sc_edges",
    "init_visibility",
    "is_consistent",
    "sc_events",
]
