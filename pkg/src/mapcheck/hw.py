"""Axiomatic Power / ARMv7 model in the herd style.

One model serves both architectures; ``dmbish`` is given ``sync``
semantics and ``ctrlisb`` behaves as ``ctrlisync``.  Relations range over
access events only; fences sit in program order and only decide which
access pairs they separate.

    ppo     = load -> later access, when a ctrlisync/ctrlisb directly follows the load
    lwfence = po pairs separated by lwsync, minus W -> R
    ffence  = po pairs separated by sync / dmbish
    fence   = lwfence | ffence
    hb      = ppo | fence | rfe
    propbase = (fence | rfe;fence) ; hb*
    prop    = (propbase & W*W) | (com* ; propbase* ; ffence ; hb*)

Axioms, checked in this order:

    sc-per-location   acyclic(po-loc | com)
    no-thin-air       acyclic(hb)
    observation       irreflexive(fre ; prop ; hb*)
    propagation       acyclic(co | prop)

Address and data dependencies are not modelled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .executions import Execution, enumerate_executions, filter_outcome
from .litmus import LitmusTest
from .relation import Relation, seq, union


class FencePlacementError(ValueError):
    pass


@dataclass(frozen=True)
class HwRelations:
    po: Relation
    po_loc: Relation
    rf: Relation
    rfe: Relation
    rfi: Relation
    co: Relation
    fr: Relation
    fre: Relation
    com: Relation
    ppo: Relation
    lwfence: Relation
    ffence: Relation
    hb: Relation
    propbase: Relation
    prop: Relation


def _thread_ops(ex: Execution) -> list:
    threads: dict = {}
    for ev in ex.events:
        if not ev.is_init:
            threads.setdefault(ev.thread, []).append(ev)
    return [sorted(evs, key=lambda e: e.index) for _, evs in sorted(threads.items())]


def hw_relations(ex: Execution) -> HwRelations:
    ev = ex.events
    accesses = [e.id for e in ev if not e.is_fence]
    is_access = set(accesses).__contains__

    ppo, lw, ff = set(), set(), set()
    for ops in _thread_ops(ex):
        for i, f in enumerate(ops):
            if not f.is_fence:
                continue
            before = [e for e in ops[:i] if not e.is_fence]
            after = [e for e in ops[i + 1:] if not e.is_fence]
            if f.fence.is_ctrl:
                if i == 0 or not ops[i - 1].is_read:
                    raise FencePlacementError(
                        f"{f.fence} at {f.label} does not directly follow a load"
                    )
                ppo.update((ops[i - 1].id, e.id) for e in after)
            elif f.fence.is_full:
                ff.update((a.id, b.id) for a in before for b in after)
            else:
                lw.update(
                    (a.id, b.id) for a in before for b in after
                    if not (a.is_write and b.is_read)
                )

    po = ex.sb.restrict(is_access)
    po_loc = po.filter(lambda a, b: ev[a].location == ev[b].location)
    rf = ex.rf
    rfe = ex.rfe()
    rfi = rf - rfe
    co = ex.mo
    fr = ex.fr
    fre = fr.filter(lambda a, b: not ex.same_thread(a, b))
    com = union(rf, co, fr)

    ppo_r, lwfence, ffence = Relation(ppo), Relation(lw), Relation(ff)
    fence = lwfence | ffence
    hb = union(ppo_r, fence, rfe)
    hb_star = hb.star(accesses)
    propbase = (fence | rfe.then(fence)).then(hb_star)
    ww = propbase.filter(lambda a, b: ev[a].is_write and ev[b].is_write)
    prop = ww | seq(com.star(accesses), propbase.star(accesses), ffence, hb_star)
    return HwRelations(
        po=po, po_loc=po_loc, rf=rf, rfe=rfe, rfi=rfi, co=co, fr=fr, fre=fre,
        com=com, ppo=ppo_r, lwfence=lwfence, ffence=ffence, hb=hb,
        propbase=propbase, prop=prop,
    )


@dataclass(frozen=True)
class HwVerdict:
    consistent: bool
    axiom: Optional[str] = None
    cycle: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.consistent


def hw_consistent(ex: Execution, rels: Optional[HwRelations] = None) -> HwVerdict:
    r = rels or hw_relations(ex)
    accesses = [e.id for e in ex.events if not e.is_fence]

    cyc = (r.po_loc | r.com).find_cycle()
    if cyc:
        return HwVerdict(False, "sc-per-location", tuple(cyc))
    cyc = r.hb.find_cycle()
    if cyc:
        return HwVerdict(False, "no-thin-air", tuple(cyc))
    obs = seq(r.fre, r.prop, r.hb.star(accesses))
    for a, b in obs:
        if a == b:
            return HwVerdict(False, "observation", _observation_cycle(r, a))
    cyc = (r.co | r.prop).find_cycle()
    if cyc:
        return HwVerdict(False, "propagation", tuple(cyc))
    return HwVerdict(True)


def _observation_cycle(r: HwRelations, read: int) -> tuple:
    # read -fre-> w -prop-> x -hb*-> read; report (read, w, x) where found
    for _, w in sorted(p for p in r.fre if p[0] == read):
        for _, x in sorted(p for p in r.prop if p[0] == w):
            if x == read or (x, read) in r.hb.plus():
                return (read, w) if x == w else (read, w, x)
    return (read,)


@dataclass
class HwResult:
    allowed: bool
    witness: Optional[Execution]
    failures: list  # (Execution, HwVerdict) per rejected execution

    @property
    def verdict(self) -> str:
        return "allowed" if self.allowed else "forbidden"


def hw_allows(test: LitmusTest, outcome=None) -> HwResult:
    if test.level != "isa":
        raise ValueError(f"{test.name} is not an isa test")
    failures = []
    target = test.outcome if outcome is None else outcome
    for ex in filter_outcome(enumerate_executions(test), target):
        v = hw_consistent(ex)
        if v:
            return HwResult(True, ex, failures)
        failures.append((ex, v))
    return HwResult(False, None, failures)
