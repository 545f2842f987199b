import networkx as nx
from hypothesis import given, strategies as st

from mapcheck.relation import Relation, seq, union

nodes = st.integers(min_value=0, max_value=6)
relations = st.frozensets(st.tuples(nodes, nodes), max_size=20).map(Relation)


def brute_closure(pairs):
    closure = set(pairs)
    while True:
        step = {(a, d) for a, b in closure for c, d in closure if b == c}
        if step <= closure:
            return closure
        closure |= step


def test_compose():
    r = Relation({(1, 2), (2, 3)})
    s = Relation({(2, 5), (3, 4)})
    assert r.then(s) == {(1, 5), (2, 4)}
    assert seq(r, s, Relation({(4, 0)})) == {(2, 0)}


def test_from_order_is_strict_total():
    r = Relation.from_order([3, 1, 2])
    assert r == {(3, 1), (3, 2), (1, 2)}
    assert r.is_transitive() and r.is_irreflexive()


def test_star_adds_identity_on_universe():
    r = Relation({(1, 2)})
    assert r.star([1, 2, 3]) == {(1, 1), (2, 2), (3, 3), (1, 2)}
    assert r.opt([5]) == {(1, 2), (1, 1), (2, 2), (5, 5)}


def test_restrict_and_inverse():
    r = Relation({(1, 2), (2, 3), (3, 1)})
    assert r.restrict(lambda x: x != 3) == {(1, 2)}
    assert r.inverse() == {(2, 1), (3, 2), (1, 3)}


def test_find_cycle_reports_closed_path():
    r = Relation({(0, 1), (1, 2), (2, 0), (2, 3)})
    cyc = r.find_cycle()
    assert sorted(cyc) == [0, 1, 2]
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        assert (a, b) in r
    assert Relation({(0, 1), (1, 2)}).find_cycle() is None


@given(relations)
def test_plus_matches_brute_force(r):
    assert r.plus() == brute_closure(r.pairs)


@given(relations)
def test_plus_matches_networkx(r):
    g = nx.DiGraph(list(r.pairs))
    # reflexive=False: self-loops only where a node lies on a cycle
    assert r.plus() == set(nx.transitive_closure(g, reflexive=False).edges())


@given(relations)
def test_acyclic_iff_closure_irreflexive(r):
    assert r.is_acyclic() == r.plus().is_irreflexive()
    assert r.is_acyclic() == nx.is_directed_acyclic_graph(nx.DiGraph(list(r.pairs)))


@given(relations, relations)
def test_closure_monotone_and_idempotent(r, s):
    assert r.plus().plus() == r.plus()
    assert r.plus() <= (r | s).plus()
    assert union(r, s) == r | s
