"""Finite binary relations over event ids.

Every memory-model relation in the package (sb, rf, mo, hb, ppo, prop, ...)
is a :class:`Relation`.  Instances are immutable and hashable.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Callable, Hashable, Iterable, Iterator, Optional

Pair = tuple[Hashable, Hashable]


class Relation:
    __slots__ = ("pairs",)

    def __init__(self, pairs: Iterable[Pair] = ()):
        self.pairs = frozenset(pairs)

    # --- construction -----------------------------------------------------

    @classmethod
    def identity(cls, universe: Iterable[Hashable]) -> "Relation":
        return cls((x, x) for x in universe)

    @classmethod
    def from_order(cls, seq: Iterable[Hashable]) -> "Relation":
        """Strict total order relating every element to each later one."""
        items = list(seq)
        return cls(
            (items[i], items[j])
            for i in range(len(items))
            for j in range(i + 1, len(items))
        )

    @classmethod
    def cross(cls, left: Iterable[Hashable], right: Iterable[Hashable]) -> "Relation":
        right = list(right)
        return cls((a, b) for a in left for b in right)

    # --- container protocol -----------------------------------------------

    def __contains__(self, pair: Pair) -> bool:
        return pair in self.pairs

    def __iter__(self) -> Iterator[Pair]:
        return iter(sorted(self.pairs, key=_sort_key))

    def __len__(self) -> int:
        return len(self.pairs)

    def __bool__(self) -> bool:
        return bool(self.pairs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Relation):
            return self.pairs == other.pairs
        if isinstance(other, (set, frozenset)):
            return self.pairs == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __repr__(self) -> str:
        body = ", ".join(f"{a}->{b}" for a, b in self)
        return f"Relation({{{body}}})"

    # --- algebra ----------------------------------------------------------

    def __or__(self, other: "Relation") -> "Relation":
        return Relation(self.pairs | other.pairs)

    def __and__(self, other: "Relation") -> "Relation":
        return Relation(self.pairs & other.pairs)

    def __sub__(self, other: "Relation") -> "Relation":
        return Relation(self.pairs - other.pairs)

    def __le__(self, other: "Relation") -> bool:
        return self.pairs <= other.pairs

    def then(self, other: "Relation") -> "Relation":
        """Relational composition ``self ; other``."""
        succ = other.successors()
        return Relation((a, c) for a, b in self.pairs for c in succ.get(b, ()))

    def inverse(self) -> "Relation":
        return Relation((b, a) for a, b in self.pairs)

    def plus(self) -> "Relation":
        """Transitive closure."""
        succ = self.successors()
        out = set()
        for start in succ:
            seen: set = set()
            stack = list(succ[start])
            while stack:
                node = stack.pop()
                if node in seen:
                    continue
                seen.add(node)
                stack.extend(succ.get(node, ()))
            out.update((start, n) for n in seen)
        return Relation(out)

    def star(self, universe: Iterable[Hashable]) -> "Relation":
        """Reflexive-transitive closure over ``universe`` (plus the field)."""
        return self.plus() | Relation.identity(set(universe) | self.field())

    def opt(self, universe: Iterable[Hashable]) -> "Relation":
        """Reflexive closure ``R?``."""
        return self | Relation.identity(set(universe) | self.field())

    def restrict(self, pred: Callable[[Hashable], bool]) -> "Relation":
        """Keep pairs whose endpoints both satisfy ``pred``."""
        return Relation((a, b) for a, b in self.pairs if pred(a) and pred(b))

    def filter(self, pred: Callable[[Hashable, Hashable], bool]) -> "Relation":
        return Relation(p for p in self.pairs if pred(*p))

    def domain(self) -> frozenset:
        return frozenset(a for a, _ in self.pairs)

    def range(self) -> frozenset:
        return frozenset(b for _, b in self.pairs)

    def field(self) -> frozenset:
        return self.domain() | self.range()

    def successors(self) -> dict:
        succ: dict = defaultdict(set)
        for a, b in self.pairs:
            succ[a].add(b)
        return dict(succ)

    # --- tests ------------------------------------------------------------

    def is_irreflexive(self) -> bool:
        return all(a != b for a, b in self.pairs)

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None

    def is_transitive(self) -> bool:
        return self.then(self) <= self

    def find_cycle(self) -> Optional[list]:
        """Return one cycle as a node list ``[n0, ..., nk]`` (closing edge nk->n0
        implied), or None.  Deterministic for a given relation."""
        succ = {k: sorted(v, key=_sort_key) for k, v in self.successors().items()}
        white, grey, black = 0, 1, 2
        colour: dict = {}
        for root in sorted(succ, key=_sort_key):
            if colour.get(root, white) != white:
                continue
            path = [root]
            iters = [iter(succ.get(root, ()))]
            colour[root] = grey
            while iters:
                node = next(iters[-1], None)
                if node is None:
                    colour[path.pop()] = black
                    iters.pop()
                    continue
                state = colour.get(node, white)
                if state == grey:
                    return path[path.index(node):]
                if state == white:
                    colour[node] = grey
                    path.append(node)
                    iters.append(iter(succ.get(node, ())))
        return None


def union(*rels: Relation) -> Relation:
    out: set = set()
    for r in rels:
        out |= r.pairs
    return Relation(out)


def seq(*rels: Relation) -> Relation:
    """Left-to-right composition of several relations."""
    result = rels[0]
    for r in rels[1:]:
        result = result.then(r)
    return result


def _sort_key(x):
    return (type(x).__name__, x)
