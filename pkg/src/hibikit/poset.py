"""Finite posets: construction, validation, linear extensions, order ideals,
and order-strength comparisons.

Elements carry opaque string labels; relations are stored positionally
against the canonical element tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import CycleError, GroundSetMismatch, UnknownLabel


@dataclass(frozen=True)
class Poset:
    """A finite strict partial order.

    `relation` holds index pairs (i, j) meaning elements[i] < elements[j];
    it must already be transitively closed.
    """

    elements: tuple[str, ...]
    relation: frozenset[tuple[int, int]]

    def __post_init__(self):
        n = len(self.elements)
        if len(set(self.elements)) != n:
            raise ValueError("element labels must be pairwise distinct")
        for i, j in self.relation:
            if not (0 <= i < n and 0 <= j < n):
                raise UnknownLabel(f"relation index out of range: {(i, j)}")
            if i == j:
                raise CycleError(f"relation is not irreflexive at {self.elements[i]}")
            if (j, i) in self.relation:
                raise CycleError(
                    f"antisymmetry fails on {self.elements[i]}, {self.elements[j]}"
                )
        for i, j in self.relation:
            for k, l in self.relation:
                if j == k and (i, l) not in self.relation:
                    raise ValueError("relation is not transitively closed")

    def index(self, label: str) -> int:
        try:
            return self.elements.index(label)
        except ValueError:
            raise UnknownLabel(f"unknown element {label!r}") from None

    def less(self, a: str, b: str) -> bool:
        return (self.index(a), self.index(b)) in self.relation

    def leq(self, a: str, b: str) -> bool:
        return a == b or self.less(a, b)

    @property
    def size(self) -> int:
        return len(self.elements)

    def below(self, j: int) -> frozenset[int]:
        """Indices strictly below element j."""
        return frozenset(i for i, k in self.relation if k == j)

    def covers(self) -> list[tuple[str, str]]:
        """Cover pairs (a, b) with a < b and nothing in between."""
        out = []
        for i, j in sorted(self.relation):
            if not any((i, k) in self.relation and (k, j) in self.relation
                       for k in range(len(self.elements))):
                out.append((self.elements[i], self.elements[j]))
        return out

    def label_pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset((self.elements[i], self.elements[j]) for i, j in self.relation)


@dataclass(frozen=True)
class LinearExtension:
    """A linearization of a poset: a total order refining it."""

    order: tuple[str, ...]
    poset: Poset

    def __post_init__(self):
        if sorted(self.order) != sorted(self.poset.elements):
            raise GroundSetMismatch("extension is not a permutation of the ground set")
        pos = {x: k for k, x in enumerate(self.order)}
        for a, b in self.poset.label_pairs():
            if pos[a] > pos[b]:
                raise ValueError(f"order violates {a} < {b}")

    def as_poset(self) -> Poset:
        """The extension as a total-order poset on the same canonical element tuple."""
        pos = {x: k for k, x in enumerate(self.order)}
        elems = self.poset.elements
        rel = frozenset(
            (i, j)
            for i in range(len(elems))
            for j in range(len(elems))
            if i != j and pos[elems[i]] < pos[elems[j]]
        )
        return Poset(elems, rel)


def _transitive_closure(n: int, pairs: set[tuple[int, int]]) -> set[tuple[int, int]]:
    adj = {i: set() for i in range(n)}
    for i, j in pairs:
        adj[i].add(j)
    closed = set(pairs)
    changed = True
    while changed:
        changed = False
        for i, j in list(closed):
            for k in adj[j]:
                if (i, k) not in closed:
                    closed.add((i, k))
                    adj[i].add(k)
                    changed = True
    return closed


def from_cover_relations(labels: list[str], covers: list[tuple[str, str]]) -> Poset:
    """Build the poset generated by the given cover pairs.

    Raises CycleError if the closure is not irreflexive, UnknownLabel for
    covers mentioning labels outside `labels`.
    """
    elements = tuple(labels)
    if len(set(elements)) != len(elements):
        raise ValueError("element labels must be pairwise distinct")
    index = {x: i for i, x in enumerate(elements)}
    pairs = set()
    for a, b in covers:
        if a not in index:
            raise UnknownLabel(f"unknown element {a!r}")
        if b not in index:
            raise UnknownLabel(f"unknown element {b!r}")
        pairs.add((index[a], index[b]))
    closed = _transitive_closure(len(elements), pairs)
    for i, j in closed:
        if i == j or (j, i) in closed:
            raise CycleError("cover relations contain a cycle")
    return Poset(elements, frozenset(closed))


def antichain(labels: list[str]) -> Poset:
    return from_cover_relations(labels, [])


def chain(labels: list[str]) -> Poset:
    return from_cover_relations(labels, list(zip(labels, labels[1:])))


def linear_extensions(P: Poset) -> Iterator[LinearExtension]:
    """All linearizations, lazily, in lexicographic order of label positions."""
    n = P.size
    below = [P.below(j) for j in range(n)]

    def emit(placed: list[int], used: set[int]) -> Iterator[tuple[int, ...]]:
        if len(placed) == n:
            yield tuple(placed)
            return
        for j in range(n):
            if j not in used and below[j] <= used:
                placed.append(j)
                used.add(j)
                yield from emit(placed, used)
                placed.pop()
                used.remove(j)

    for perm in emit([], set()):
        yield LinearExtension(tuple(P.elements[j] for j in perm), P)


def order_ideals(P: Poset) -> list[frozenset[str]]:
    """All down-closed subsets, in canonical order (by size, then positions)."""
    n = P.size
    below = [P.below(j) for j in range(n)]
    found = []
    for mask in range(1 << n):
        members = {j for j in range(n) if mask >> j & 1}
        if all(below[j] <= members for j in members):
            found.append(tuple(sorted(members)))
    found.sort(key=lambda t: (len(t), t))
    return [frozenset(P.elements[j] for j in t) for t in found]


def _check_same_ground(a: Poset, b: Poset):
    if set(a.elements) != set(b.elements):
        raise GroundSetMismatch("posets are not on the same ground set")


def is_stronger(strong: Poset, weak: Poset) -> bool:
    """True iff every weak relation also holds in `strong` (same ground set)."""
    _check_same_ground(strong, weak)
    return weak.label_pairs() <= strong.label_pairs()


def intersect_orders(orders: list[Poset]) -> Poset:
    """The poset whose relation is the intersection of the given relations."""
    if not orders:
        raise ValueError("need at least one poset")
    first = orders[0]
    for other in orders[1:]:
        _check_same_ground(first, other)
    common = orders[0].label_pairs()
    for other in orders[1:]:
        common &= other.label_pairs()
    index = {x: i for i, x in enumerate(first.elements)}
    return Poset(first.elements, frozenset((index[a], index[b]) for a, b in common))


def parse_poset(text: str) -> Poset:
    """Parse the poset text format: `elem <label>` and `cover <a> <b>` lines.

    `#` starts a comment; blank lines are ignored.
    """
    labels: list[str] = []
    covers: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "elem" and len(parts) == 2:
            labels.append(parts[1])
        elif parts[0] == "cover" and len(parts) == 3:
            covers.append((parts[1], parts[2]))
        else:
            raise ValueError(f"bad poset line: {raw!r}")
    return from_cover_relations(labels, covers)


def format_poset(P: Poset) -> str:
    lines = [f"elem {x}" for x in P.elements]
    lines += [f"cover {a} {b}" for a, b in P.covers()]
    return "\n".join(lines) + "\n"
