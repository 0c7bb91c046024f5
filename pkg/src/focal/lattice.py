"""Finitely presented meet-semilattices of focuses.

A focus names one axis of spatiality.  Focuses form a commutative
idempotent monoid whose product doubles as the meet of an order defined
by ``f <= g  iff  f * g == f``; the identity element is the top focus.

We represent a lattice by a finite set of generator names together with
declared order relations ``g <= h`` between generators.  An element is
the canonical set of generators below it: a subset of the generators
that is upward-closed under the declared relations.  The product of two
elements is the union of their member sets, and the empty set is the
top focus.  This one representation covers both freely generated
lattices (no relations, closure trivial) and nested presentations such
as ``diff <= super``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations


@dataclass(frozen=True)
class Focus:
    """A canonical lattice element: an upward-closed set of generators."""

    members: frozenset[str] = frozenset()

    def __str__(self):
        return "{" + " ".join(sorted(self.members)) + "}"


TOP = Focus(frozenset())


@dataclass(frozen=True)
class FocusLattice:
    """A finite presentation, with generator_order closed at construction."""

    generators: tuple[str, ...]
    generator_order: frozenset[tuple[str, str]] = frozenset()
    _elements: tuple[Focus, ...] = field(default=None, compare=False, repr=False)

    def canonicalize(self, names) -> Focus:
        """Upward closure of a set of generator names."""
        for n in names:
            if n not in self.generators:
                raise ValueError(f"unknown focus generator {n!r}")
        members = set(names)
        changed = True
        while changed:
            changed = False
            for (g, h) in self.generator_order:
                if g in members and h not in members:
                    members.add(h)
                    changed = True
        return Focus(frozenset(members))

    def is_canonical(self, f: Focus) -> bool:
        return all(n in self.generators for n in f.members) and \
            self.canonicalize(f.members) == f

    def meet(self, f: Focus, g: Focus) -> Focus:
        # Union of upward-closed sets is upward-closed.
        return Focus(f.members | g.members)

    def leq(self, f: Focus, g: Focus) -> bool:
        """f <= g iff meet(f, g) == f, i.e. g's members are among f's."""
        return g.members <= f.members

    def top(self) -> Focus:
        return TOP

    def elements(self) -> tuple[Focus, ...]:
        """All canonical elements, smallest member sets first."""
        if self._elements is None:
            seen = []
            for r in range(len(self.generators) + 1):
                for combo in combinations(self.generators, r):
                    c = self.canonicalize(combo)
                    if c not in seen:
                        seen.append(c)
            seen.sort(key=lambda f: (len(f.members), sorted(f.members)))
            object.__setattr__(self, "_elements", tuple(seen))
        return self._elements

    def show(self, f: Focus) -> str:
        """Render members in generator declaration order."""
        return "{" + " ".join(n for n in self.generators if n in f.members) + "}"


def declare_lattice(generators, relations=()) -> FocusLattice:
    """Build a lattice from generator names and (g, h) pairs meaning g <= h.

    The declared relations are closed under reflexivity and transitivity.
    Raises ValueError on duplicate generators or unknown relation endpoints.
    """
    gens = tuple(generators)
    if len(set(gens)) != len(gens):
        dup = next(g for g in gens if gens.count(g) > 1)
        raise ValueError(f"duplicate focus generator {dup!r}")
    order = set()
    for (g, h) in relations:
        if g not in gens:
            raise ValueError(f"unknown focus generator {g!r} in relation")
        if h not in gens:
            raise ValueError(f"unknown focus generator {h!r} in relation")
        order.add((g, h))
    for g in gens:
        order.add((g, g))
    changed = True
    while changed:
        changed = False
        for (a, b) in list(order):
            for (c, d) in list(order):
                if b == c and (a, d) not in order:
                    order.add((a, d))
                    changed = True
    return FocusLattice(gens, frozenset(order))
