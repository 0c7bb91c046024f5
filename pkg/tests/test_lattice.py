"""Focus lattice: examples, algebraic laws, and the oracle comparison."""

from itertools import combinations

import pytest

from focal.lattice import Focus, TOP, declare_lattice
from oracles import (
    oracle_canonical, oracle_elements, oracle_equal, oracle_leq, oracle_meet,
    subsets,
)


def members(*names):
    return Focus(frozenset(names))


class TestDeclareLattice:
    def test_free_two_generators(self):
        lat = declare_lattice(["s", "d"])
        got = {f.members for f in lat.elements()}
        assert got == {frozenset(), frozenset({"s"}), frozenset({"d"}),
                       frozenset({"s", "d"})}
        # agrees with the congruence-closure model
        assert got == set(oracle_elements(["s", "d"], []))

    def test_presented_diff_below_super(self):
        lat = declare_lattice(["diff", "super"], [("diff", "super")])
        got = {f.members for f in lat.elements()}
        assert got == {frozenset(), frozenset({"super"}),
                       frozenset({"diff", "super"})}
        assert lat.canonicalize({"diff"}) == members("diff", "super")
        assert lat.canonicalize({"diff"}).members == \
            oracle_canonical(["diff", "super"], [("diff", "super")], {"diff"})

    def test_empty_presentation(self):
        lat = declare_lattice([])
        assert lat.elements() == (TOP,)

    def test_duplicate_generator(self):
        with pytest.raises(ValueError, match="duplicate"):
            declare_lattice(["s", "s"])

    def test_unknown_relation_endpoint(self):
        with pytest.raises(ValueError, match="unknown"):
            declare_lattice(["s"], [("s", "d")])


class TestMeet:
    def test_union_of_singletons(self):
        lat = declare_lattice(["s", "d"])
        assert lat.meet(members("s"), members("d")) == members("s", "d")

    def test_top_is_identity(self):
        lat = declare_lattice(["s", "d"])
        for f in lat.elements():
            assert lat.meet(f, TOP) == f
            assert lat.meet(TOP, f) == f

    def test_nested_absorption(self):
        # diff . super = diff
        lat = declare_lattice(["diff", "super"], [("diff", "super")])
        diff = lat.canonicalize({"diff"})
        sup = lat.canonicalize({"super"})
        assert lat.meet(diff, sup) == diff
        assert oracle_meet(["diff", "super"], [("diff", "super")],
                           {"diff", "super"}, {"super"}) == diff.members


class TestLeq:
    def test_top_is_maximum(self):
        lat = declare_lattice(["s", "d"])
        for f in lat.elements():
            assert lat.leq(f, TOP)

    def test_singletons_against_pair(self):
        lat = declare_lattice(["s", "d"])
        assert lat.leq(members("s", "d"), members("s"))
        assert not lat.leq(members("s"), members("s", "d"))

    def test_top_not_below_singleton(self):
        lat = declare_lattice(["s", "d"])
        assert not lat.leq(TOP, members("s"))

    def test_matches_meet_absorption(self):
        lat = declare_lattice(["s", "d"])
        for f in lat.elements():
            for g in lat.elements():
                assert lat.leq(f, g) == (lat.meet(f, g) == f)


def test_top_of_every_lattice():
    for lat in (declare_lattice(["s", "d"]),
                declare_lattice(["diff", "super"], [("diff", "super")]),
                declare_lattice([])):
        assert lat.top() == TOP
        assert lat.meet(lat.top(), lat.top()) == lat.top()


def test_canonicalize_idempotent():
    lat = declare_lattice(["a", "b", "c"], [("a", "b"), ("b", "c")])
    for f in lat.elements():
        assert lat.canonicalize(f.members) == f
        assert lat.is_canonical(f)


def _all_presentations(max_gens=3, max_rels=3):
    pool = ["a", "b", "c"]
    for n in range(max_gens + 1):
        gens = pool[:n]
        pairs = [(g, h) for g in gens for h in gens if g != h]
        for k in range(min(max_rels, len(pairs)) + 1):
            for rels in combinations(pairs, k):
                yield gens, list(rels)


def test_exhaustive_laws_against_oracle():
    """Every lattice with up to 3 generators and 3 relations: the
    semilattice laws hold and agree with the congruence closure."""
    checked = 0
    for gens, rels in _all_presentations():
        lat = declare_lattice(gens, rels)
        elems = lat.elements()
        # canonical forms agree with the oracle
        for s in subsets(gens):
            assert lat.canonicalize(s).members == oracle_canonical(
                gens, rels, s), (gens, rels, s)
        # element count agrees
        assert {f.members for f in elems} == set(oracle_elements(gens, rels))
        for f in elems:
            assert lat.meet(f, f) == f
            assert lat.meet(f, TOP) == f
            assert lat.leq(f, f)
            for g in elems:
                m = lat.meet(f, g)
                assert m == lat.meet(g, f)
                assert m.members == oracle_meet(gens, rels,
                                                f.members, g.members)
                assert lat.leq(f, g) == oracle_leq(gens, rels,
                                                   f.members, g.members)
                assert lat.leq(f, g) == (m == f)
                if lat.leq(f, g) and lat.leq(g, f):
                    assert f == g
                for h in elems:
                    assert lat.meet(lat.meet(f, g), h) == \
                        lat.meet(f, lat.meet(g, h))
                    if lat.leq(f, g) and lat.leq(g, h):
                        assert lat.leq(f, h)
        checked += 1
    # 1 empty + 1 one-generator + 4 two-generator + 42 three-generator
    assert checked == 48
