"""Surface syntax: parsing, elaboration, pretty-printing round trips."""

import random

import pytest

from focal import kernel
from focal.corpus import corpus_dir, load_manifest
from focal.lattice import declare_lattice
from focal.pretty import pretty
from focal.proplab import GenConfig, base_signature, gen_term, gen_type
from focal.kernel import CheckState
from focal.surface import (
    FocusDecl, RawDefinition, RawPostulate, build_lattice, check_source,
    elaborate, elaborate_term, parse_file, parse_term,
)
from focal.syntax import (
    Definition, Lam, Pi, Universe, alpha_equal, free_variables,
)


class TestParseDecls:
    def test_focus_generators(self):
        decls, diags = parse_file("focus s d;")
        assert not diags
        assert decls == [FocusDecl(("s", "d"), (), decls[0].span)]

    def test_focus_relation(self):
        decls, diags = parse_file("focus diff <= super;")
        assert not diags
        assert decls[0].relations == (("diff", "super"),)

    def test_postulate(self):
        decls, diags = parse_file("postulate A : Type 0;")
        assert not diags
        assert isinstance(decls[0], RawPostulate)
        assert decls[0].name == "A"

    def test_definition_with_nested_binders(self):
        decls, diags = parse_file(
            "def id : (A : Type 0) -> A -> A := fun A x => x;")
        assert not diags
        d = decls[0]
        assert isinstance(d, RawDefinition)
        lat = declare_lattice([])
        ty = elaborate_term(lat, d.type)
        body = elaborate_term(lat, d.body)
        assert isinstance(ty, Pi) and isinstance(ty.codomain, Pi)
        assert isinstance(body, Lam) and isinstance(body.body, Lam)

    def test_comments_only(self):
        decls, diags = parse_file("-- nothing here\n  -- more\n")
        assert decls == [] and diags == []
        sig, more = elaborate(decls)
        assert sig.entries == () and more == []

    def test_recovery_at_declaration_boundary(self):
        src = "postulate A : ;\npostulate B : Type 0;"
        decls, diags = parse_file(src)
        assert [d.code for d in diags] == ["E100"]
        assert len(decls) == 1 and decls[0].name == "B"

    def test_spans_inside_source(self):
        src = "focus s;\npostulate A : Type 0;\npostulate bad : flat{t} A;"
        sig, decls, diags = check_source(src)
        lines = src.splitlines()
        for d in diags:
            (l1, c1), (l2, c2) = d.span
            assert 1 <= l1 <= len(lines) and 1 <= l2 <= len(lines)
            assert 1 <= c1 <= len(lines[l1 - 1]) + 1
            assert 1 <= c2 <= len(lines[l2 - 1]) + 2


class TestElaborate:
    def test_unknown_focus_is_E005(self):
        sig, decls, diags = check_source(
            "focus s;\npostulate A : Type 0;\npostulate x : flat{t} A;")
        assert [d.code for d in diags] == ["E005"]

    def test_canonicalizes_nested_focus(self):
        src = "focus diff <= super;\npostulate A : Type 0;\n" \
              "postulate x : flat{diff} A;"
        sig, decls, diags = check_source(src)
        assert not diags
        entry = sig.lookup("x")
        assert entry.type.focus.members == frozenset({"diff", "super"})

    def test_duplicate_declaration_is_E102(self):
        sig, decls, diags = check_source(
            "postulate A : Type 0;\npostulate A : Type 0;")
        assert [d.code for d in diags] == ["E102"]
        assert len(sig.entries) == 1

    def test_kernel_errors_get_decl_span(self):
        src = "focus s;\npostulate A : Type 0;\n" \
              "def bad : A -> flat{s} A := fun x => x .flat{s};"
        sig, decls, diags = check_source(src)
        assert [d.code for d in diags] == ["E001"]
        assert diags[0].span[0][0] == 3


def _roundtrip(term, lattice, bound=frozenset()):
    text = pretty(term, lattice)
    raw = parse_term(text)
    back = elaborate_term(lattice, raw, bound=bound)
    assert alpha_equal(back, term), f"{text!r} reparsed differently"


class TestRoundTrip:
    def test_fixed_forms(self):
        lat = declare_lattice(["s", "d"])
        s = lat.canonicalize({"s"})
        sd = lat.canonicalize({"s", "d"})
        from focal.syntax import (
            App, Const, Flat, FlatElim, FlatIntro, Fst, Id, J, Pair, Refl,
            Sharp, SharpElim, SharpIntro, Sigma, Snd, Var,
        )
        cases = [
            Universe(3),
            Pi("x", Const("A"), Const("B")),
            Pi("x", Const("A"), App(Const("P"), Var("x"))),
            Sigma("x", Const("A"), Const("B")),
            Lam("x", Var("x")),
            Lam("x", Lam("y", App(Var("x"), Var("y")))),
            Lam("x", Var("x"), Const("A")),
            Pair(Const("a"), Const("b")),
            Fst(Const("p")), Snd(Const("p")),
            Id(Const("A"), Const("a"), Const("a")),
            Refl(Const("a")),
            J("x", "y", "p", Id(Const("A"), Var("y"), Var("x")),
              Lam("z", Refl(Var("z"))), Const("q")),
            Flat(s, Const("A")),
            FlatIntro(s, Const("a")),
            Sharp(sd, Const("A")),
            SharpIntro(s, Const("a")),
            SharpElim(s, Const("n")),
            FlatElim(s, lat.top(), None, None, Const("m"), "u", Var("u")),
            FlatElim(s, sd, "x", Id(Flat(s, Const("A")), Var("x"), Var("x")),
                     Const("m"), "u", Refl(FlatIntro(s, Var("u")))),
            App(App(Const("f"), Const("a")), Const("b")),
            App(Const("f"), App(Const("g"), Const("a"))),
            Fst(App(Const("f"), Const("a"))),
            App(Const("f"), Fst(Const("p"))),
            FlatIntro(s, FlatElim(s, lat.top(), None, None, Const("m"),
                                  "u", Var("u"))),
            SharpIntro(s, SharpElim(s, Const("n"))),
            Pi("f", Pi("x", Const("A"), Const("B")), Const("B")),
        ]
        for t in cases:
            _roundtrip(t, lat)

    def test_nested_let_scrutinee(self):
        lat = declare_lattice(["s"])
        s = lat.canonicalize({"s"})
        from focal.syntax import Const, FlatElim, Var
        inner = FlatElim(s, lat.top(), None, None, Const("m"), "v", Var("v"))
        outer = FlatElim(s, s, None, None, inner, "u", Var("u"))
        _roundtrip(outer, lat)

    def test_generated_terms(self):
        lat = declare_lattice(["s", "d"])
        sig = base_signature(lat)
        rng = random.Random(17)
        done = 0
        while done < 150:
            st = CheckState(sig)
            try:
                ty = gen_type(rng, st, 3)
                t = gen_term(rng, st, ty, 6)
            except Exception:
                continue
            done += 1
            _roundtrip(t, lat)
            _roundtrip(ty, lat)

    def test_corpus_definitions(self):
        manifest = load_manifest()
        for entry in manifest.entries:
            if entry.expectation != "ACCEPT":
                continue
            text = (manifest.root / entry.path).read_text()
            sig, decls, diags = check_source(text)
            assert not diags
            for e in sig.entries:
                _roundtrip(e.type, sig.lattice)
                if isinstance(e, Definition):
                    _roundtrip(e.body, sig.lattice)


class TestPrettyText:
    def test_universe(self):
        assert pretty(Universe(3)) == "Type 3"

    def test_flat_intro_postfix(self):
        lat = declare_lattice(["s"])
        from focal.syntax import Const, FlatIntro
        s = lat.canonicalize({"s"})
        assert pretty(FlatIntro(s, Const("k")), lat) == "k .flat{s}"

    def test_focus_set_in_declaration_order(self):
        lat = declare_lattice(["s", "d"])
        from focal.syntax import Const, Sharp
        sd = lat.canonicalize({"d", "s"})
        assert pretty(Sharp(sd, Const("A")), lat) == "sharp{s d} A"

    def test_top_focus_prints_empty_braces(self):
        lat = declare_lattice(["s"])
        from focal.syntax import Const, SharpElim
        assert pretty(SharpElim(lat.top(), Const("n")), lat) == \
            "n .unsharp{}"

    def test_freshened_binders_sanitized(self):
        lat = declare_lattice(["s"])
        from focal.syntax import App, Pi, Var, fresh_name
        inner = fresh_name("x")
        # a binder carrying a freshened name collides with a free 'x'
        t = Pi(inner, Var("T"), App(Var("x"), Var(inner)))
        text = pretty(t, lat)
        assert "#" not in text
        _roundtrip(t, lat, bound=frozenset({"x", "T"}))

    def test_application_groups_correctly(self):
        lat = declare_lattice([])
        from focal.syntax import App, Const, Fst
        assert pretty(Fst(App(Const("f"), Const("a"))), lat) == "(f a) .1"
        assert pretty(App(Const("f"), Fst(Const("p"))), lat) == "f p .1"


class TestBuildLattice:
    def test_relation_autodeclares(self):
        decls, _ = parse_file("focus diff <= super;")
        lat = build_lattice(decls)
        assert set(lat.generators) == {"diff", "super"}

    def test_redeclaration_tolerated(self):
        decls, _ = parse_file("focus s;\nfocus s;")
        lat = build_lattice(decls)
        assert lat.generators == ("s",)

    def test_inline_duplicate_rejected(self):
        decls, _ = parse_file("focus s s;")
        with pytest.raises(kernel.Diagnostic) as e:
            build_lattice(decls)
        assert e.value.code == "E005"
