"""Generators and the admissibility runner."""

import random

import pytest

from focal import kernel
from focal.kernel import CheckState
from focal.lattice import declare_lattice
from focal.proplab import (
    GenConfig, GenerationExhausted, base_signature, gen_context,
    gen_wellformed, run_admissibility, _shrink,
)
from focal.syntax import free_variables

LAT1 = declare_lattice(["s"])
LAT2 = declare_lattice(["s", "d"])
NESTED = declare_lattice(["diff", "super"], [("diff", "super")])


def test_bounds_must_be_positive():
    with pytest.raises(ValueError):
        GenConfig(max_context_depth=0)
    with pytest.raises(ValueError):
        GenConfig(max_term_size=0)


def test_size_one_produces_a_leaf():
    cfg = GenConfig(seed=1, max_term_size=1, max_context_depth=2,
                    lattice=LAT1)
    ctx, term, ty = gen_wellformed(cfg)
    from focal.syntax import Const, Refl, Var
    assert isinstance(term, (Var, Const, Refl))


def test_generated_triples_recheck():
    sig = base_signature(LAT2)
    ok = 0
    for seed in range(200):
        cfg = GenConfig(seed=seed, lattice=LAT2)
        try:
            ctx, term, ty = gen_wellformed(cfg, random.Random(seed))
        except GenerationExhausted:
            continue
        kernel.check(CheckState(sig, ctx), term, ty)
        ok += 1
    assert ok >= 190


def test_single_generator_lattice_annotations():
    # with one generator the only annotations are top and the generator
    sig = base_signature(LAT1)
    elems = set(LAT1.elements())
    assert len(elems) == 2
    for seed in range(30):
        rng = random.Random(seed)
        ctx = gen_context(rng, sig, 4)
        for e in ctx:
            assert e.annotation in elems


def test_admissibility_small_runs_clean():
    for lat in (LAT1, LAT2, NESTED):
        rep = run_admissibility(GenConfig(seed=3, lattice=lat), 50)
        assert rep.ok, rep.render()
        assert rep.cases == 50


def test_empty_run_is_a_passing_report():
    rep = run_admissibility(GenConfig(seed=0, lattice=LAT1), 0)
    assert rep.ok
    assert rep.cases == 0
    assert "0 failures" in rep.render()


def test_report_mentions_seed_on_failure():
    # inject a fake failure record through the rendering path
    from focal.proplab import AdmissibilityReport, PropertyFailure
    rep = AdmissibilityReport(
        1, {"weakening": 1},
        (PropertyFailure("weakening", 17, "detail", "E002", "shrunk form"),))
    text = rep.render()
    assert "seed 17" in text and "E002" in text and "shrunk form" in text
    assert not rep.ok


def test_shrink_preserves_failure_code():
    # a fabricated failure: the judgment fails because the goal names a
    # type that does not match; shrinking must keep that same code while
    # dropping unrelated entries
    from focal.context import Context, ContextEntry
    from focal.lattice import TOP
    from focal.syntax import Const, Var
    sig = base_signature(LAT2)
    ctx = Context((
        ContextEntry("pad1", TOP, Const("A0")),
        ContextEntry("x", TOP, Const("A0")),
        ContextEntry("pad2", TOP, Const("B0")),
    ))
    term, ty = Var("x"), Const("B0")

    def fails(c):
        try:
            kernel.check(CheckState(sig, c), term, ty)
            return False
        except kernel.Diagnostic as d:
            return d.code == "E002"

    assert fails(ctx)
    shrunk = _shrink(sig, ctx, term, ty, fails)
    assert "pad1" not in shrunk and "pad2" not in shrunk
    assert "x" in shrunk
