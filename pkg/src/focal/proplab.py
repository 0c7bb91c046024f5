"""Derivation-directed random generation and admissibility properties.

Terms are generated top-down following the typing rules, so every output
checks by construction: the generator picks a goal type, then builds an
inhabitant choosing among variables, constants, lambdas, applications,
pairs and the modal introduction and elimination forms, respecting every
crispness side condition as it goes.  Re-checking the output with the
kernel is the soundness oracle.

The admissibility runner replays the structural metatheory on generated
derivations: weakening, promotion, divide-weakening, crisp substitution,
the promotion and division composition equations, and the subsequence
relation between division-after-promotion and promotion-after-division.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from . import kernel
from .context import Context, divide, promote
from .kernel import CheckState, Diagnostic
from .lattice import Focus, FocusLattice, declare_lattice
from .pretty import pretty, pretty_context
from .syntax import (
    App, Const, Flat, FlatElim, FlatIntro, Id, Lam, Pair, Pi, Postulate,
    Refl, Sharp, SharpElim, SharpIntro, Sigma, Signature, Term, Universe,
    Var, free_variables,
)


class GenerationExhausted(Exception):
    """The generator ran out of retries for the requested shape."""


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_context_depth: int = 4
    max_term_size: int = 7
    lattice: FocusLattice = field(default_factory=lambda: declare_lattice(["s"]))
    retries: int = 80

    def __post_init__(self):
        if self.max_context_depth <= 0 or self.max_term_size <= 0:
            raise ValueError("generator bounds must be positive")


def base_signature(lattice: FocusLattice) -> Signature:
    """Postulates every generated judgment may mention."""
    entries = [
        Postulate("A0", Universe(0)),
        Postulate("B0", Universe(0)),
        Postulate("a0", Const("A0")),
        Postulate("a1", Const("A0")),
        Postulate("b0", Const("B0")),
        Postulate("f0", Pi("x", Const("A0"), Const("B0"))),
    ]
    sig, diags = kernel.check_signature(lattice, entries)
    assert not diags, [d.message for d in diags]
    return sig


def _focus(rng: random.Random, lattice: FocusLattice) -> Focus:
    return rng.choice(lattice.elements())


def gen_type(rng: random.Random, state: CheckState, size: int) -> Term:
    """A type well-formed in the given state."""
    lattice = state.lattice
    options = ["base", "base"]
    if size > 1:
        options += ["flat", "sharp", "pi", "sigma", "id"]
    match rng.choice(options):
        case "base":
            return Const(rng.choice(["A0", "B0"]))
        case "flat":
            f = _focus(rng, lattice)
            return Flat(f, gen_type(rng, state.divided(f), size - 1))
        case "sharp":
            f = _focus(rng, lattice)
            return Sharp(f, gen_type(rng, state.promoted(f), size - 1))
        case "pi":
            x = f"v{rng.randrange(10**6)}"
            dom = gen_type(rng, state, size // 2)
            st2 = state.bound(x, lattice.top(), dom)
            return Pi(x, dom, gen_type(rng, st2, size // 2))
        case "sigma":
            x = f"v{rng.randrange(10**6)}"
            first = gen_type(rng, state, size // 2)
            st2 = state.bound(x, lattice.top(), first)
            return Sigma(x, first, gen_type(rng, st2, size // 2))
        case "id":
            ty = gen_type(rng, state, 1)
            a = gen_term(rng, state, ty, size // 2)
            return Id(ty, a, a)
    raise AssertionError


def gen_term(rng: random.Random, state: CheckState, goal: Term,
             size: int, infer_ok: bool = False) -> Term:
    """An inhabitant of goal, following the typing rules top-down.

    Elimination scrutinees sit in inference position, so they are
    generated with infer_ok set, which rules out the forms the checker
    can only handle against a known type (bare lambdas and pairs).
    """
    sig = state.signature
    lattice = state.lattice
    w = kernel.whnf(sig, goal, delta=True)

    leaves = []
    for e in state.context:
        if kernel.convertible(state, e.type, goal):
            leaves.append(Var(e.name))
    for e in sig.entries:
        if isinstance(e, Postulate) and not isinstance(e.type, (Pi, Universe)):
            if kernel.convertible(state, e.type, goal):
                leaves.append(Const(e.name))

    builders = []
    match w:
        case Pi(x, dom, cod) if not infer_ok:
            def by_lam():
                x2 = f"v{rng.randrange(10**6)}"
                st2 = state.bound(x2, lattice.top(), dom)
                from .syntax import rename
                return Lam(x2, gen_term(rng, st2, rename(cod, x, x2), size - 1))
            builders.append(by_lam)
        case Sigma(x, first, second) if not infer_ok:
            def by_pair():
                from .syntax import substitute
                a = gen_term(rng, state, first, size // 2)
                return Pair(a, gen_term(rng, state,
                                        substitute(second, x, a), size // 2))
            builders.append(by_pair)
        case Id(ty, lhs, rhs):
            if kernel.convertible(state, lhs, rhs, ty) and (
                    not infer_ok or _inferable(lhs)):
                builders.append(lambda: Refl(lhs))
        case Flat(f, comp):
            def by_flat_intro():
                return FlatIntro(f, gen_term(rng, state.divided(f),
                                             comp, size - 1, infer_ok))
            builders.append(by_flat_intro)
        case Sharp(f, comp):
            def by_sharp_intro():
                return SharpIntro(f, gen_term(rng, state.promoted(f),
                                              comp, size - 1, infer_ok))
            builders.append(by_sharp_intro)

    if size > 1:
        def by_app():
            for e in state.context:
                tf = kernel.whnf(sig, e.type, delta=True)
                if isinstance(tf, Pi) and tf.binder not in \
                        free_variables(tf.codomain) and \
                        kernel.convertible(state, tf.codomain, goal):
                    arg = gen_term(rng, state, tf.domain, size - 1)
                    return App(Var(e.name), arg)
            fe = sig.lookup("f0")
            if fe is not None and kernel.convertible(state, fe.type.codomain,
                                                     goal):
                return App(Const("f0"),
                           gen_term(rng, state, fe.type.domain, size - 1))
            raise GenerationExhausted("no usable function")
        builders.append(by_app)

        def by_flat_elim():
            f = _focus(rng, lattice)
            c = _focus(rng, lattice)
            inner = gen_type(rng, state.divided(lattice.meet(c, f)), 1)
            scrut = gen_term(rng, state.divided(c), Flat(f, inner),
                             size // 2, infer_ok=True)
            u = f"v{rng.randrange(10**6)}"
            st2 = state.bound(u, lattice.meet(c, f), inner)
            branch = gen_term(rng, st2, goal, size // 2, infer_ok)
            return FlatElim(f, c, None, None, scrut, u, branch)
        builders.append(by_flat_elim)

        def by_sharp_elim():
            # the goal must survive the division: every free variable's
            # annotation below the chosen focus
            fv = free_variables(goal)
            candidates = [
                f for f in lattice.elements()
                if all(lattice.leq(e.annotation, f)
                       for e in state.context if e.name in fv)
            ]
            f = rng.choice(candidates)
            n = gen_term(rng, state.divided(f), Sharp(f, goal),
                         size - 1, infer_ok=True)
            return SharpElim(f, n)
        builders.append(by_sharp_elim)

    # One builder attempt, then a leaf fallback: retrying builders at
    # every recursion level would blow up exponentially.
    use_leaf = leaves and (size <= 1 or not builders or rng.random() < 0.4)
    if not use_leaf and builders:
        try:
            return rng.choice(builders)()
        except (GenerationExhausted, RecursionError):
            pass
    if leaves:
        return rng.choice(leaves)
    raise GenerationExhausted("no inhabitant for the requested type")


def _inferable(t: Term) -> bool:
    """Conservative: the forms the checker can synthesize a type for."""
    match t:
        case Lam(_, _, ann):
            return ann is not None
        case Pair(_, _):
            return False
        case FlatIntro(_, m) | SharpIntro(_, m) | Refl(m):
            return _inferable(m)
        case _:
            return True


def gen_context(rng: random.Random, sig: Signature, depth: int) -> Context:
    state = CheckState(sig)
    lattice = sig.lattice
    for i in range(rng.randrange(depth + 1)):
        f = _focus(rng, lattice)
        try:
            ty = gen_type(rng, state.divided(f), 2)
        except GenerationExhausted:
            continue
        state = state.bound(f"x{i}", f, ty)
    return state.context


def gen_wellformed(cfg: GenConfig, rng: random.Random | None = None):
    """A (context, term, type) triple that checks by construction."""
    rng = rng or random.Random(cfg.seed)
    sig = base_signature(cfg.lattice)
    for _ in range(cfg.retries):
        try:
            ctx = gen_context(rng, sig, cfg.max_context_depth)
            state = CheckState(sig, ctx)
            goal = gen_type(rng, state, max(1, cfg.max_term_size // 2))
            term = gen_term(rng, state, goal, cfg.max_term_size)
            return ctx, term, goal
        except GenerationExhausted:
            continue
    raise GenerationExhausted(
        f"no well-formed triple in {cfg.retries} attempts (seed {cfg.seed})")


# ---------------------------------------------------------------------------
# Admissibility properties


@dataclass(frozen=True)
class PropertyFailure:
    prop: str
    seed: int
    detail: str
    code: str | None = None
    shrunk: str = ""


@dataclass(frozen=True)
class AdmissibilityReport:
    cases: int
    checked: dict
    failures: tuple[PropertyFailure, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def render(self) -> str:
        lines = []
        for prop, n in sorted(self.checked.items()):
            status = "pass" if all(f.prop != prop for f in self.failures) \
                else "FAIL"
            lines.append(f"{status} {prop}: {n} cases")
        for f in self.failures:
            lines.append(f"FAIL {f.prop} (seed {f.seed}, code {f.code}): "
                         f"{f.detail}")
            if f.shrunk:
                lines.append(f"     shrunk: {f.shrunk}")
        lines.append(f"{self.cases} derivations, "
                     f"{len(self.failures)} failures")
        return "\n".join(lines)


def _recheck(sig, ctx, term, ty) -> str | None:
    """Returns a diagnostic code when the judgment fails, None when fine."""
    try:
        kernel.check(CheckState(sig, ctx), term, ty)
        return None
    except Diagnostic as d:
        return d.code


def _shrink(sig, ctx, term, ty, fails) -> str:
    """Greedy shrink: drop context entries not needed by the judgment,
    keeping the failure (and its code) alive."""
    used = free_variables(term) | free_variables(ty)
    entries = list(ctx.entries)
    changed = True
    while changed:
        changed = False
        for i in range(len(entries) - 1, -1, -1):
            if entries[i].name in used:
                continue
            cand = Context(tuple(entries[:i] + entries[i + 1:]))
            if fails(cand):
                entries = list(cand.entries)
                changed = True
                break
    small = Context(tuple(entries))
    return f"[{pretty_context(small, sig.lattice)}] |- " \
           f"{pretty(term, sig.lattice)} : {pretty(ty, sig.lattice)}"


def run_admissibility(cfg: GenConfig, n: int) -> AdmissibilityReport:
    rng = random.Random(cfg.seed)
    sig = base_signature(cfg.lattice)
    lattice = cfg.lattice
    checked = {p: 0 for p in (
        "generator-soundness", "weakening", "promotion", "divide-weakening",
        "crisp-substitution", "context-equations", "pro-divide-subsequence",
    )}
    failures = []

    def fail(prop, seed, detail, code=None, shrunk=""):
        failures.append(PropertyFailure(prop, seed, detail, code, shrunk))

    for case in range(n):
        seed = cfg.seed + case
        case_rng = random.Random(seed)
        try:
            ctx, term, ty = gen_wellformed(replace(cfg, seed=seed), case_rng)
        except GenerationExhausted as e:
            fail("generator-soundness", seed, str(e))
            continue

        # soundness: the generated triple re-checks
        checked["generator-soundness"] += 1
        code = _recheck(sig, ctx, term, ty)
        if code is not None:
            shrunk = _shrink(sig, ctx, term, ty,
                             lambda c: _recheck(sig, c, term, ty) == code)
            fail("generator-soundness", seed,
                 f"generated judgment does not check", code, shrunk)
            continue

        # weakening: insert a fresh entry at a random position
        checked["weakening"] += 1
        f = _focus(case_rng, lattice)
        pos = case_rng.randrange(len(ctx.entries) + 1)
        wentry = Context(ctx.entries[:pos]) \
            .appended("w_fresh", f, Const("B0")).entries \
            + ctx.entries[pos:]
        code = _recheck(sig, Context(wentry), term, ty)
        if code is not None:
            fail("weakening", seed,
                 f"inserting w_fresh :{lattice.show(f)} B0 at {pos} broke "
                 f"the judgment", code,
                 _shrink(sig, Context(wentry), term, ty,
                         lambda c: _recheck(sig, c, term, ty) == code))

        # promotion
        checked["promotion"] += 1
        f = _focus(case_rng, lattice)
        code = _recheck(sig, promote(lattice, f, ctx), term, ty)
        if code is not None:
            fail("promotion", seed,
                 f"promotion by {lattice.show(f)} broke the judgment", code)

        # divide-weakening: a judgment over divide(f, ctx) holds over ctx
        checked["divide-weakening"] += 1
        f = _focus(case_rng, lattice)
        sub = divide(lattice, f, ctx)
        try:
            st = CheckState(sig, sub)
            goal2 = gen_type(case_rng, st, 2)
            term2 = gen_term(case_rng, st, goal2, max(2, cfg.max_term_size // 2))
            code = _recheck(sig, ctx, term2, goal2)
            if code is not None:
                fail("divide-weakening", seed,
                     f"judgment over {lattice.show(f)}-division did not "
                     f"hold over the full context", code,
                     _shrink(sig, ctx, term2, goal2,
                             lambda c: _recheck(sig, c, term2, goal2) == code))
        except GenerationExhausted:
            checked["divide-weakening"] -= 1

        # crisp substitution through the checked API
        checked["crisp-substitution"] += 1
        if ctx.entries:
            i = case_rng.randrange(len(ctx.entries))
            entry = ctx.entries[i]
            prefix = Context(ctx.entries[:i])
            try:
                # the variable may sit in inference position inside the
                # judgment, so the replacement must be synthesizable
                s = gen_term(case_rng,
                             CheckState(sig, prefix).divided(entry.annotation),
                             entry.type, 3, infer_ok=True)
            except GenerationExhausted:
                s = None
            if s is not None:
                from .syntax import substitute
                try:
                    ctx2 = kernel.substitute_crisp(sig, ctx, entry.name, s)
                except Diagnostic as d:
                    ctx2 = None
                    fail("crisp-substitution", seed,
                         f"substituting a {lattice.show(entry.annotation)}-"
                         f"crisp term was rejected", d.code)
                if ctx2 is not None:
                    term2 = substitute(term, entry.name, s)
                    ty2 = substitute(ty, entry.name, s)
                    code = _recheck(sig, ctx2, term2, ty2)
                    if code is not None:
                        fail("crisp-substitution", seed,
                             "substituted judgment does not check", code,
                             _shrink(sig, ctx2, term2, ty2,
                                     lambda c: _recheck(sig, c, term2, ty2)
                                     == code))

        # context equations (exact structural equality)
        checked["context-equations"] += 1
        f = _focus(case_rng, lattice)
        g = _focus(case_rng, lattice)
        if promote(lattice, f, promote(lattice, g, ctx)) != \
                promote(lattice, lattice.meet(f, g), ctx):
            fail("context-equations", seed,
                 f"promotion by {lattice.show(f)} then {lattice.show(g)} is "
                 f"not promotion by the meet")
        if divide(lattice, f, divide(lattice, g, ctx)) != \
                divide(lattice, lattice.meet(g, f), ctx):
            fail("context-equations", seed,
                 f"division by {lattice.show(g)} then {lattice.show(f)} is "
                 f"not division by the meet")

        # promote-after-divide embeds into divide-after-promote
        checked["pro-divide-subsequence"] += 1
        pd = promote(lattice, f, divide(lattice, g, ctx)).entries
        dp = divide(lattice, g, promote(lattice, f, ctx)).entries
        it = iter(dp)
        if not all(e in it for e in pd):
            fail("pro-divide-subsequence", seed,
                 f"promote({lattice.show(f)}, divide({lattice.show(g)}, ctx))"
                 f" is not a subsequence of the reverse composite")

    return AdmissibilityReport(n, checked, tuple(failures))
