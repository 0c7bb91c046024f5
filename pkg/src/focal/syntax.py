"""Core term language.

Terms are immutable trees over named variables.  Binders are
alpha-renamable: every kernel operation treats alpha-equivalent terms
as indistinguishable, and substitution freshens binders to avoid
capture.  Besides universes and the usual Pi/Sigma/Id formers, there
are four modal constructs per focus f:

    Flat(f, A)                  the discrete retopologization of A
    FlatIntro(f, M)             M^flat, for f-crisp M
    FlatElim(f, c, ...)         let-style induction; c is the crispness
                                kept by the bound variable (annotation
                                meet(c, f)); stored explicitly so typing
                                is syntax-directed
    Sharp(f, A)                 the codiscrete retopologization of A
    SharpIntro(f, M)            M^sharp, usable as though f-crisp
    SharpElim(f, N)             extraction from an f-crisp N

Fresh internal names contain a '#'; the surface syntax never produces
one, so freshened binders cannot collide with user variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .lattice import Focus


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class Universe(Term):
    level: int


@dataclass(frozen=True)
class Pi(Term):
    binder: str
    domain: Term
    codomain: Term


@dataclass(frozen=True)
class Lam(Term):
    binder: str
    body: Term
    annotation: Term | None = None


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Sigma(Term):
    binder: str
    first: Term
    second: Term


@dataclass(frozen=True)
class Pair(Term):
    first: Term
    second: Term


@dataclass(frozen=True)
class Fst(Term):
    pair: Term


@dataclass(frozen=True)
class Snd(Term):
    pair: Term


@dataclass(frozen=True)
class Id(Term):
    type: Term
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Refl(Term):
    arg: Term


@dataclass(frozen=True)
class J(Term):
    # motive binds (var_lhs, var_rhs, var_path) in motive_body;
    # refl_case is a function of the diagonal point.
    var_lhs: str
    var_rhs: str
    var_path: str
    motive: Term
    refl_case: Term
    path: Term


@dataclass(frozen=True)
class Flat(Term):
    focus: Focus
    type: Term


@dataclass(frozen=True)
class FlatIntro(Term):
    focus: Focus
    body: Term


@dataclass(frozen=True)
class FlatElim(Term):
    focus: Focus
    crisp: Focus
    motive_binder: str | None
    motive: Term | None
    scrutinee: Term
    binder: str
    branch: Term


@dataclass(frozen=True)
class Sharp(Term):
    focus: Focus
    type: Term


@dataclass(frozen=True)
class SharpIntro(Term):
    focus: Focus
    body: Term


@dataclass(frozen=True)
class SharpElim(Term):
    focus: Focus
    body: Term


@dataclass(frozen=True)
class Postulate:
    name: str
    type: Term


@dataclass(frozen=True)
class Definition:
    name: str
    type: Term
    body: Term


@dataclass(frozen=True)
class Signature:
    """Declared focus lattice plus checked constants, in dependency order."""

    lattice: object
    entries: tuple = ()

    def lookup(self, name: str):
        for e in self.entries:
            if e.name == name:
                return e
        return None

    def with_entry(self, entry) -> "Signature":
        return Signature(self.lattice, self.entries + (entry,))


_fresh_counter = itertools.count(1)


def fresh_name(base: str = "x") -> str:
    base = base.split("#", 1)[0] or "x"
    return f"{base}#{next(_fresh_counter)}"


def base_name(name: str) -> str:
    return name.split("#", 1)[0] or "x"


def free_variables(t: Term) -> frozenset[str]:
    match t:
        case Var(x):
            return frozenset({x})
        case Const(_) | Universe(_):
            return frozenset()
        case Pi(x, dom, cod) | Sigma(x, dom, cod):
            return free_variables(dom) | (free_variables(cod) - {x})
        case Lam(x, body, ann):
            fv = free_variables(body) - {x}
            return fv | free_variables(ann) if ann is not None else fv
        case App(f, a):
            return free_variables(f) | free_variables(a)
        case Pair(a, b):
            return free_variables(a) | free_variables(b)
        case Fst(p) | Snd(p):
            return free_variables(p)
        case Id(ty, l, r):
            return free_variables(ty) | free_variables(l) | free_variables(r)
        case Refl(a):
            return free_variables(a)
        case J(x, y, p, motive, case_, path):
            return (free_variables(motive) - {x, y, p}) \
                | free_variables(case_) | free_variables(path)
        case Flat(_, a) | Sharp(_, a):
            return free_variables(a)
        case FlatIntro(_, m) | SharpIntro(_, m) | SharpElim(_, m):
            return free_variables(m)
        case FlatElim(_, _, mx, motive, scrut, u, branch):
            fv = free_variables(scrut) | (free_variables(branch) - {u})
            if motive is not None:
                fv |= free_variables(motive) - {mx}
            return fv
    raise TypeError(f"not a term: {t!r}")


def substitute(t: Term, x: str, s: Term) -> Term:
    """Capture-avoiding substitution of s for every free occurrence of x."""
    return _subst(t, {x: s})


def rename(t: Term, old: str, new: str) -> Term:
    return _subst(t, {old: Var(new)})


def _subst(t: Term, sub: dict[str, Term]) -> Term:
    if not sub:
        return t

    def under(binder: str, body: Term, extra: Term | None = None):
        # Returns (binder', body') with the binder renamed if it would
        # capture a free variable of the substitution images.
        inner = {k: v for k, v in sub.items() if k != binder}
        if not inner:
            return binder, body
        if any(binder in free_variables(v) for v in inner.values()):
            b2 = fresh_name(binder)
            body = _subst(body, {binder: Var(b2)})
            binder = b2
        return binder, _subst(body, inner)

    match t:
        case Var(y):
            return sub.get(y, t)
        case Const(_) | Universe(_):
            return t
        case Pi(x, dom, cod):
            x2, cod2 = under(x, cod)
            return Pi(x2, _subst(dom, sub), cod2)
        case Sigma(x, dom, cod):
            x2, cod2 = under(x, cod)
            return Sigma(x2, _subst(dom, sub), cod2)
        case Lam(x, body, ann):
            ann2 = _subst(ann, sub) if ann is not None else None
            x2, body2 = under(x, body)
            return Lam(x2, body2, ann2)
        case App(f, a):
            return App(_subst(f, sub), _subst(a, sub))
        case Pair(a, b):
            return Pair(_subst(a, sub), _subst(b, sub))
        case Fst(p):
            return Fst(_subst(p, sub))
        case Snd(p):
            return Snd(_subst(p, sub))
        case Id(ty, l, r):
            return Id(_subst(ty, sub), _subst(l, sub), _subst(r, sub))
        case Refl(a):
            return Refl(_subst(a, sub))
        case J(x, y, p, motive, case_, path):
            inner = {k: v for k, v in sub.items() if k not in (x, y, p)}
            if inner and any(
                b in free_variables(v) for v in inner.values() for b in (x, y, p)
            ):
                x2, y2, p2 = fresh_name(x), fresh_name(y), fresh_name(p)
                motive = _subst(motive, {x: Var(x2), y: Var(y2), p: Var(p2)})
                x, y, p = x2, y2, p2
                inner = {k: v for k, v in sub.items() if k not in (x, y, p)}
            return J(x, y, p, _subst(motive, inner),
                     _subst(case_, sub), _subst(path, sub))
        case Flat(f, a):
            return Flat(f, _subst(a, sub))
        case Sharp(f, a):
            return Sharp(f, _subst(a, sub))
        case FlatIntro(f, m):
            return FlatIntro(f, _subst(m, sub))
        case SharpIntro(f, m):
            return SharpIntro(f, _subst(m, sub))
        case SharpElim(f, m):
            return SharpElim(f, _subst(m, sub))
        case FlatElim(f, c, mx, motive, scrut, u, branch):
            if motive is not None:
                mx2, motive2 = under(mx, motive)
            else:
                mx2, motive2 = mx, None
            u2, branch2 = under(u, branch)
            return FlatElim(f, c, mx2, motive2, _subst(scrut, sub), u2, branch2)
    raise TypeError(f"not a term: {t!r}")


def alpha_equal(a: Term, b: Term) -> bool:
    """Equality up to consistent renaming of bound variables."""
    return _alpha(a, b, {}, {}, 0)


def _alpha(a: Term, b: Term, la: dict, lb: dict, depth: int) -> bool:
    # la/lb map bound names to the index of the binder that bound them;
    # depth counts binders passed on the path from the root.
    def bind(x, y):
        la2 = dict(la)
        lb2 = dict(lb)
        la2[x] = depth
        lb2[y] = depth
        return la2, lb2

    match a, b:
        case Var(x), Var(y):
            if x in la or y in lb:
                return la.get(x) == lb.get(y)
            return x == y
        case Const(x), Const(y):
            return x == y
        case Universe(i), Universe(j):
            return i == j
        case Pi(x, d1, c1), Pi(y, d2, c2):
            if not _alpha(d1, d2, la, lb, depth):
                return False
            la2, lb2 = bind(x, y)
            return _alpha(c1, c2, la2, lb2, depth + 1)
        case Sigma(x, d1, c1), Sigma(y, d2, c2):
            if not _alpha(d1, d2, la, lb, depth):
                return False
            la2, lb2 = bind(x, y)
            return _alpha(c1, c2, la2, lb2, depth + 1)
        case Lam(x, b1, a1), Lam(y, b2, a2):
            if (a1 is None) != (a2 is None):
                return False
            if a1 is not None and not _alpha(a1, a2, la, lb, depth):
                return False
            la2, lb2 = bind(x, y)
            return _alpha(b1, b2, la2, lb2, depth + 1)
        case App(f1, x1), App(f2, x2):
            return _alpha(f1, f2, la, lb, depth) and _alpha(x1, x2, la, lb, depth)
        case Pair(x1, y1), Pair(x2, y2):
            return _alpha(x1, x2, la, lb, depth) and _alpha(y1, y2, la, lb, depth)
        case Fst(p1), Fst(p2):
            return _alpha(p1, p2, la, lb, depth)
        case Snd(p1), Snd(p2):
            return _alpha(p1, p2, la, lb, depth)
        case Id(t1, l1, r1), Id(t2, l2, r2):
            return _alpha(t1, t2, la, lb, depth) and _alpha(l1, l2, la, lb, depth) \
                and _alpha(r1, r2, la, lb, depth)
        case Refl(x1), Refl(x2):
            return _alpha(x1, x2, la, lb, depth)
        case J(x1, y1, p1, m1, c1, q1), J(x2, y2, p2, m2, c2, q2):
            la2, lb2 = dict(la), dict(lb)
            for i, (u, v) in enumerate(((x1, x2), (y1, y2), (p1, p2))):
                la2[u] = depth + i
                lb2[v] = depth + i
            return _alpha(m1, m2, la2, lb2, depth + 3) \
                and _alpha(c1, c2, la, lb, depth) \
                and _alpha(q1, q2, la, lb, depth)
        case Flat(f1, t1), Flat(f2, t2):
            return f1 == f2 and _alpha(t1, t2, la, lb, depth)
        case Sharp(f1, t1), Sharp(f2, t2):
            return f1 == f2 and _alpha(t1, t2, la, lb, depth)
        case FlatIntro(f1, m1), FlatIntro(f2, m2):
            return f1 == f2 and _alpha(m1, m2, la, lb, depth)
        case SharpIntro(f1, m1), SharpIntro(f2, m2):
            return f1 == f2 and _alpha(m1, m2, la, lb, depth)
        case SharpElim(f1, m1), SharpElim(f2, m2):
            return f1 == f2 and _alpha(m1, m2, la, lb, depth)
        case (FlatElim(f1, c1, mx1, mo1, s1, u1, n1),
              FlatElim(f2, c2, mx2, mo2, s2, u2, n2)):
            if f1 != f2 or c1 != c2 or (mo1 is None) != (mo2 is None):
                return False
            if not _alpha(s1, s2, la, lb, depth):
                return False
            if mo1 is not None:
                la2, lb2 = bind(mx1, mx2)
                if not _alpha(mo1, mo2, la2, lb2, depth + 1):
                    return False
            la2, lb2 = bind(u1, u2)
            return _alpha(n1, n2, la2, lb2, depth + 1)
    return False
