"""Pretty-printer for core terms.

Output is valid surface syntax: feeding it back through the parser and
elaborator yields an alpha-equal term.  Binder names invented during
checking contain '#'; they are sanitized here, with a numeric suffix
added only when the sanitized name would collide with one already in
scope.

Precedence levels, loosest first: binders and arrows (0), application
and the prefix keyword forms (1), postfix projections and modal marks
(2), atoms (3).  A node is parenthesized when its level is below what
its position requires.
"""

from __future__ import annotations

from .lattice import Focus
from .syntax import (
    App, Const, Definition, FlatElim, Flat, FlatIntro, Fst, Id, J, Lam, Pair,
    Pi, Postulate, Refl, SharpElim, Sharp, SharpIntro, Sigma, Snd, Term,
    Universe, Var, base_name, free_variables, rename,
)

_BINDER, _APP, _POSTFIX, _ATOM = 0, 1, 2, 3


def pretty(t: Term, lattice=None) -> str:
    return _render(t, _BINDER, free_variables(t), lattice)


def pretty_focus(f: Focus, lattice=None) -> str:
    if lattice is not None:
        return lattice.show(f)
    return "{" + " ".join(sorted(f.members)) + "}"


def pretty_signature_entry(entry, lattice=None) -> str:
    if isinstance(entry, Postulate):
        return f"postulate {entry.name} : {pretty(entry.type, lattice)};"
    if isinstance(entry, Definition):
        return (f"def {entry.name} : {pretty(entry.type, lattice)}"
                f" := {pretty(entry.body, lattice)};")
    raise TypeError(f"not a signature entry: {entry!r}")


def pretty_context(ctx, lattice=None) -> str:
    """Render a telescope for diagnostics: name :{focus} type, ..."""
    bits = []
    for e in ctx:
        ann = pretty_focus(e.annotation, lattice)
        bits.append(f"{e.name} :{ann} {pretty(e.type, lattice)}")
    return ", ".join(bits)


def _pick(name: str, scope) -> str:
    cand = base_name(name)
    if cand not in scope:
        return cand
    i = 1
    while f"{cand}{i}" in scope:
        i += 1
    return f"{cand}{i}"


def _wrap(s: str, node_level: int, ctx_level: int) -> str:
    return f"({s})" if node_level < ctx_level else s


def _render(t: Term, ctx_level: int, scope, lat) -> str:
    match t:
        case Var(x):
            return base_name(x) if "#" in x else x
        case Const(x):
            return x
        case Universe(i):
            return f"Type {i}"
        case Pair(a, b):
            return (f"({_render(a, _BINDER, scope, lat)} , "
                    f"{_render(b, _BINDER, scope, lat)})")
        case Pi(x, dom, cod):
            if x not in free_variables(cod):
                d = _render(dom, _APP, scope, lat)
                c = _render(cod, _BINDER, scope, lat)
                return _wrap(f"{d} -> {c}", _BINDER, ctx_level)
            x2 = _pick(x, scope)
            d = _render(dom, _BINDER, scope, lat)
            c = _render(rename(cod, x, x2), _BINDER, scope | {x2}, lat)
            return _wrap(f"({x2} : {d}) -> {c}", _BINDER, ctx_level)
        case Sigma(x, first, second):
            x2 = _pick(x, scope)
            d = _render(first, _BINDER, scope, lat)
            s = _render(rename(second, x, x2), _BINDER, scope | {x2}, lat)
            return _wrap(f"({x2} : {d}) * {s}", _BINDER, ctx_level)
        case Lam(x, body, ann):
            x2 = _pick(x, scope)
            b = _render(rename(body, x, x2), _BINDER, scope | {x2}, lat)
            if ann is None:
                return _wrap(f"fun {x2} => {b}", _BINDER, ctx_level)
            a = _render(ann, _BINDER, scope, lat)
            return _wrap(f"fun ({x2} : {a}) => {b}", _BINDER, ctx_level)
        case App(f, a):
            return _wrap(f"{_render(f, _APP, scope, lat)} "
                         f"{_render(a, _POSTFIX, scope, lat)}",
                         _APP, ctx_level)
        case Fst(p):
            return _wrap(f"{_render(p, _POSTFIX, scope, lat)} .1",
                         _POSTFIX, ctx_level)
        case Snd(p):
            return _wrap(f"{_render(p, _POSTFIX, scope, lat)} .2",
                         _POSTFIX, ctx_level)
        case Id(ty, l, r):
            return _wrap(
                f"Id {_render(ty, _POSTFIX, scope, lat)} "
                f"{_render(l, _POSTFIX, scope, lat)} "
                f"{_render(r, _POSTFIX, scope, lat)}", _APP, ctx_level)
        case Refl(a):
            return _wrap(f"refl {_render(a, _POSTFIX, scope, lat)}",
                         _APP, ctx_level)
        case J(x, y, p, motive, case_, path):
            x2 = _pick(x, scope)
            y2 = _pick(y, scope | {x2})
            p2 = _pick(p, scope | {x2, y2})
            m = rename(rename(rename(motive, x, x2), y, y2), p, p2)
            ms = _render(m, _BINDER, scope | {x2, y2, p2}, lat)
            return _wrap(
                f"J ({x2} {y2} {p2} => {ms}) "
                f"{_render(case_, _POSTFIX, scope, lat)} "
                f"{_render(path, _POSTFIX, scope, lat)}", _APP, ctx_level)
        case Flat(f, a):
            return _wrap(f"flat{pretty_focus(f, lat)} "
                         f"{_render(a, _POSTFIX, scope, lat)}",
                         _APP, ctx_level)
        case Sharp(f, a):
            return _wrap(f"sharp{pretty_focus(f, lat)} "
                         f"{_render(a, _POSTFIX, scope, lat)}",
                         _APP, ctx_level)
        case FlatIntro(f, m):
            return _wrap(f"{_render(m, _POSTFIX, scope, lat)} "
                         f".flat{pretty_focus(f, lat)}", _POSTFIX, ctx_level)
        case SharpIntro(f, m):
            return _wrap(f"{_render(m, _POSTFIX, scope, lat)} "
                         f".sharp{pretty_focus(f, lat)}", _POSTFIX, ctx_level)
        case SharpElim(f, m):
            return _wrap(f"{_render(m, _POSTFIX, scope, lat)} "
                         f".unsharp{pretty_focus(f, lat)}", _POSTFIX, ctx_level)
        case FlatElim(f, c, mx, motive, scrut, u, branch):
            u2 = _pick(u, scope)
            parts = [f"let flat{pretty_focus(f, lat)} {u2} := "
                     f"{_render(scrut, _BINDER, scope, lat)}"]
            if c.members:
                parts.append(f"@{pretty_focus(c, lat)}")
            if motive is not None:
                mx2 = _pick(mx, scope | {u2})
                m = _render(rename(motive, mx, mx2), _BINDER,
                            scope | {u2, mx2}, lat)
                parts.append(f"as {mx2} => {m}")
            b = _render(rename(branch, u, u2), _BINDER, scope | {u2}, lat)
            parts.append(f"in {b}")
            return _wrap(" ".join(parts), _BINDER, ctx_level)
    raise TypeError(f"not a term: {t!r}")
