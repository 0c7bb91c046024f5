"""Focus-annotated telescopes and the two context operations.

Every context entry carries a focus annotation; an entry ``x :_g A`` is
f-crisp when ``g <= f``.  Promotion meets every annotation with a focus
and division deletes the entries that are not crisp for it.  Both
return fresh telescopes; contexts are immutable snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import Focus, FocusLattice, TOP
from .syntax import Term, free_variables


@dataclass(frozen=True)
class ContextEntry:
    name: str
    annotation: Focus
    type: Term


@dataclass(frozen=True)
class Context:
    entries: tuple[ContextEntry, ...] = ()

    def lookup(self, name: str) -> ContextEntry | None:
        for e in self.entries:
            if e.name == name:
                return e
        return None

    def names(self) -> frozenset[str]:
        return frozenset(e.name for e in self.entries)

    def appended(self, name: str, annotation: Focus, type: Term) -> "Context":
        # Raw extension; use kernel.extend for the checked ctx-ext rule.
        return Context(self.entries + (ContextEntry(name, annotation, type),))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


EMPTY = Context()


def promote(lattice: FocusLattice, f: Focus, ctx: Context) -> Context:
    """Meet every annotation with f; types and order are untouched."""
    if f == TOP:
        return ctx
    return Context(tuple(
        ContextEntry(e.name, lattice.meet(f, e.annotation), e.type)
        for e in ctx.entries
    ))


def divide(lattice: FocusLattice, f: Focus, ctx: Context) -> Context:
    """Keep exactly the entries whose annotation is <= f, in order."""
    if f == TOP:
        return ctx
    return Context(tuple(
        e for e in ctx.entries if lattice.leq(e.annotation, f)
    ))


def is_crisp(lattice: FocusLattice, ctx: Context, name: str, f: Focus) -> bool:
    """True iff the entry survives division by f."""
    e = ctx.lookup(name)
    if e is None:
        raise KeyError(f"unbound variable {name!r}")
    return lattice.leq(e.annotation, f)


def crispness_of(lattice: FocusLattice, ctx: Context, t: Term) -> Focus:
    """Meet of the annotations of the free variables of t.

    This is the least focus c such that t is c-crisp; the top focus for
    closed terms.
    """
    acc = lattice.top()
    for name in free_variables(t):
        e = ctx.lookup(name)
        if e is None:
            raise KeyError(f"unbound variable {name!r}")
        acc = lattice.meet(acc, e.annotation)
    return acc


def extend(signature, ctx: Context, name: str, f: Focus, ty: Term) -> Context:
    """Checked context extension: requires ty to be an f-crisp type.

    The type must check in divide(f, ctx); when it is well-formed in ctx
    but not in the division, the error says so.
    """
    from . import kernel  # cycle: the ctx-ext side condition needs the checker

    if ctx.lookup(name) is not None:
        raise ValueError(f"context already binds {name!r}")
    lattice = signature.lattice
    state = kernel.CheckState(signature, ctx)
    try:
        kernel.check_type(state.divided(f), ty)
    except kernel.Diagnostic as d:
        if d.code == "E001":
            try:
                kernel.check_type(state, ty)
            except kernel.Diagnostic:
                raise d from None
            raise kernel.Diagnostic(
                "E001",
                f"type of {name} is not {lattice.show(f)}-crisp: {d.message}",
                context_snapshot=d.context_snapshot,
            ) from None
        raise
    return ctx.appended(name, f, ty)
