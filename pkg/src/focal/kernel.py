"""Bidirectional type checker for the modal core language.

Judgments are checked against a focus-annotated context.  The modal
rules steer the context through the two operations:

    flat formation / introduction    check the body under divide(f, ctx)
    flat elimination                 scrutinee under divide(c, ctx); the
                                     bound variable gets annotation
                                     meet(c, f), keeping the scrutinee's
                                     crispness c available in the branch
    sharp formation / introduction   check the body under promote(f, ctx)
    sharp elimination                scrutinee under divide(f, ctx)

Reduction has beta for application, projections, path induction, flat
and sharp; conversion is type-directed and additionally validates eta
for functions, pairs and sharp (a term of a sharp type equals the
re-introduction of its extraction).  There is no eta for flat.
Postulates are neutral; definitions unfold only when conversion cannot
proceed without them.

Intro forms check; elim forms infer.  Diagnostic codes:

    E001  unbound variable, or one deleted by a context division
    E002  type mismatch (including terms whose type cannot be inferred)
    E003  eliminating a non-function/pair/path/modal value
    E004  a non-type where a type is required
    E005  unknown or non-canonical focus
    E006  crisp-substitution violation
    E007  motive or annotation mismatch
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import pretty as _pp
from .context import EMPTY, Context, ContextEntry, divide, promote
from .context import extend as extend  # noqa: F401  (re-export: checked ctx-ext)
from .lattice import Focus, TOP
from .syntax import (
    App, Const, Definition, Flat, FlatElim, FlatIntro, Fst, Id, J, Lam,
    Pair, Pi, Postulate, Refl, Sharp, SharpElim, SharpIntro, Sigma,
    Signature, Snd, Term, Universe, Var, alpha_equal, free_variables,
    fresh_name, rename, substitute,
)


class Diagnostic(Exception):
    """A machine-readable checking error."""

    def __init__(self, code, message, span=None, context_snapshot=None, file=None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.span = span       # ((line, col), (line, col)) or None
        self.context_snapshot = context_snapshot
        self.file = file

    def to_json(self) -> dict:
        span = self.span or ((0, 0), (0, 0))
        out = {
            "file": self.file or "<input>",
            "code": self.code,
            "message": self.message,
            "start": {"line": span[0][0], "col": span[0][1]},
            "end": {"line": span[1][0], "col": span[1][1]},
        }
        if self.context_snapshot:
            out["context"] = self.context_snapshot
        return out


@dataclass(frozen=True)
class CheckState:
    """A signature plus the ambient context of the judgment being checked."""

    signature: Signature
    context: Context = EMPTY
    dropped: tuple = ()          # (name, focus) for entries deleted by division
    eta_pi: bool = True          # conversion uses eta for functions and pairs

    @property
    def lattice(self):
        return self.signature.lattice

    def divided(self, f: Focus) -> "CheckState":
        kept = divide(self.lattice, f, self.context)
        gone = tuple(
            (e.name, f) for e in self.context if e.name not in kept.names()
        )
        return replace(self, context=kept, dropped=self.dropped + gone)

    def promoted(self, f: Focus) -> "CheckState":
        return replace(self, context=promote(self.lattice, f, self.context))

    def bound(self, name: str, f: Focus, ty: Term) -> "CheckState":
        dropped = tuple(d for d in self.dropped if d[0] != name)
        return replace(self, context=self.context.appended(name, f, ty),
                       dropped=dropped)

    def snapshot(self) -> str:
        return _pp.pretty_context(self.context, self.lattice)


def _bind(state: CheckState, name: str, f: Focus, ty: Term, *bodies):
    """Enter a binder, freshening the name if the context already uses it."""
    if state.context.lookup(name) is None:
        return state.bound(name, f, ty), name, bodies
    name2 = fresh_name(name)
    return (state.bound(name2, f, ty), name2,
            tuple(rename(b, name, name2) for b in bodies))


def _require_focus(state: CheckState, f: Focus):
    try:
        ok = state.lattice.is_canonical(f)
    except ValueError as e:
        raise Diagnostic("E005", str(e)) from None
    if not ok:
        raise Diagnostic(
            "E005",
            f"focus {f} is not canonical in the declared lattice",
        )


# ---------------------------------------------------------------------------
# Reduction


def whnf(sig: Signature, t: Term, delta: bool = False) -> Term:
    """Weak-head normal form.

    With delta=False, definitions stay folded at the head; conversion
    unfolds them on demand.  With delta=True, defined constants unfold
    whenever they block the head.
    """
    while True:
        match t:
            case Const(name) if delta:
                e = sig.lookup(name)
                if isinstance(e, Definition):
                    t = e.body
                    continue
                return t
            case App(f, a):
                fw = whnf(sig, f, delta)
                if isinstance(fw, Lam):
                    t = substitute(fw.body, fw.binder, a)
                    continue
                return App(fw, a) if fw is not f else t
            case Fst(p):
                pw = whnf(sig, p, delta)
                if isinstance(pw, Pair):
                    t = pw.first
                    continue
                return Fst(pw) if pw is not p else t
            case Snd(p):
                pw = whnf(sig, p, delta)
                if isinstance(pw, Pair):
                    t = pw.second
                    continue
                return Snd(pw) if pw is not p else t
            case J(x, y, p, motive, case_, path):
                qw = whnf(sig, path, delta)
                if isinstance(qw, Refl):
                    t = App(case_, qw.arg)
                    continue
                return J(x, y, p, motive, case_, qw) if qw is not path else t
            case FlatElim(f, c, mx, mo, scrut, u, branch):
                sw = whnf(sig, scrut, delta)
                if isinstance(sw, FlatIntro) and sw.focus == f:
                    t = substitute(branch, u, sw.body)
                    continue
                return FlatElim(f, c, mx, mo, sw, u, branch) \
                    if sw is not scrut else t
            case SharpElim(f, n):
                nw = whnf(sig, n, delta)
                if isinstance(nw, SharpIntro) and nw.focus == f:
                    t = nw.body
                    continue
                return SharpElim(f, nw) if nw is not n else t
            case _:
                return t


def _unfold_head(sig: Signature, t: Term) -> Term | None:
    """Unfold the definition blocking the head of an elimination spine."""
    match t:
        case Const(name):
            e = sig.lookup(name)
            return e.body if isinstance(e, Definition) else None
        case App(f, a):
            f2 = _unfold_head(sig, f)
            return App(f2, a) if f2 is not None else None
        case Fst(p):
            p2 = _unfold_head(sig, p)
            return Fst(p2) if p2 is not None else None
        case Snd(p):
            p2 = _unfold_head(sig, p)
            return Snd(p2) if p2 is not None else None
        case J(x, y, p, m, c, q):
            q2 = _unfold_head(sig, q)
            return J(x, y, p, m, c, q2) if q2 is not None else None
        case FlatElim(f, c, mx, mo, scrut, u, br):
            s2 = _unfold_head(sig, scrut)
            return FlatElim(f, c, mx, mo, s2, u, br) if s2 is not None else None
        case SharpElim(f, n):
            n2 = _unfold_head(sig, n)
            return SharpElim(f, n2) if n2 is not None else None
        case _:
            return None


def normalize(sig: Signature, t: Term) -> Term:
    """Full normal form: iterated whnf under binders, unfolding definitions."""
    w = whnf(sig, t, delta=True)
    nf = lambda s: normalize(sig, s)  # noqa: E731
    match w:
        case Var(_) | Const(_) | Universe(_):
            return w
        case Pi(x, dom, cod):
            return Pi(x, nf(dom), nf(cod))
        case Sigma(x, a, b):
            return Sigma(x, nf(a), nf(b))
        case Lam(x, body, ann):
            return Lam(x, nf(body), nf(ann) if ann is not None else None)
        case App(f, a):
            return App(nf(f), nf(a))
        case Pair(a, b):
            return Pair(nf(a), nf(b))
        case Fst(p):
            return Fst(nf(p))
        case Snd(p):
            return Snd(nf(p))
        case Id(ty, l, r):
            return Id(nf(ty), nf(l), nf(r))
        case Refl(a):
            return Refl(nf(a))
        case J(x, y, p, m, c, q):
            return J(x, y, p, nf(m), nf(c), nf(q))
        case Flat(f, a):
            return Flat(f, nf(a))
        case Sharp(f, a):
            return Sharp(f, nf(a))
        case FlatIntro(f, m):
            return FlatIntro(f, nf(m))
        case SharpIntro(f, m):
            return SharpIntro(f, nf(m))
        case SharpElim(f, m):
            return SharpElim(f, nf(m))
        case FlatElim(f, c, mx, mo, scrut, u, br):
            return FlatElim(f, c, mx, nf(mo) if mo is not None else None,
                            nf(scrut), u, nf(br))
    raise TypeError(f"not a term: {w!r}")


# ---------------------------------------------------------------------------
# Conversion


def convertible(state: CheckState, a: Term, b: Term, ty: Term | None = None) -> bool:
    """Definitional equality of a and b, directed by their common type."""
    if alpha_equal(a, b):
        return True
    sig = state.signature
    if ty is not None:
        tw = whnf(sig, ty, delta=True)
        match tw:
            case Pi(x, _, cod) if state.eta_pi:
                v = fresh_name(x)
                return convertible(state, App(a, Var(v)), App(b, Var(v)),
                                   substitute(cod, x, Var(v)))
            case Sigma(x, first, second) if state.eta_pi:
                return convertible(state, Fst(a), Fst(b), first) and \
                    convertible(state, Snd(a), Snd(b),
                                substitute(second, x, Fst(a)))
            case Sharp(f, comp):
                return convertible(state, _force_sharp(sig, f, a),
                                   _force_sharp(sig, f, b), comp)
            case Flat(f, comp):
                wa = whnf(sig, a)
                wb = whnf(sig, b)
                if isinstance(wa, FlatIntro) and isinstance(wb, FlatIntro) \
                        and wa.focus == f and wb.focus == f:
                    return convertible(state, wa.body, wb.body, comp)
                return _conv_structural(state, wa, wb)
            case Id(comp, _, _):
                wa = whnf(sig, a)
                wb = whnf(sig, b)
                if isinstance(wa, Refl) and isinstance(wb, Refl):
                    return convertible(state, wa.arg, wb.arg, comp)
                return _conv_structural(state, wa, wb)
    return _conv_structural(state, a, b)


def _force_sharp(sig: Signature, f: Focus, t: Term) -> Term:
    # Realizes sharp beta and eta together: an introduction exposes its
    # body, anything else is wrapped in an extraction (which need not be
    # well-typed on its own, but only ever meets another forced component).
    w = whnf(sig, t)
    if isinstance(w, SharpIntro) and w.focus == f:
        return w.body
    return SharpElim(f, w)


def _conv_structural(state: CheckState, a: Term, b: Term) -> bool:
    sig = state.signature
    wa = whnf(sig, a)
    wb = whnf(sig, b)
    if _conv_whnf(state, wa, wb):
        return True
    ua = _unfold_head(sig, wa)
    ub = _unfold_head(sig, wb)
    if ua is None and ub is None:
        return False
    return _conv_structural(state, ua if ua is not None else wa,
                            ub if ub is not None else wb)


def _is_intro(t: Term) -> bool:
    return isinstance(t, (Lam, Pair, Refl, FlatIntro, SharpIntro))


def _conv_whnf(state: CheckState, wa: Term, wb: Term) -> bool:
    conv = lambda x, y: _conv_structural(state, x, y)  # noqa: E731

    def under(x1, b1, x2, b2):
        v = fresh_name(x1)
        return conv(rename(b1, x1, v), rename(b2, x2, v))

    match wa, wb:
        case Var(x), Var(y):
            return x == y
        case Const(x), Const(y):
            return x == y
        case Universe(i), Universe(j):
            return i == j
        case Pi(x1, d1, c1), Pi(x2, d2, c2):
            return conv(d1, d2) and under(x1, c1, x2, c2)
        case Sigma(x1, d1, c1), Sigma(x2, d2, c2):
            return conv(d1, d2) and under(x1, c1, x2, c2)
        case Id(t1, l1, r1), Id(t2, l2, r2):
            return conv(t1, t2) and conv(l1, l2) and conv(r1, r2)
        case Flat(f1, t1), Flat(f2, t2):
            return f1 == f2 and conv(t1, t2)
        case Sharp(f1, t1), Sharp(f2, t2):
            return f1 == f2 and conv(t1, t2)
        case Lam(x1, b1, _), Lam(x2, b2, _):
            return under(x1, b1, x2, b2)
        case Lam(x1, b1, _), _ if state.eta_pi and not _is_intro(wb):
            v = fresh_name(x1)
            return conv(rename(b1, x1, v), App(wb, Var(v)))
        case _, Lam(x2, b2, _) if state.eta_pi and not _is_intro(wa):
            v = fresh_name(x2)
            return conv(App(wa, Var(v)), rename(b2, x2, v))
        case Pair(a1, b1), Pair(a2, b2):
            return conv(a1, a2) and conv(b1, b2)
        case Pair(a1, b1), _ if state.eta_pi and not _is_intro(wb):
            return conv(a1, Fst(wb)) and conv(b1, Snd(wb))
        case _, Pair(a2, b2) if state.eta_pi and not _is_intro(wa):
            return conv(Fst(wa), a2) and conv(Snd(wa), b2)
        case Refl(a1), Refl(a2):
            return conv(a1, a2)
        case FlatIntro(f1, m1), FlatIntro(f2, m2):
            return f1 == f2 and conv(m1, m2)
        case SharpIntro(f1, m1), SharpIntro(f2, m2):
            return f1 == f2 and conv(m1, m2)
        case SharpIntro(f1, m1), _ if not _is_intro(wb):
            return conv(m1, SharpElim(f1, wb))
        case _, SharpIntro(f2, m2) if not _is_intro(wa):
            return conv(SharpElim(f2, wa), m2)
        case App(f1, a1), App(f2, a2):
            return conv(f1, f2) and conv(a1, a2)
        case Fst(p1), Fst(p2):
            return conv(p1, p2)
        case Snd(p1), Snd(p2):
            return conv(p1, p2)
        case J(x1, y1, p1, m1, c1, q1), J(x2, y2, p2, m2, c2, q2):
            vx, vy, vp = fresh_name(x1), fresh_name(y1), fresh_name(p1)
            m1r = rename(rename(rename(m1, x1, vx), y1, vy), p1, vp)
            m2r = rename(rename(rename(m2, x2, vx), y2, vy), p2, vp)
            return conv(m1r, m2r) and conv(c1, c2) and conv(q1, q2)
        case SharpElim(f1, n1), SharpElim(f2, n2):
            return f1 == f2 and conv(n1, n2)
        case (FlatElim(f1, c1, mx1, mo1, s1, u1, n1),
              FlatElim(f2, c2, mx2, mo2, s2, u2, n2)):
            if f1 != f2 or c1 != c2 or (mo1 is None) != (mo2 is None):
                return False
            if mo1 is not None and not under(mx1, mo1, mx2, mo2):
                return False
            return conv(s1, s2) and under(u1, n1, u2, n2)
        case _:
            return False


# ---------------------------------------------------------------------------
# Typing


def infer(state: CheckState, t: Term) -> Term:
    """Infer the type of t in the given state."""
    sig = state.signature
    lat = state.lattice
    match t:
        case Var(x):
            e = state.context.lookup(x)
            if e is not None:
                return e.type
            for (name, f) in state.dropped:
                if name == x:
                    raise Diagnostic(
                        "E001",
                        f"variable {x} is not {lat.show(f)}-crisp: it was "
                        f"deleted by the context division",
                        context_snapshot=state.snapshot(),
                    )
            raise Diagnostic("E001", f"unbound variable {x}",
                             context_snapshot=state.snapshot())
        case Const(name):
            e = sig.lookup(name)
            if e is None:
                raise Diagnostic("E001", f"unknown constant {name}")
            return e.type
        case Universe(i):
            return Universe(i + 1)
        case Pi(x, dom, cod):
            la = check_type(state, dom)
            st2, _, (cod2,) = _bind(state, x, TOP, dom, cod)
            lb = check_type(st2, cod2)
            return Universe(max(la, lb))
        case Sigma(x, first, second):
            la = check_type(state, first)
            st2, _, (second2,) = _bind(state, x, TOP, first, second)
            lb = check_type(st2, second2)
            return Universe(max(la, lb))
        case Id(ty, l, r):
            lvl = check_type(state, ty)
            check(state, l, ty)
            check(state, r, ty)
            return Universe(lvl)
        case Flat(f, a):
            _require_focus(state, f)
            lvl = check_type(state.divided(f), a)
            return Universe(lvl)
        case Sharp(f, a):
            _require_focus(state, f)
            lvl = check_type(state.promoted(f), a)
            return Universe(lvl)
        case Lam(x, body, ann):
            if ann is None:
                raise Diagnostic(
                    "E002", "cannot infer the type of an unannotated function",
                    context_snapshot=state.snapshot())
            check_type(state, ann)
            st2, x2, (body2,) = _bind(state, x, TOP, ann, body)
            return Pi(x2, ann, infer(st2, body2))
        case App(f, a):
            tf = whnf(sig, infer(state, f), delta=True)
            if not isinstance(tf, Pi):
                raise Diagnostic(
                    "E003",
                    f"cannot apply {_pp.pretty(f, lat)}: its type "
                    f"{_pp.pretty(tf, lat)} is not a function type",
                    context_snapshot=state.snapshot())
            check(state, a, tf.domain)
            return substitute(tf.codomain, tf.binder, a)
        case Pair(_, _):
            raise Diagnostic(
                "E002", "cannot infer the type of a bare pair",
                context_snapshot=state.snapshot())
        case Fst(p):
            tp = whnf(sig, infer(state, p), delta=True)
            if not isinstance(tp, Sigma):
                raise Diagnostic(
                    "E003", f"cannot project: {_pp.pretty(tp, lat)} is not "
                    f"a pair type", context_snapshot=state.snapshot())
            return tp.first
        case Snd(p):
            tp = whnf(sig, infer(state, p), delta=True)
            if not isinstance(tp, Sigma):
                raise Diagnostic(
                    "E003", f"cannot project: {_pp.pretty(tp, lat)} is not "
                    f"a pair type", context_snapshot=state.snapshot())
            return substitute(tp.second, tp.binder, Fst(p))
        case Refl(a):
            ta = infer(state, a)
            return Id(ta, a, a)
        case J(x, y, p, motive, case_, path):
            tq = whnf(sig, infer(state, path), delta=True)
            if not isinstance(tq, Id):
                raise Diagnostic(
                    "E003", f"cannot induct: {_pp.pretty(tq, lat)} is not "
                    f"a path type", context_snapshot=state.snapshot())
            st1, x2, (m1,) = _bind(state, x, TOP, tq.type, motive)
            st2, y2, (m2,) = _bind(st1, y, TOP, tq.type, m1)
            st3, p2, (m3,) = _bind(st2, p, TOP, Id(tq.type, Var(x2), Var(y2)), m2)
            check_type(st3, m3)
            z = fresh_name(x2)
            diag = substitute(substitute(substitute(
                m3, x2, Var(z)), y2, Var(z)), p2, Refl(Var(z)))
            check(state, case_, Pi(z, tq.type, diag))
            return substitute(substitute(substitute(
                m3, x2, tq.lhs), y2, tq.rhs), p2, path)
        case FlatIntro(f, m):
            _require_focus(state, f)
            return Flat(f, infer(state.divided(f), m))
        case SharpIntro(f, m):
            _require_focus(state, f)
            return Sharp(f, infer(state.promoted(f), m))
        case SharpElim(f, n):
            _require_focus(state, f)
            tn = whnf(sig, infer(state.divided(f), n), delta=True)
            if not isinstance(tn, Sharp):
                raise Diagnostic(
                    "E003", f"cannot extract: {_pp.pretty(tn, lat)} is not "
                    f"a sharp type", context_snapshot=state.snapshot())
            if tn.focus != f:
                raise Diagnostic(
                    "E007",
                    f"extraction annotated {lat.show(f)} but the value is "
                    f"sharp at {lat.show(tn.focus)}",
                    context_snapshot=state.snapshot())
            return tn.type
        case FlatElim(_, _, _, _, _, _, _):
            return _flat_elim(state, t, None)
    raise TypeError(f"not a term: {t!r}")


def _flat_elim(state: CheckState, t: FlatElim, goal: Term | None) -> Term:
    """Handle flat elimination in both modes.

    In check mode (goal given) a motive-free elimination pushes the goal
    into the branch; otherwise the branch type is inferred and must not
    mention the bound variable.
    """
    sig = state.signature
    lat = state.lattice
    f, c = t.focus, t.crisp
    _require_focus(state, f)
    _require_focus(state, c)
    div = state.divided(c)
    ts = whnf(sig, infer(div, t.scrutinee), delta=True)
    if not isinstance(ts, Flat):
        raise Diagnostic(
            "E003", f"cannot induct: {_pp.pretty(ts, lat)} is not a flat type",
            context_snapshot=state.snapshot())
    if ts.focus != f:
        raise Diagnostic(
            "E007",
            f"elimination annotated {lat.show(f)} but the scrutinee is "
            f"flat at {lat.show(ts.focus)}",
            context_snapshot=state.snapshot())
    comp = ts.type
    uf = lat.meet(c, f)
    if t.motive is not None:
        st_m, mx2, (motive2,) = _bind(state, t.motive_binder, c,
                                      Flat(f, comp), t.motive)
        check_type(st_m, motive2)
        st_b, u2, (branch2,) = _bind(state, t.binder, uf, comp, t.branch)
        check(st_b, branch2,
              substitute(motive2, mx2, FlatIntro(f, Var(u2))))
        result = substitute(motive2, mx2, t.scrutinee)
        if goal is not None and not convertible(state, result, goal):
            raise Diagnostic(
                "E002",
                f"this induction produces {_pp.pretty(result, lat)} but "
                f"{_pp.pretty(goal, lat)} is expected",
                context_snapshot=state.snapshot())
        return result
    st_b, u2, (branch2,) = _bind(state, t.binder, uf, comp, t.branch)
    if goal is not None:
        check(st_b, branch2, goal)
        return goal
    bt = infer(st_b, branch2)
    if u2 in free_variables(bt):
        raise Diagnostic(
            "E007",
            f"the branch type {_pp.pretty(bt, lat)} depends on the bound "
            f"variable; a motive is required",
            context_snapshot=state.snapshot())
    return bt


def check(state: CheckState, t: Term, goal: Term):
    """Check t against the (well-formed) type goal."""
    sig = state.signature
    lat = state.lattice
    wg = whnf(sig, goal, delta=True)
    match t, wg:
        case Lam(x, body, ann), Pi(y, dom, cod):
            if ann is not None:
                check_type(state, ann)
                if not convertible(state, ann, dom):
                    raise Diagnostic(
                        "E007",
                        f"domain annotation {_pp.pretty(ann, lat)} does not "
                        f"match {_pp.pretty(dom, lat)}",
                        context_snapshot=state.snapshot())
            st2, x2, (body2,) = _bind(state, x, TOP, dom, body)
            check(st2, body2, substitute(cod, y, Var(x2)))
            return
        case Lam(_, _, _), _:
            raise Diagnostic(
                "E002", f"a function cannot have type {_pp.pretty(wg, lat)}",
                context_snapshot=state.snapshot())
        case Pair(a, b), Sigma(y, first, second):
            check(state, a, first)
            check(state, b, substitute(second, y, a))
            return
        case Pair(_, _), _:
            raise Diagnostic(
                "E002", f"a pair cannot have type {_pp.pretty(wg, lat)}",
                context_snapshot=state.snapshot())
        case Refl(a), Id(ty, l, r):
            check(state, a, ty)
            if not (convertible(state, a, l, ty)
                    and convertible(state, a, r, ty)):
                raise Diagnostic(
                    "E002",
                    f"refl {_pp.pretty(a, lat)} does not prove "
                    f"{_pp.pretty(wg, lat)}: the endpoints are not "
                    f"definitionally equal",
                    context_snapshot=state.snapshot())
            return
        case Refl(_), _:
            raise Diagnostic(
                "E002", f"refl cannot have type {_pp.pretty(wg, lat)}",
                context_snapshot=state.snapshot())
        case FlatIntro(f, m), Flat(g, comp):
            _require_focus(state, f)
            if f != g:
                raise Diagnostic(
                    "E007",
                    f"introduction annotated {lat.show(f)} but the goal is "
                    f"flat at {lat.show(g)}",
                    context_snapshot=state.snapshot())
            check(state.divided(f), m, comp)
            return
        case FlatIntro(_, _), _:
            raise Diagnostic(
                "E002",
                f"a flat introduction cannot have type {_pp.pretty(wg, lat)}",
                context_snapshot=state.snapshot())
        case SharpIntro(f, m), Sharp(g, comp):
            _require_focus(state, f)
            if f != g:
                raise Diagnostic(
                    "E007",
                    f"introduction annotated {lat.show(f)} but the goal is "
                    f"sharp at {lat.show(g)}",
                    context_snapshot=state.snapshot())
            check(state.promoted(f), m, comp)
            return
        case SharpIntro(_, _), _:
            raise Diagnostic(
                "E002",
                f"a sharp introduction cannot have type {_pp.pretty(wg, lat)}",
                context_snapshot=state.snapshot())
        case FlatElim(_, _, _, motive, _, _, _), _ if motive is None:
            _flat_elim(state, t, wg)
            return
        case _, _:
            ty = infer(state, t)
            if not convertible(state, ty, goal):
                raise Diagnostic(
                    "E002",
                    f"{_pp.pretty(t, lat)} has type {_pp.pretty(ty, lat)} "
                    f"but {_pp.pretty(goal, lat)} is expected",
                    context_snapshot=state.snapshot())
            return


def check_type(state: CheckState, a: Term) -> int:
    """Check that a is a type; returns its universe level."""
    ty = infer(state, a)
    w = whnf(state.signature, ty, delta=True)
    if isinstance(w, Universe):
        return w.level
    raise Diagnostic(
        "E004",
        f"expected a type, but {_pp.pretty(a, state.lattice)} has type "
        f"{_pp.pretty(w, state.lattice)}",
        context_snapshot=state.snapshot())


def substitute_crisp(sig: Signature, ctx: Context, x: str, s: Term) -> Context:
    """The substitution rule at entry x: the replacement must be as crisp
    as the annotation of x demands, or the substitution is rejected.

    Returns the telescope with x removed and s substituted through the
    entries after it.  Raises E006 when s fails the crispness premise.
    """
    names = [e.name for e in ctx]
    if x not in names:
        raise Diagnostic("E001", f"unbound variable {x}")
    i = names.index(x)
    entry = ctx.entries[i]
    prefix = Context(ctx.entries[:i])
    state = CheckState(sig, prefix).divided(entry.annotation)
    try:
        check(state, s, entry.type)
    except Diagnostic as d:
        raise Diagnostic(
            "E006",
            f"cannot substitute for {x} :{sig.lattice.show(entry.annotation)} "
            f"{_pp.pretty(entry.type, sig.lattice)}: the replacement is not "
            f"{sig.lattice.show(entry.annotation)}-crisp ({d.message})",
            context_snapshot=d.context_snapshot,
        ) from None
    suffix = tuple(
        ContextEntry(e.name, e.annotation, substitute(e.type, x, s))
        for e in ctx.entries[i + 1:]
    )
    return Context(prefix.entries + suffix)


def check_signature(lattice, entries, eta_pi: bool = True):
    """Check declarations in order against the empty context.

    A failing entry is reported and skipped; later entries may still
    refer to the earlier successful ones.
    """
    sig = Signature(lattice)
    diags = []
    for e in entries:
        if sig.lookup(e.name) is not None:
            raise ValueError(f"duplicate signature entry {e.name!r}")
        state = CheckState(sig, eta_pi=eta_pi)
        try:
            check_type(state, e.type)
            if isinstance(e, Definition):
                check(state, e.body, e.type)
            sig = sig.with_entry(e)
        except Diagnostic as d:
            diags.append(d)
    return sig, diags
