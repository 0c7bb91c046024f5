"""Surface syntax for .fcl files: lexer, parser, elaborator.

Declarations:

    focus g1 g2 ... ;            declare free focus generators
    focus g <= h;                declare an order relation
    postulate x : T;             a neutral constant
    def x : T := t;              a checked definition
    -- line comment

Terms:

    Type n                       universe at level n
    (x : A) -> B    A -> B       dependent / plain function type
    fun x => t                   functions (params may be annotated)
    (x : A) * B     (a , b)      pair type and pairs
    t .1    t .2                 projections
    Id A a b    refl a           paths
    J (x y p => C) c q           path induction
    flat{f ...} A                flat type at the meet of the generators
    m .flat{f ...}               flat introduction
    let flat{f ...} u := M [@{c ...}] [as x => C] in N
                                 flat elimination; @ keeps the scrutinee's
                                 crispness, `as` gives a dependent motive
    sharp{f ...} A               sharp type
    m .sharp{f ...}              sharp introduction
    m .unsharp{f ...}            sharp elimination

A focus set {g h} means the meet of the listed generators; {} is the
top focus.  Parse errors use the E100 code family and recover at the
next declaration boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernel
from .kernel import Diagnostic
from .lattice import declare_lattice
from .pretty import pretty, pretty_focus  # noqa: F401  (module surface)
from .syntax import (
    App, Const, Definition, Flat, FlatElim, FlatIntro, Fst, Id, J, Lam,
    Pair, Pi, Postulate, Refl, Sharp, SharpElim, SharpIntro, Sigma, Snd,
    Term, Universe, Var,
)

KEYWORDS = {
    "focus", "postulate", "def", "Type", "fun", "let", "in", "as",
    "Id", "refl", "J", "flat", "sharp", "unsharp",
}

PUNCT = (":=", "=>", "->", "<=", "(", ")", "{", "}", ";", ":", ",", "*",
         ".", "@")


@dataclass(frozen=True)
class Token:
    kind: str        # name | nat | kw | punct | eof
    value: str
    line: int
    col: int

    @property
    def pos(self):
        return (self.line, self.col)

    def end(self):
        return (self.line, self.col + len(self.value))


def tokenize(text: str):
    toks = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            toks.append(Token("kw" if word in KEYWORDS else "name",
                              word, line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("nat", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for p in PUNCT:
            if text.startswith(p, i):
                toks.append(Token("punct", p, line, col))
                col += len(p)
                i += len(p)
                break
        else:
            raise Diagnostic("E100", f"unexpected character {ch!r}",
                             span=((line, col), (line, col + 1)))
    toks.append(Token("eof", "", line, col))
    return toks


# --------------------------------------------------------------------------
# Raw (unresolved) syntax


@dataclass(frozen=True)
class RFocus:
    names: tuple[str, ...]
    span: tuple


@dataclass(frozen=True)
class RTerm:
    span: tuple


@dataclass(frozen=True)
class RVar(RTerm):
    name: str


@dataclass(frozen=True)
class RUniverse(RTerm):
    level: int


@dataclass(frozen=True)
class RPi(RTerm):
    binder: str
    domain: RTerm
    codomain: RTerm


@dataclass(frozen=True)
class RSigma(RTerm):
    binder: str
    first: RTerm
    second: RTerm


@dataclass(frozen=True)
class RLam(RTerm):
    binder: str
    annotation: RTerm | None
    body: RTerm


@dataclass(frozen=True)
class RApp(RTerm):
    fn: RTerm
    arg: RTerm


@dataclass(frozen=True)
class RPair(RTerm):
    first: RTerm
    second: RTerm


@dataclass(frozen=True)
class RFst(RTerm):
    pair: RTerm


@dataclass(frozen=True)
class RSnd(RTerm):
    pair: RTerm


@dataclass(frozen=True)
class RId(RTerm):
    type: RTerm
    lhs: RTerm
    rhs: RTerm


@dataclass(frozen=True)
class RRefl(RTerm):
    arg: RTerm


@dataclass(frozen=True)
class RJ(RTerm):
    var_lhs: str
    var_rhs: str
    var_path: str
    motive: RTerm
    refl_case: RTerm
    path: RTerm


@dataclass(frozen=True)
class RFlat(RTerm):
    focus: RFocus
    type: RTerm


@dataclass(frozen=True)
class RFlatIntro(RTerm):
    focus: RFocus
    body: RTerm


@dataclass(frozen=True)
class RFlatElim(RTerm):
    focus: RFocus
    crisp: RFocus | None
    motive_binder: str | None
    motive: RTerm | None
    scrutinee: RTerm
    binder: str
    branch: RTerm


@dataclass(frozen=True)
class RSharp(RTerm):
    focus: RFocus
    type: RTerm


@dataclass(frozen=True)
class RSharpIntro(RTerm):
    focus: RFocus
    body: RTerm


@dataclass(frozen=True)
class RSharpElim(RTerm):
    focus: RFocus
    body: RTerm


@dataclass(frozen=True)
class FocusDecl:
    names: tuple[str, ...]
    relations: tuple[tuple[str, str], ...]
    span: tuple


@dataclass(frozen=True)
class RawPostulate:
    name: str
    type: RTerm
    span: tuple


@dataclass(frozen=True)
class RawDefinition:
    name: str
    type: RTerm
    body: RTerm
    span: tuple


# --------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self, ahead=0) -> Token:
        j = min(self.i + ahead, len(self.toks) - 1)
        return self.toks[j]

    def next(self) -> Token:
        t = self.peek()
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, kind, value=None) -> bool:
        t = self.peek()
        return t.kind == kind and (value is None or t.value == value)

    def expect(self, kind, value=None) -> Token:
        t = self.peek()
        if not self.at(kind, value):
            want = value if value is not None else kind
            raise Diagnostic("E100", f"expected {want!r} but found "
                             f"{t.value or t.kind!r}",
                             span=(t.pos, t.end()))
        return self.next()

    # declarations ---------------------------------------------------------

    def parse_decl(self):
        t = self.peek()
        if self.at("kw", "focus"):
            return self.parse_focus_decl()
        if self.at("kw", "postulate"):
            self.next()
            name = self.expect("name").value
            self.expect("punct", ":")
            ty = self.parse_term()
            end = self.expect("punct", ";")
            return RawPostulate(name, ty, (t.pos, end.end()))
        if self.at("kw", "def"):
            self.next()
            name = self.expect("name").value
            self.expect("punct", ":")
            ty = self.parse_term()
            self.expect("punct", ":=")
            body = self.parse_term()
            end = self.expect("punct", ";")
            return RawDefinition(name, ty, body, (t.pos, end.end()))
        raise Diagnostic(
            "E100", f"expected a declaration but found {t.value or t.kind!r}",
            span=(t.pos, t.end()))

    def parse_focus_decl(self):
        start = self.expect("kw", "focus")
        names = [self.expect("name").value]
        if self.at("punct", "<="):
            self.next()
            hi = self.expect("name").value
            end = self.expect("punct", ";")
            return FocusDecl((names[0], hi), ((names[0], hi),),
                             (start.pos, end.end()))
        while self.at("name"):
            names.append(self.next().value)
        end = self.expect("punct", ";")
        return FocusDecl(tuple(names), (), (start.pos, end.end()))

    # terms ------------------------------------------------------------------

    def parse_term(self) -> RTerm:
        t = self.peek()
        if self.at("kw", "fun"):
            return self.parse_fun()
        if self.at("kw", "let"):
            return self.parse_let_flat()
        return self.parse_arrow()

    def parse_fun(self) -> RTerm:
        start = self.expect("kw", "fun")
        params = []
        while True:
            if self.at("name"):
                tok = self.next()
                params.append((tok.value, None))
            elif self.at("punct", "(") and self.peek(1).kind == "name" \
                    and self.peek(2).kind == "punct" and self.peek(2).value == ":":
                self.next()
                name = self.expect("name").value
                self.expect("punct", ":")
                ann = self.parse_term()
                self.expect("punct", ")")
                params.append((name, ann))
            else:
                break
        if not params:
            t = self.peek()
            raise Diagnostic("E100", "expected a parameter after 'fun'",
                             span=(t.pos, t.end()))
        self.expect("punct", "=>")
        body = self.parse_term()
        span = (start.pos, body.span[1])
        for (name, ann) in reversed(params):
            body = RLam(span, name, ann, body)
        return body

    def parse_let_flat(self) -> RTerm:
        start = self.expect("kw", "let")
        self.expect("kw", "flat")
        focus = self.parse_focus_set()
        binder = self.expect("name").value
        self.expect("punct", ":=")
        scrut = self.parse_term()
        crisp = None
        if self.at("punct", "@"):
            self.next()
            crisp = self.parse_focus_set()
        motive_binder = None
        motive = None
        if self.at("kw", "as"):
            self.next()
            motive_binder = self.expect("name").value
            self.expect("punct", "=>")
            motive = self.parse_term()
        self.expect("kw", "in")
        branch = self.parse_term()
        return RFlatElim((start.pos, branch.span[1]), focus, crisp,
                         motive_binder, motive, scrut, binder, branch)

    def parse_focus_set(self) -> RFocus:
        lb = self.expect("punct", "{")
        names = []
        while self.at("name"):
            names.append(self.next().value)
        rb = self.expect("punct", "}")
        return RFocus(tuple(names), (lb.pos, rb.end()))

    def parse_arrow(self) -> RTerm:
        # Dependent binder: '(' NAME ':' ... ')' followed by -> or *
        if self.at("punct", "(") and self.peek(1).kind == "name" \
                and self.peek(2).kind == "punct" and self.peek(2).value == ":":
            start = self.next()
            name = self.expect("name").value
            self.expect("punct", ":")
            dom = self.parse_term()
            self.expect("punct", ")")
            if self.at("punct", "->"):
                self.next()
                cod = self.parse_term()
                return RPi((start.pos, cod.span[1]), name, dom, cod)
            if self.at("punct", "*"):
                self.next()
                snd = self.parse_term()
                return RSigma((start.pos, snd.span[1]), name, dom, snd)
            t = self.peek()
            raise Diagnostic(
                "E100", "expected '->' or '*' after a dependent binder",
                span=(t.pos, t.end()))
        lhs = self.parse_app()
        if self.at("punct", "->"):
            self.next()
            cod = self.parse_term()
            return RPi((lhs.span[0], cod.span[1]), "_", lhs, cod)
        if self.at("punct", "*"):
            self.next()
            snd = self.parse_term()
            return RSigma((lhs.span[0], snd.span[1]), "_", lhs, snd)
        return lhs

    def parse_app(self) -> RTerm:
        t = self.peek()
        if self.at("kw", "flat"):
            self.next()
            focus = self.parse_focus_set()
            arg = self.parse_postfix()
            return RFlat((t.pos, arg.span[1]), focus, arg)
        if self.at("kw", "sharp"):
            self.next()
            focus = self.parse_focus_set()
            arg = self.parse_postfix()
            return RSharp((t.pos, arg.span[1]), focus, arg)
        if self.at("kw", "Id"):
            self.next()
            ty = self.parse_postfix()
            lhs = self.parse_postfix()
            rhs = self.parse_postfix()
            return RId((t.pos, rhs.span[1]), ty, lhs, rhs)
        if self.at("kw", "refl"):
            self.next()
            arg = self.parse_postfix()
            return RRefl((t.pos, arg.span[1]), arg)
        if self.at("kw", "J"):
            self.next()
            self.expect("punct", "(")
            x = self.expect("name").value
            y = self.expect("name").value
            p = self.expect("name").value
            self.expect("punct", "=>")
            motive = self.parse_term()
            self.expect("punct", ")")
            case_ = self.parse_postfix()
            path = self.parse_postfix()
            return RJ((t.pos, path.span[1]), x, y, p, motive, case_, path)
        fn = self.parse_postfix()
        while self._starts_atom():
            arg = self.parse_postfix()
            fn = RApp((fn.span[0], arg.span[1]), fn, arg)
        return fn

    def _starts_atom(self) -> bool:
        t = self.peek()
        if t.kind == "name":
            return True
        if t.kind == "kw" and t.value == "Type":
            return True
        if t.kind == "punct" and t.value == "(":
            return True
        return False

    def parse_postfix(self) -> RTerm:
        t = self.parse_atom()
        while self.at("punct", "."):
            dot = self.next()
            if self.at("nat"):
                n = self.next()
                if n.value == "1":
                    t = RFst((t.span[0], n.end()), t)
                elif n.value == "2":
                    t = RSnd((t.span[0], n.end()), t)
                else:
                    raise Diagnostic("E100",
                                     f"expected '.1' or '.2', found .{n.value}",
                                     span=(dot.pos, n.end()))
            elif self.at("kw", "flat"):
                self.next()
                focus = self.parse_focus_set()
                t = RFlatIntro((t.span[0], focus.span[1]), focus, t)
            elif self.at("kw", "sharp"):
                self.next()
                focus = self.parse_focus_set()
                t = RSharpIntro((t.span[0], focus.span[1]), focus, t)
            elif self.at("kw", "unsharp"):
                self.next()
                focus = self.parse_focus_set()
                t = RSharpElim((t.span[0], focus.span[1]), focus, t)
            else:
                nxt = self.peek()
                raise Diagnostic(
                    "E100",
                    "expected '1', '2', 'flat', 'sharp' or 'unsharp' "
                    "after '.'", span=(dot.pos, nxt.end()))
        return t

    def parse_atom(self) -> RTerm:
        t = self.peek()
        if self.at("name"):
            self.next()
            return RVar((t.pos, t.end()), t.value)
        if self.at("kw", "Type"):
            self.next()
            n = self.expect("nat")
            return RUniverse((t.pos, n.end()), int(n.value))
        if self.at("punct", "("):
            self.next()
            inner = self.parse_term()
            if self.at("punct", ","):
                self.next()
                second = self.parse_term()
                end = self.expect("punct", ")")
                return RPair((t.pos, end.end()), inner, second)
            end = self.expect("punct", ")")
            return inner
        raise Diagnostic("E100", f"expected a term but found "
                         f"{t.value or t.kind!r}", span=(t.pos, t.end()))


def parse_file(text: str):
    """Parse declarations; recovers at ';' after an error."""
    try:
        toks = tokenize(text)
    except Diagnostic as d:
        return [], [d]
    p = _Parser(toks)
    decls = []
    diags = []
    while not p.at("eof"):
        try:
            decls.append(p.parse_decl())
        except Diagnostic as d:
            diags.append(d)
            while not (p.at("eof") or p.at("punct", ";")):
                p.next()
            if p.at("punct", ";"):
                p.next()
    return decls, diags


def parse_term(text: str) -> RTerm:
    """Parse a single term (used by tests and the round-trip property)."""
    p = _Parser(tokenize(text))
    t = p.parse_term()
    p.expect("eof")
    return t


# --------------------------------------------------------------------------
# Elaboration


def build_lattice(decls):
    """Collect every focus declaration and build the lattice once."""
    names = []
    relations = []
    for d in decls:
        if isinstance(d, FocusDecl):
            for n in d.names:
                if n not in names:
                    names.append(n)
            relations.extend(d.relations)
    # Re-declaring a generator in a later line (or a concatenated file)
    # is harmless; a duplicate within one declaration is a mistake.
    for d in decls:
        if isinstance(d, FocusDecl) and not d.relations:
            if len(set(d.names)) != len(d.names):
                dup = next(n for n in d.names if d.names.count(n) > 1)
                raise Diagnostic("E005",
                                 f"duplicate focus generator {dup!r}",
                                 span=d.span)
    return declare_lattice(names, relations)


def elaborate_term(lattice, raw: RTerm, bound=frozenset()) -> Term:
    """Resolve names and focuses; bound names become variables, the rest
    constants."""
    def focus(rf: RFocus):
        try:
            return lattice.canonicalize(rf.names)
        except ValueError as e:
            raise Diagnostic("E005", str(e), span=rf.span) from None

    def go(r: RTerm, bound: frozenset) -> Term:
        match r:
            case RVar(_, name):
                return Var(name) if name in bound else Const(name)
            case RUniverse(_, level):
                return Universe(level)
            case RPi(_, x, dom, cod):
                return Pi(x, go(dom, bound), go(cod, bound | {x}))
            case RSigma(_, x, first, second):
                return Sigma(x, go(first, bound), go(second, bound | {x}))
            case RLam(_, x, ann, body):
                return Lam(x, go(body, bound | {x}),
                           go(ann, bound) if ann is not None else None)
            case RApp(_, f, a):
                return App(go(f, bound), go(a, bound))
            case RPair(_, a, b):
                return Pair(go(a, bound), go(b, bound))
            case RFst(_, p):
                return Fst(go(p, bound))
            case RSnd(_, p):
                return Snd(go(p, bound))
            case RId(_, ty, l, rr):
                return Id(go(ty, bound), go(l, bound), go(rr, bound))
            case RRefl(_, a):
                return Refl(go(a, bound))
            case RJ(_, x, y, pp, motive, case_, path):
                return J(x, y, pp, go(motive, bound | {x, y, pp}),
                         go(case_, bound), go(path, bound))
            case RFlat(_, rf, a):
                return Flat(focus(rf), go(a, bound))
            case RSharp(_, rf, a):
                return Sharp(focus(rf), go(a, bound))
            case RFlatIntro(_, rf, a):
                return FlatIntro(focus(rf), go(a, bound))
            case RSharpIntro(_, rf, a):
                return SharpIntro(focus(rf), go(a, bound))
            case RSharpElim(_, rf, a):
                return SharpElim(focus(rf), go(a, bound))
            case RFlatElim(_, rf, rc, mx, motive, scrut, u, branch):
                c = focus(rc) if rc is not None else lattice.top()
                mo = go(motive, bound | {mx}) if motive is not None else None
                return FlatElim(focus(rf), c, mx, mo, go(scrut, bound), u,
                                go(branch, bound | {u}))
        raise TypeError(f"not a raw term: {r!r}")

    return go(raw, bound)


def elaborate(decls, eta_pi: bool = True, lattice=None, signature=None):
    """Resolve and check a declaration list; returns (Signature, diags).

    A lattice and a base signature may be supplied to continue a
    concatenated multi-file check; by default both come from decls.
    """
    diags = []
    if lattice is None:
        try:
            lattice = build_lattice(decls)
        except Diagnostic as d:
            return kernel.Signature(declare_lattice([])), [d]
    sig = signature if signature is not None else kernel.Signature(lattice)
    for d in decls:
        if isinstance(d, FocusDecl):
            continue
        if sig.lookup(d.name) is not None:
            diags.append(Diagnostic(
                "E102", f"duplicate declaration of {d.name}", span=d.span))
            continue
        try:
            ty = elaborate_term(lattice, d.type)
            body = None
            if isinstance(d, RawDefinition):
                body = elaborate_term(lattice, d.body)
            state = kernel.CheckState(sig, eta_pi=eta_pi)
            kernel.check_type(state, ty)
            if body is not None:
                kernel.check(state, body, ty)
                sig = sig.with_entry(Definition(d.name, ty, body))
            else:
                sig = sig.with_entry(Postulate(d.name, ty))
        except Diagnostic as diag:
            if diag.span is None:
                diag.span = d.span
            diags.append(diag)
    return sig, diags


def check_source(text: str, eta_pi: bool = True):
    """Parse and elaborate; convenience used by the CLI and the corpus."""
    decls, diags = parse_file(text)
    sig, more = elaborate(decls, eta_pi=eta_pi)
    return sig, decls, diags + more
