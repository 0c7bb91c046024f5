"""Command line entry point.

    focal check FILE...         check files as one concatenated signature
    focal eval FILE NAME        print the normal form of a definition
    focal lattice FILE          dump the declared focus lattice
    focal corpus [--manifest M] verify the bundled corpus
    focal proptest ...          run the admissibility properties

Exit codes: 0 clean, 1 diagnostics or failures, 2 usage or I/O errors.
Results go to stdout, diagnostics to stderr; FOCAL_COLOR=0 disables
styling.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import corpus as corpuslib
from . import kernel, proplab, surface
from .lattice import declare_lattice
from .pretty import pretty
from .syntax import Definition


def _styled(s: str, code: str) -> str:
    if os.environ.get("FOCAL_COLOR", "1") == "0" or not sys.stderr.isatty():
        return s
    return f"\x1b[{code}m{s}\x1b[0m"


def _read_files(paths):
    chunks = []
    for p in paths:
        try:
            with open(p, encoding="utf-8") as fh:
                chunks.append((p, fh.read()))
        except OSError as e:
            print(f"focal: cannot read {p}: {e.strerror}", file=sys.stderr)
            raise SystemExit(2)
    return chunks


def _emit_diagnostics(diags, as_json: bool):
    if as_json:
        print(json.dumps([d.to_json() for d in diags], indent=2),
              file=sys.stderr)
        return
    for d in diags:
        loc = ""
        if d.span is not None:
            loc = f":{d.span[0][0]}:{d.span[0][1]}"
        where = f"{d.file or '<input>'}{loc}"
        print(f"{where}: {_styled(d.code, '1;31')}: {d.message}",
              file=sys.stderr)
        if d.context_snapshot:
            print(f"  in context: {d.context_snapshot}", file=sys.stderr)


def _check_paths(paths, include, eta_pi, max_errors=None):
    parsed = []
    decls = []
    diags = []
    for path, text in _read_files(list(include) + list(paths)):
        ds, errs = surface.parse_file(text)
        for d in errs:
            d.file = path
        parsed.append((path, ds))
        decls.extend(ds)
        diags.extend(errs)
    try:
        lattice = surface.build_lattice(decls)
    except kernel.Diagnostic as d:
        diags.append(d)
        return None, decls, diags
    sig = kernel.Signature(lattice)
    for path, ds in parsed:
        sig, more = surface.elaborate(ds, eta_pi=eta_pi, lattice=lattice,
                                      signature=sig)
        for d in more:
            if d.file is None:
                d.file = path
        diags.extend(more)
    if max_errors is not None:
        diags = diags[:max_errors]
    return sig, decls, diags


def cmd_check(args) -> int:
    sig, decls, diags = _check_paths(args.paths, args.include,
                                     not args.no_eta_pi, args.max_errors)
    _emit_diagnostics(diags, args.json)
    n = sum(1 for d in decls if not isinstance(d, surface.FocusDecl))
    if diags:
        print(f"{n} declarations, {len(diags)} errors")
        return 1
    print(f"{n} declarations, all checked")
    return 0


def cmd_eval(args) -> int:
    sig, decls, diags = _check_paths([args.path], args.include,
                                     not args.no_eta_pi)
    if diags:
        _emit_diagnostics(diags, args.json)
        return 1
    entry = sig.lookup(args.name)
    if entry is None:
        print(f"focal: no declaration named {args.name}", file=sys.stderr)
        return 1
    term = entry.body if isinstance(entry, Definition) else None
    if term is None:
        print(f"focal: {args.name} is a postulate; nothing to evaluate",
              file=sys.stderr)
        return 1
    print(pretty(kernel.normalize(sig, term), sig.lattice))
    return 0


def cmd_lattice(args) -> int:
    _, decls, diags = _check_paths([args.path], [], True)
    if diags:
        _emit_diagnostics(diags, args.json)
        return 1
    lattice = surface.build_lattice(decls)
    elems = lattice.elements()
    print(f"generators: {' '.join(lattice.generators) or '(none)'}")
    print(f"elements ({len(elems)}):")
    for e in elems:
        print(f"  {lattice.show(e)}")
    print("meet table:")
    for a in elems:
        for b in elems:
            print(f"  {lattice.show(a)} . {lattice.show(b)} = "
                  f"{lattice.show(lattice.meet(a, b))}")
    print("order:")
    for a in elems:
        for b in elems:
            if a != b and lattice.leq(a, b):
                print(f"  {lattice.show(a)} <= {lattice.show(b)}")
    return 0


def cmd_corpus(args) -> int:
    try:
        manifest = corpuslib.load_manifest(args.manifest)
    except (OSError, ValueError) as e:
        print(f"focal: {e}", file=sys.stderr)
        return 2
    report = corpuslib.verify_corpus(manifest)
    print(report.render())
    return 0 if report.ok else 1


def parse_lattice_spec(spec: str):
    """'s d' declares free generators; 'a<=b' tokens add relations."""
    names = []
    relations = []
    for tok in spec.split():
        if "<=" in tok:
            lo, hi = tok.split("<=", 1)
            for n in (lo, hi):
                if n not in names:
                    names.append(n)
            relations.append((lo, hi))
        elif tok not in names:
            names.append(tok)
    return declare_lattice(names, relations)


def cmd_proptest(args) -> int:
    try:
        lattice = parse_lattice_spec(args.lattice)
    except ValueError as e:
        print(f"focal: {e}", file=sys.stderr)
        return 2
    cfg = proplab.GenConfig(seed=args.seed, lattice=lattice)
    report = proplab.run_admissibility(cfg, args.cases)
    print(f"seed {args.seed}, lattice '{args.lattice}'")
    print(report.render())
    return 0 if report.ok else 1


def main(argv=None) -> int:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="emit diagnostics as JSON")
    common.add_argument("--no-eta-pi", action="store_true",
                        help="disable eta for functions and pairs in "
                             "conversion")
    common.add_argument("--max-errors", type=int, default=None, metavar="N")

    ap = argparse.ArgumentParser(
        prog="focal",
        description="proof checker for type theory with commuting focuses")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common],
                       help="type-check .fcl files")
    p.add_argument("paths", nargs="+")
    p.add_argument("--include", action="append", default=[], metavar="FILE",
                   help="prepend FILE to the input")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("eval", parents=[common],
                       help="print the normal form of a definition")
    p.add_argument("path")
    p.add_argument("name")
    p.add_argument("--include", action="append", default=[], metavar="FILE")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("lattice", parents=[common],
                       help="dump the declared focus lattice")
    p.add_argument("path")
    p.set_defaults(fn=cmd_lattice)

    p = sub.add_parser("corpus", parents=[common],
                       help="verify the bundled corpus")
    p.add_argument("--manifest", default=None)
    p.set_defaults(fn=cmd_corpus)

    p = sub.add_parser("proptest", parents=[common],
                       help="run the admissibility properties")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=500)
    p.add_argument("--lattice", default="s")
    p.set_defaults(fn=cmd_proptest)

    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
