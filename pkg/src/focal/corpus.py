"""Corpus verification: each file in the manifest must either check
cleanly or fail with exactly its named diagnostic code."""

from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .surface import FocusDecl, check_source


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    expectation: str      # "ACCEPT" or a diagnostic code


@dataclass(frozen=True)
class CorpusManifest:
    root: Path
    entries: tuple[ManifestEntry, ...]
    version: str = ""


@dataclass(frozen=True)
class FileResult:
    path: str
    expectation: str
    codes: tuple[str, ...]
    declarations: int
    ok: bool
    messages: tuple[str, ...] = ()


@dataclass(frozen=True)
class CorpusReport:
    results: tuple[FileResult, ...]
    elapsed: float

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def accepted(self):
        return [r for r in self.results if r.expectation == "ACCEPT"]

    @property
    def rejected(self):
        return [r for r in self.results if r.expectation != "ACCEPT"]

    def render(self) -> str:
        lines = []
        for r in self.results:
            status = "ok" if r.ok else "MISMATCH"
            want = r.expectation
            got = ",".join(r.codes) if r.codes else "clean"
            lines.append(f"{status:8s} {r.path:32s} expected {want}, got {got}")
            if not r.ok:
                lines.extend(f"         {m}" for m in r.messages)
        n_ok = sum(r.ok for r in self.results)
        lines.append(f"{n_ok}/{len(self.results)} corpus files as expected "
                     f"({self.elapsed:.2f}s)")
        return "\n".join(lines)


def corpus_dir() -> Path:
    return Path(resources.files("focal") / "paperlib")


def load_manifest(path: Path | None = None) -> CorpusManifest:
    if path is None:
        path = corpus_dir() / "manifest.txt"
    path = Path(path)
    entries = []
    version = ""
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "version":
            version = parts[1] if len(parts) > 1 else ""
        elif parts[0] == "ACCEPT" and len(parts) == 2:
            entries.append(ManifestEntry(parts[1], "ACCEPT"))
        elif parts[0] == "REJECT" and len(parts) == 3:
            entries.append(ManifestEntry(parts[2], parts[1]))
        else:
            raise ValueError(f"malformed manifest line: {raw!r}")
    for e in entries:
        if not (path.parent / e.path).exists():
            raise ValueError(f"manifest lists a missing file: {e.path}")
    return CorpusManifest(path.parent, tuple(entries), version)


def verify_file(root: Path, entry: ManifestEntry) -> FileResult:
    text = (root / entry.path).read_text()
    sig, decls, diags = check_source(text)
    codes = tuple(d.code for d in diags)
    n_decls = sum(1 for d in decls if not isinstance(d, FocusDecl))
    if entry.expectation == "ACCEPT":
        ok = not codes
    else:
        ok = bool(codes) and all(c == entry.expectation for c in codes)
    return FileResult(entry.path, entry.expectation, codes, n_decls, ok,
                      tuple(d.message for d in diags))


def verify_corpus(manifest: CorpusManifest) -> CorpusReport:
    start = time.perf_counter()
    results = tuple(verify_file(manifest.root, e) for e in manifest.entries)
    return CorpusReport(results, time.perf_counter() - start)
