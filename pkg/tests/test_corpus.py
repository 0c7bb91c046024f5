"""Corpus manifest loading and verification."""

import pytest

from focal.corpus import (
    CorpusManifest, ManifestEntry, corpus_dir, load_manifest, verify_corpus,
    verify_file,
)


def test_manifest_loads_with_version():
    m = load_manifest()
    assert m.version == "1"
    assert len(m.entries) >= 21


def test_manifest_missing_file_rejected(tmp_path):
    (tmp_path / "manifest.txt").write_text("ACCEPT ghost.fcl\n")
    with pytest.raises(ValueError, match="missing"):
        load_manifest(tmp_path / "manifest.txt")


def test_manifest_malformed_line_rejected(tmp_path):
    (tmp_path / "manifest.txt").write_text("NONSENSE x y z\n")
    with pytest.raises(ValueError, match="malformed"):
        load_manifest(tmp_path / "manifest.txt")


def test_all_files_as_expected():
    report = verify_corpus(load_manifest())
    assert report.ok, report.render()


def test_accept_files_check_cleanly():
    report = verify_corpus(load_manifest())
    for r in report.accepted:
        assert r.codes == (), (r.path, r.codes)


def test_reject_files_fail_with_exactly_the_named_code():
    report = verify_corpus(load_manifest())
    for r in report.rejected:
        assert r.codes, r.path
        assert all(c == r.expectation for c in r.codes), (r.path, r.codes)


def test_mismatch_detected(tmp_path):
    (tmp_path / "f.fcl").write_text("postulate A : Type 0;")
    m = CorpusManifest(tmp_path, (ManifestEntry("f.fcl", "E001"),))
    report = verify_corpus(m)
    assert not report.ok
    assert "MISMATCH" in report.render()


def test_verify_file_counts_declarations():
    m = load_manifest()
    entry = next(e for e in m.entries if e.path == "spatial.fcl")
    result = verify_file(m.root, entry)
    assert result.declarations >= 10


def test_required_files_present():
    m = load_manifest()
    accepted = {e.path for e in m.entries if e.expectation == "ACCEPT"}
    required = {
        "spatial.fcl", "commute_sharp.fcl", "commute_flat.fcl",
        "interchange.fcl", "ordered.fcl", "simplicial_axioms.fcl",
        "real_axioms.fcl", "equivariant_axioms.fcl", "solid_axioms.fcl",
    }
    assert required <= accepted
    codes = {}
    for e in m.entries:
        if e.expectation != "ACCEPT":
            codes.setdefault(e.expectation, []).append(e.path)
    # the negative corpus covers these code families, with four E001 flavors
    assert set(codes) >= {"E001", "E002", "E005", "E007"}
    assert len(codes["E001"]) >= 4


def test_reject_spans_lie_inside_their_sources():
    from focal.surface import check_source
    m = load_manifest()
    for entry in m.entries:
        if entry.expectation == "ACCEPT":
            continue
        text = (m.root / entry.path).read_text()
        lines = text.splitlines()
        _, _, diags = check_source(text)
        assert diags
        for d in diags:
            assert d.span is not None, entry.path
            (l1, c1), (l2, c2) = d.span
            assert 1 <= l1 <= len(lines)
            assert 1 <= l2 <= len(lines)
            assert 1 <= c1 <= len(lines[l1 - 1]) + 1
            assert 1 <= c2 <= len(lines[l2 - 1]) + 2
