"""Command line behavior: exit codes, output schema, mode agreement."""

import json

import pytest

from focal.cli import main, parse_lattice_spec
from focal.corpus import corpus_dir

GOOD = """focus s;
postulate A : Type 0;
def idA : A -> A := fun x => x;
def ev : flat{s} A -> A := fun x => let flat{s} u := x in u;
"""

BAD = """focus s;
postulate A : Type 0;
def bad : A -> flat{s} A := fun x => x .flat{s};
def bad2 : A -> A := fun x => x .flat{s};
"""


@pytest.fixture
def good_file(tmp_path):
    p = tmp_path / "good.fcl"
    p.write_text(GOOD)
    return p


@pytest.fixture
def bad_file(tmp_path):
    p = tmp_path / "bad.fcl"
    p.write_text(BAD)
    return p


class TestCheck:
    def test_clean_exit_zero(self, good_file, capsys):
        assert main(["check", str(good_file)]) == 0
        out = capsys.readouterr()
        assert "all checked" in out.out

    def test_diagnostics_exit_one(self, bad_file, capsys):
        assert main(["check", str(bad_file)]) == 1
        err = capsys.readouterr().err
        assert "E001" in err

    def test_missing_file_exit_two(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["check", "does_not_exist.fcl"])
        assert e.value.code == 2

    def test_json_and_human_agree(self, bad_file, capsys):
        assert main(["check", str(bad_file)]) == 1
        human = capsys.readouterr().err
        human_codes = [line.split(": ")[1] for line in human.splitlines()
                       if ": E0" in line]
        assert main(["check", str(bad_file), "--json"]) == 1
        data = json.loads(capsys.readouterr().err)
        assert [d["code"] for d in data] == human_codes == ["E001", "E002"]
        for d in data:
            assert set(d) >= {"file", "code", "message", "start", "end"}
            assert set(d["start"]) == {"line", "col"}

    def test_max_errors(self, bad_file, capsys):
        assert main(["check", str(bad_file), "--json", "--max-errors", "1"]) \
            == 1
        data = json.loads(capsys.readouterr().err)
        assert len(data) == 1

    def test_corpus_file_checks(self, capsys):
        path = corpus_dir() / "commute_sharp.fcl"
        assert main(["check", str(path)]) == 0

    def test_corpus_negative_exits_one(self, capsys):
        path = corpus_dir() / "neg_sharp_elim.fcl"
        assert main(["check", str(path)]) == 1
        assert "E001" in capsys.readouterr().err

    def test_include_prelude(self, tmp_path, capsys):
        pre = tmp_path / "pre.fcl"
        pre.write_text("focus s;\npostulate A : Type 0;\n")
        use = tmp_path / "use.fcl"
        use.write_text("def u : A -> A := fun x => x;\n")
        assert main(["check", "--include", str(pre), str(use)]) == 0

    def test_no_eta_pi_flag(self, tmp_path, capsys):
        src = ("focus s;\npostulate A : Type 0;\npostulate B : Type 0;\n"
               "postulate f : A -> B;\n"
               "def etaf : Id (A -> B) (fun x => f x) f"
               " := refl f;\n")
        p = tmp_path / "eta.fcl"
        p.write_text(src)
        assert main(["check", str(p)]) == 0
        assert main(["check", str(p), "--no-eta-pi"]) == 1


class TestEval:
    def test_flat_beta(self, tmp_path, capsys):
        p = tmp_path / "e.fcl"
        p.write_text(
            "focus s;\npostulate A : Type 0;\npostulate k : A;\n"
            "def counit : flat{s} A -> A"
            " := fun x => let flat{s} u := x in u;\n"
            "def probe : A := counit (k .flat{s});\n")
        assert main(["eval", str(p), "probe"]) == 0
        assert capsys.readouterr().out.strip() == "k"

    def test_sharp_beta(self, tmp_path, capsys):
        p = tmp_path / "e.fcl"
        p.write_text(
            "focus s;\npostulate A : Type 0;\npostulate a : A;\n"
            "def probe : A := a .sharp{s} .unsharp{s};\n")
        assert main(["eval", str(p), "probe"]) == 0
        assert capsys.readouterr().out.strip() == "a"

    def test_lambda_normal_form(self, tmp_path, capsys):
        p = tmp_path / "e.fcl"
        p.write_text("focus s;\npostulate A : Type 0;\n"
                     "def f : A -> A := fun x => x;\n")
        assert main(["eval", str(p), "f"]) == 0
        assert capsys.readouterr().out.strip() == "fun x => x"

    def test_unknown_name(self, tmp_path, capsys):
        p = tmp_path / "e.fcl"
        p.write_text("focus s;\npostulate A : Type 0;\n")
        assert main(["eval", str(p), "nope"]) == 1


class TestLattice:
    def test_free_two_generator_dump(self, tmp_path, capsys):
        p = tmp_path / "l.fcl"
        p.write_text("focus s d;\n")
        assert main(["lattice", str(p)]) == 0
        out = capsys.readouterr().out
        assert "elements (4):" in out
        assert out.count(" . ") == 16

    def test_nested_has_three_elements(self, tmp_path, capsys):
        p = tmp_path / "l.fcl"
        p.write_text("focus diff <= super;\n")
        assert main(["lattice", str(p)]) == 0
        assert "elements (3):" in capsys.readouterr().out

    def test_empty_focus_has_top_only(self, tmp_path, capsys):
        p = tmp_path / "l.fcl"
        p.write_text("postulate A : Type 0;\n")
        assert main(["lattice", str(p)]) == 0
        assert "elements (1):" in capsys.readouterr().out


class TestCorpusCommand:
    def test_bundled_corpus_passes(self, capsys):
        assert main(["corpus"]) == 0
        assert "as expected" in capsys.readouterr().out

    def test_mismatching_manifest_fails(self, tmp_path, capsys):
        f = tmp_path / "x.fcl"
        f.write_text("postulate A : Type 0;")
        (tmp_path / "manifest.txt").write_text("REJECT E001 x.fcl\n")
        assert main(["corpus", "--manifest",
                     str(tmp_path / "manifest.txt")]) == 1


class TestProptest:
    def test_small_clean_run(self, capsys):
        assert main(["proptest", "--seed", "5", "--cases", "20",
                     "--lattice", "s d"]) == 0
        out = capsys.readouterr().out
        assert "seed 5" in out and "0 failures" in out

    def test_lattice_spec_with_relation(self):
        lat = parse_lattice_spec("diff<=super")
        assert len(lat.elements()) == 3
        lat2 = parse_lattice_spec("s d")
        assert len(lat2.elements()) == 4
