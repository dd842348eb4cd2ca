"""Command-line surface: exit codes, determinism, corpus table, self tests."""

import json
import os

import numpy as np

from contact9.cli import EXIT_CODES, Command, main, run
from contact9.cohomology import Cohomology, CohomologyClass
from contact9.library import library
from contact9.model import CohomologyModel, ManifoldModel
from contact9.schema import emit_model


def run_cmd(*args):
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(args))
    return code, buf.getvalue()


def test_decide_contact_exit_zero():
    code, out = run_cmd("decide", "library:S9")
    assert code == EXIT_CODES["ok"]
    assert "contact" in out


def test_decide_no_contact_exit():
    code, out = run_cmd("decide", "library:S1xHP2")
    assert code == EXIT_CODES["no_contact"]
    assert "W8" in out


def test_decide_undetermined_exit(tmp_path):
    m = library("M1_surgered")
    stripped = ManifoldModel(m.cohomology, phi_hat=None, label="M1_stripped")
    path = tmp_path / "m.json"
    path.write_text(emit_model(stripped))
    code, out = run_cmd("decide", str(path))
    assert code == EXIT_CODES["undetermined"]
    assert "phi_hat" in out


def test_parse_error_exit(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{")
    code, out = run_cmd("decide", str(path))
    assert code == EXIT_CODES["parse_error"]
    code, _ = run_cmd("decide", str(tmp_path / "missing.json"))
    assert code == EXIT_CODES["parse_error"]
    code, _ = run_cmd("decide", "library:NotAModel")
    assert code == EXIT_CODES["parse_error"]


def test_validation_failure_exit(tmp_path):
    m = library("S1xCP4").cohomology
    cup2 = {k: np.array(v) for k, v in m.cup2.items()}
    cup2[(2, 7)] = np.zeros_like(cup2[(2, 7)])
    broken = CohomologyModel(
        dimension=9, pieces=m.pieces, rho2=[np.array(r) for r in m.rho2],
        beta=[np.array(b) for b in m.beta], sq={k: np.array(v) for k, v in m.sq.items()},
        cup2=cup2, cup_int={k: np.array(v) for k, v in m.cup_int.items()},
        orientable=True, label="broken",
    )
    path = tmp_path / "broken.json"
    path.write_text(emit_model(ManifoldModel(broken)))
    code, out = run_cmd("validate", str(path))
    assert code == EXIT_CODES["invalid"]
    assert "poincare_pairing" in out
    assert "degree 2" in out
    code, _ = run_cmd("decide", str(path))
    assert code == EXIT_CODES["invalid"]


def test_corpus_matches_paper_table():
    code, out = run_cmd("corpus")
    assert code == 0
    assert "S9: contact" in out
    assert "S1xHP2: no_contact at W8" in out
    assert "S1xCP4: contact" in out
    assert "Dold_5_2: no_contact at W3" in out
    assert "M1_surgered: no_contact at O9" in out
    assert "S1xHP2#S1xCP4: no_contact at O8" in out


def test_corpus_env_dir(tmp_path, monkeypatch):
    (tmp_path / "a.json").write_text(emit_model(library("S9")))
    monkeypatch.setenv("CONTACT9_CORPUS_DIR", str(tmp_path))
    code, out = run_cmd("corpus")
    assert code == 0
    assert "S9: contact" in out
    assert "Dold" not in out


def test_structured_output_deterministic():
    code1, out1 = run_cmd("decide", "library:S1xCP4", "--format", "structured", "--seed", "7")
    code2, out2 = run_cmd("decide", "library:S1xCP4", "--format", "structured", "--seed", "7")
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["timing_ms"] is None
    assert doc["results"][0]["outcome"] == "contact"
    assert doc["inputs"][0]["digest"].startswith("sha256:")


def test_sum_verb():
    code, out = run_cmd("sum", "library:S1xHP2", "library:S1xCP4")
    assert code == EXIT_CODES["no_contact"]
    assert "O8" in out


def test_classes_verb():
    code, out = run_cmd("classes", "library:S1xCP4")
    assert code == 0
    assert "v2" in out and "lifts" in out


def test_selftest_fresh_build_passes():
    code, out = run_cmd("selftest", "--samples", "6")
    assert code == 0
    assert "FAIL" not in out


def test_selftest_detects_broken_sq1(monkeypatch):
    """Replacing Sq^1 by zero must break the reduction/Bockstein comparison
    with a witness on the 6-vertex projective plane."""
    from contact9 import selftest as st

    original = Cohomology.sq

    def broken(self, k, cls):
        if k == 1:
            p = cls.degree
            dim = len(self.group(2, p + 1).torsion) if p + 1 <= self.complex.dimension else 0
            return CohomologyClass(2, p + 1, (0,) * dim)
        return original(self, k, cls)

    monkeypatch.setattr(Cohomology, "sq", broken)
    result = st.exactness_suite(samples=4)
    assert not result.passed
    assert "Sq1" in result.counterexample


def test_selftest_detects_broken_model():
    """A library model with a deleted pairing row fails the validate suite
    naming the degree."""
    from contact9 import selftest as st

    m = library("S1xCP4").cohomology
    cup2 = {k: np.array(v) for k, v in m.cup2.items()}
    cup2[(3, 6)] = np.zeros_like(cup2[(3, 6)])
    broken = ManifoldModel(
        CohomologyModel(
            dimension=9, pieces=m.pieces, rho2=[np.array(r) for r in m.rho2],
            beta=[np.array(b) for b in m.beta], sq={k: np.array(v) for k, v in m.sq.items()},
            cup2=cup2, cup_int={k: np.array(v) for k, v in m.cup_int.items()},
            orientable=True, label="S1xCP4 (broken)",
        )
    )
    from contact9.model import validate

    rep = validate(broken)
    assert not rep.ok
    assert any(v.check == "poincare_pairing" and v.degree == 3 for v in rep.violations)


def test_run_api_report_shape():
    code, report = run(Command(verb="decide", inputs=["library:S9"], samples=2))
    assert code == 0
    assert report["kind"] == "report"
    assert report["results"][0]["trail"]["o3"] == []
    assert report["tool"]["name"] == "contact9"


def test_corpus_strict_flags_undetermined(tmp_path, monkeypatch):
    m = library("M1_surgered")
    stripped = ManifoldModel(m.cohomology, phi_hat=None, label="M1_stripped")
    (tmp_path / "m.json").write_text(emit_model(stripped))
    monkeypatch.setenv("CONTACT9_CORPUS_DIR", str(tmp_path))
    code, out = run_cmd("corpus")
    assert code == 0  # reported, not fatal
    assert "undetermined" in out
    code, out = run_cmd("corpus", "--strict")
    assert code == EXIT_CODES["undetermined"]


def test_decide_accepts_complex_document(tmp_path):
    from contact9.complexes import cp2_9
    from contact9.schema import emit_complex

    path = tmp_path / "cp2.json"
    path.write_text(emit_complex(cp2_9()))
    # not 9-dimensional: decide refuses with a schema error
    code, out = run_cmd("decide", str(path))
    assert code == EXIT_CODES["parse_error"]
    code, out = run_cmd("classes", str(path))
    assert code == 0
    assert "w2" in out


def test_structured_trail_carries_witness_coordinates():
    """The structured report exposes the full obstruction trail: the degree-8
    representative plus the subspace it is reduced against, in generator
    coordinates."""
    code, out = run_cmd("decide", "library:M3_sum", "--format", "structured")
    assert code == EXIT_CODES["no_contact"]
    doc = json.loads(out)
    r = doc["results"][0]
    assert r["obstruction"] == "O8"
    trail = r["trail"]
    assert trail["o3"] == [0]
    assert trail["o7"] == [0]
    assert trail["o8"]["representative"] == [1, 0]
    assert trail["o8"]["subspace_dimension"] == 1
    assert trail["o8"]["subspace_basis"] == [[0, 1]]
    assert trail["o9"] is None
