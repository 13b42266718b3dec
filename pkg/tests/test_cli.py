import contextlib
import io
import json
import os
import subprocess
import sys

import jsonschema
import pytest

from cli_suite import SUITE
from modulo.cli import main
from modulo.kernel import check
from modulo.proofio import load_proof
from modulo.reduction import normalize
from modulo.structures import data_path
from modulo.theories import builtin
from modulo.tva import bool2, validate_tva


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def schema(name):
    return json.loads(data_path(f"schemas/{name}.json").read_text())


@pytest.mark.parametrize("name, argv, code", SUITE, ids=lambda x: " ".join(x) if isinstance(x, list) else None)
def test_suite_exit_codes_and_schemas(name, argv, code):
    got, out, err = run(["--json", "--seed", "3"] + argv)
    assert got == code, err
    doc = json.loads(out)
    jsonschema.validate(doc, schema(name))
    # keys are sorted at every level
    assert out == json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@pytest.mark.parametrize("name, argv, code", SUITE[:8], ids=lambda x: " ".join(x) if isinstance(x, list) else None)
def test_human_output_has_same_exit_code(name, argv, code):
    got, out, _ = run(argv)
    assert got == code and out.strip()


def test_flags_after_the_verb():
    a = run(["--json", "check", "pimpq", "paper_q_proof.sexp"])
    b = run(["check", "pimpq", "paper_q_proof.sexp", "--json"])
    assert a == b


def test_library_and_cli_agree():
    th = builtin("pimpq")
    p = load_proof(data_path("paper_q_proof.sexp"), th)
    _, out, _ = run(["--json", "check", "pimpq", "paper_q_proof.sexp"])
    assert json.loads(out)["nodes"] == check(th, p).nodes
    _, out, _ = run(["--json", "normalize", "pimpq", "paper_q_proof.sexp", "--fuel", "100"])
    rep = json.loads(out)
    tr = normalize(th, p, fuel=100)
    assert (rep["status"], rep["steps"], rep["repeat_index"]) == (tr.status.value, tr.steps, tr.repeat_index)
    _, out, _ = run(["--json", "tva", "validate", "bool2"])
    assert json.loads(out)["truth_values_algebra"] == validate_tva(bool2()).is_tva


def test_trace_file(tmp_path):
    target = tmp_path / "trace.json"
    code, _, _ = run(["normalize", "pimpq", "paper_q_proof.sexp", "--fuel", "100", "--trace", str(target)])
    assert code == 1
    doc = json.loads(target.read_text())
    jsonschema.validate(doc, schema("trace"))
    assert doc["status"] == "CycleDetected" and len(doc["proofs"]) == 2


def test_classify_detects_theory():
    _, out, _ = run(["--json", "classify", "proof_refl.sexp"])
    assert json.loads(out)["theory"] == "stt"


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["check", "pimpq", "no_such_file.sexp"],
    ["check", "nosuchtheory", "paper_q_proof.sexp"],
    ["rewrite", "nf", "pimpq", "(=> P"],
    ["rewrite", "nf", "pimpq", "P", "Q"],
    ["model", "eval", "stt_bool2.json", "(dimp dtop dbot)"],
    ["normalize", "pimpq", "paper_q_proof.sexp", "--fuel", "0"],
    ["tva", "validate", "chain3_lattice.json"],
])
def test_usage_errors_exit_2(argv):
    code, out, err = run(argv)
    assert code == 2
    assert err.startswith("modulo: error") or "usage" in err


def _subprocess(argv, env_extra):
    env = {**os.environ, **env_extra}
    return subprocess.run([sys.executable, "-m", "modulo.cli"] + argv, capture_output=True, text=True, env=env)


def test_fuel_from_environment():
    r = _subprocess(["--json", "normalize", "pimpq", "paper_q_proof.sexp"], {"MODULO_FUEL": "7"})
    assert r.returncode == 1 and json.loads(r.stdout)["fuel"] == 7
    r = _subprocess(["normalize", "pimpq", "paper_q_proof.sexp"], {"MODULO_FUEL": "lots"})
    assert r.returncode == 2 and "MODULO_FUEL" in r.stderr
    # the flag wins over the environment
    r = _subprocess(["--json", "--fuel", "9", "normalize", "pimpq", "paper_q_proof.sexp"], {"MODULO_FUEL": "7"})
    assert json.loads(r.stdout)["fuel"] == 9


def test_golden_cong_report():
    _, out, _ = run(["--json", "rewrite", "cong", "pimpq", "P", "(=> P Q)"])
    assert json.loads(out) == {"left": "P", "right": "(=> P Q)", "theory": "pimpq", "verdict": "yes"}


def test_sample_is_seeded():
    a = run(["--json", "--seed", "5", "sample", "subset", "--count", "5"])
    b = run(["--json", "--seed", "5", "sample", "subset", "--count", "5"])
    c = run(["--json", "--seed", "6", "sample", "subset", "--count", "5"])
    assert a == b and a != c
