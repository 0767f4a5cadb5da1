import json
import subprocess
import sys

import pytest

from dedmod import corpus
from dedmod.frontend.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_omega(capsys):
    code, out, _ = run(capsys, "check", "--theory", "crabbe", "--proof", "omega")
    assert code == 0


def test_check_by_path(capsys):
    code, _, _ = run(capsys, "check", "--theory", str(corpus.path("theories", "qr.dmt")),
                     "--proof", str(corpus.path("proofs", "qr.prf")))
    assert code == 0


def test_normalize_omega_reports_a_cycle(capsys):
    code, out, _ = run(capsys, "normalize", "--theory", "crabbe", "--proof", "omega", "--fuel", "10")
    assert code == 1 and "Cycle at step 1" in out


def test_normalize_qr_succeeds(capsys):
    code, _, _ = run(capsys, "normalize", "--theory", "qr", "--proof", "qr")
    assert code == 0


def test_super_consistency(capsys):
    code, out, _ = run(capsys, "super-consistency", "--theory", "qr", "--battery", "default")
    assert code == 0 and "4/4 algebras with models" in out
    code, out, _ = run(capsys, "super-consistency", "--theory", "crabbe", "--battery", "default",
                       "--proof", "omega", "--json")
    rep = json.loads(out)
    assert code == 1 and rep["not_sn_evidence"]


def test_search(capsys):
    code, out, _ = run(capsys, "search", "--theory", "qr", "--goal", "q : Q, p : P |- R", "--system", "all")
    assert code == 0 and "p q" in out
    code, _, _ = run(capsys, "search", "--theory", "crabbe", "--goal", "|- R")
    assert code == 1


def test_tva_laws(capsys):
    code, _, _ = run(capsys, "tva-laws", "--algebra", "bundled")
    assert code == 0
    code, _, _ = run(capsys, "tva-laws", "--algebra", "doubled_top", "--heyting")
    assert code == 1
    code, _, err = run(capsys, "tva-laws", "--algebra", str(corpus.path("lattices", "m3.lat")))
    assert code == 2 and err


def test_model_find(capsys):
    assert run(capsys, "model-find", "--theory", "qr")[0] == 0
    assert run(capsys, "model-find", "--theory", "nat", "--successor")[0] == 0


def test_context_model_and_agree(capsys):
    code, out, _ = run(capsys, "context-model", "--theory", "qr", "--goal", "|- Q => R", "--json")
    assert code == 0 and json.loads(out)["failures"] == []
    code, out, _ = run(capsys, "agree", "--theory", "qr", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["disagreements"] == []


def test_usage_errors(capsys):
    assert run(capsys, "check", "--theory", "nope", "--proof", "omega")[0] == 2
    assert run(capsys, "search", "--theory", "qr", "--goal", "|- (")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_json_keys_are_sorted(capsys):
    _, out, _ = run(capsys, "check", "--theory", "qr", "--proof", "qr", "--json")
    assert out == json.dumps(json.loads(out), sort_keys=True, indent=2) + "\n"


def test_json_is_byte_identical_across_processes():
    cmd = [sys.executable, "-m", "dedmod.frontend.cli", "super-consistency", "--theory", "crabbe",
           "--proof", "omega", "--json"]
    first = subprocess.run(cmd, capture_output=True)
    second = subprocess.run(cmd, capture_output=True)
    assert first.stdout and first.stdout == second.stdout
    assert first.returncode == second.returncode == 1
