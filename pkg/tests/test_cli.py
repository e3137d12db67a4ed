import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from lplogic.cli import main

EXAMPLES = Path(__file__).resolve().parents[1] / "src" / "lplogic" / "paper-examples"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_entail_human_and_structured():
    code, out, _ = run("entail", "--sentences", EXAMPLES / "two-atom.lp", "--query", "[Q(x)]{x}")
    assert code == 0 and out == "[Q(x)]{x}\t[2/5, 4/5]\n"
    code, out, _ = run("entail", "--sentences", EXAMPLES / "two-atom.lp", "--query", "[Q(x)]{x}",
                       "--format", "structured")
    doc = json.loads(out)
    assert doc["version"] == 1 and doc["results"][0]["interval"]["lo"] == "2/5"


def test_entail_infeasible_exits_one(tmp_path):
    f = tmp_path / "bad.lp"
    f.write_text("[P(x)]{x} = 3/5;\n[!P(x)]{x} = 3/5;\n")
    code, out, _ = run("entail", "--sentences", f, "--query", "[P(x)]{x}")
    assert code == 1 and "INFEASIBLE" in out


def test_structured_output_is_byte_identical():
    argv = ("bayes", "verify", EXAMPLES / "diamond.net", "--format", "structured")
    first, second = run(*argv), run(*argv)
    assert first == second and first[0] == 0
    assert json.loads(first[1])["version"] == 1


def test_bayes_commands():
    code, out, _ = run("bayes", "query", EXAMPLES / "diamond.net", "--query", "X1 | X2 & !X4")
    assert code == 0 and out.strip().endswith("195/238")
    code, out, _ = run("bayes", "compile", EXAMPLES / "diamond.net")
    assert code == 0 and "[X1(x)]{x} = 1/2" in out
    code, _, _ = run("bayes", "verify", EXAMPLES / "diamond.net")
    assert code == 0


def test_bayes_zero_evidence_exits_one(tmp_path):
    net = tmp_path / "d.net"
    net.write_text("[var]\nA B\n[parents]\nB = A\n[cpt]\nA = 1\nB | A = 1\nB | !A = 0\n")
    assert run("bayes", "query", net, "--query", "B | !A")[0] == 1


def test_believe_commands():
    code, out, _ = run("believe", "--sentences", EXAMPLES / "tweety.kb", "--query", "Fly(Tweety)")
    assert code == 0 and "(9/10, 1]" in out
    code, out, _ = run("believe", "--sentences", EXAMPLES / "penguin.kb", "--query", "Fly(Tweety)",
                       "--format", "structured")
    doc = json.loads(out)
    assert code == 0 and doc["vacuous"] and doc["reference_class_not_matched"]


def test_eval_commands():
    code, out, _ = run("eval", "--model", EXAMPLES / "tweety.model", "--sentences", EXAMPLES / "tweety-eval.lp")
    assert code == 0 and "6/7" in out
    code, _, err = run("eval", "--model", EXAMPLES / "tweety.model", "--sentences", EXAMPLES / "penguin-eval.lp")
    assert code == 1 and "DivisionByZero" in err


def test_parse_round_trips_the_shipped_document(tmp_path):
    code, out, _ = run("parse", EXAMPLES / "representation.lp")
    assert code == 0
    again = tmp_path / "again.lp"
    again.write_text(out)
    assert run("parse", again)[1] == out


@pytest.mark.parametrize("argv", [
    ("parse", "/nonexistent.lp"),
    ("eval", "--model", "/nonexistent.model", "--sentences", "/nonexistent.lp"),
    ("bayes", "query", "/nonexistent.net", "--query", "X1"),
    ("frobnicate",),
    ("entail", "--sentences", str(EXAMPLES / "two-atom.lp"), "--query", "[weight(x) > 1]{x}"),
])
def test_usage_errors_exit_two(argv):
    assert run(*argv)[0] == 2


def test_empty_and_malformed_files_exit_two(tmp_path):
    empty = tmp_path / "empty.lp"
    empty.write_text("")
    assert run("parse", empty)[0] == 2
    bad = tmp_path / "bad.lp"
    bad.write_text("[P(x)]{x} >= ;\n")
    code, _, err = run("parse", bad)
    assert code == 2 and err.startswith("error:")
    model = tmp_path / "bad.model"
    model.write_text("[domain]\na b\n[measure]\na = 1/2\nb = 1/3\n")
    assert run("eval", "--model", model, "--sentences", EXAMPLES / "tweety-eval.lp")[0] == 2


def test_check_axioms_is_deterministic_and_detects_bug():
    a = run("check-axioms", "--seed", 4, "--count", 3, "--pairs", 2, "--sizes", "1-3")
    b = run("check-axioms", "--seed", 4, "--count", 3, "--pairs", 2, "--sizes", "1-3")
    assert a == b and a[0] == 0
    assert run("check-axioms", "--seed", 4, "--count", 3, "--pairs", 2, "--inject-bug")[0] == 1


def test_reproduce():
    code, out, _ = run("reproduce")
    assert code == 0 and out.strip().endswith("all examples reproduce")


def test_report_dir_writes_table_and_figure(tmp_path):
    code, _, err = run("bayes", "verify", EXAMPLES / "diamond.net", "--report-dir", tmp_path)
    assert code == 0
    written = sorted(p.suffix for p in tmp_path.iterdir())
    assert ".png" in written and ".tsv" in written
    assert "wrote" in err
    tsv = next(tmp_path.glob("*.tsv")).read_text()
    assert tsv.count("\n") >= 17


def test_report_dir_for_entail_and_axioms(tmp_path):
    assert run("entail", "--sentences", EXAMPLES / "two-atom.lp", "--query", "[Q(x)]{x}",
               "--report-dir", tmp_path / "e")[0] == 0
    assert run("check-axioms", "--count", 2, "--pairs", 1, "--report-dir", tmp_path / "a")[0] == 0
    for d in ("e", "a"):
        assert {p.suffix for p in (tmp_path / d).iterdir()} == {".png", ".tsv"}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lplogic", "bayes", "query", str(EXAMPLES / "diamond.net"),
                           "--query", "X1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip().endswith("1/2")
