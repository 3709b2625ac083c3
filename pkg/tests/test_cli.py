import json
import subprocess
import sys

import pytest

from htd.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_counterexample_exits_one_with_witness(capsys):
    code, out, _ = run(capsys, "dominance", "sd", "paper(EX_SD_COUNTER)", "--theta", "2/5,3/5", "--eta", "1/4,3/4", "--x", "1.5")
    doc = json.loads(out)
    assert code == 1
    assert doc["schema"] == 1
    assert doc["relation"] == "VIOLATED"
    assert doc["witness"]["x"] == 1.5


def test_dominance_ok_exits_zero(capsys):
    code, out, _ = run(capsys, "dominance", "sd", "pareto(0.5)", "--theta", "0.4,0.6", "--eta", "0.25,0.75", "--x", "2,10,100")
    assert code == 0
    assert json.loads(out)["relation"] == "DOMINATES_ON_GRID"


def test_dominance_csv(capsys):
    code, out, _ = run(capsys, "dominance", "sd", "pareto(0.5)", "--theta", "0.4,0.6", "--eta", "0.25,0.75", "--x", "2,10", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "x,S_lhs,S_rhs,margin,method,se"
    assert len(lines) == 3


def test_classify_reports_all_classes(capsys):
    code, out, _ = run(capsys, "classify", "frechet(0.8)")
    doc = json.loads(out)
    assert code == 0
    assert {doc["classes"][k]["verdict"] for k in ("H", "V", "Hstar", "G")} == {"NO_VIOLATION_ON_GRID"}


def test_classify_failure_exit(capsys):
    # positive essential infimum keeps pareto laws out of G
    code, out, _ = run(capsys, "classify", "pareto(0.5)")
    assert code == 1
    assert json.loads(out)["classes"]["G"]["witness"]["kind"] == "ESS_INF"


def test_check_with_probe(capsys):
    code, out, _ = run(capsys, "check", "G", "sum2(lomax(1))", "--probe", "0.02,0.18")
    doc = json.loads(out)
    assert code == 1
    assert (doc["report"]["witness"]["x"], doc["report"]["witness"]["y"]) == (0.02, 0.18)


def test_parse_error_is_usage(capsys):
    code, _, err = run(capsys, "classify", "pareto(-1)")
    assert code == 3
    e = json.loads(err)["error"]
    assert e["code"] == "PARAM_RANGE" and e["offset"] == 7


def test_bad_flag_is_usage(capsys):
    code, _, _ = run(capsys, "classify", "pareto(1)", "--grid", "1,2")
    assert code == 3


def test_inconclusive_exit(capsys):
    code, out, _ = run(
        capsys, "dominance", "sd", "pareto(0.5)", "--theta", "0.49,0.51", "--eta", "0.48,0.52", "--x", "3", "--mc-n", "2000", "--seed", "1"
    )
    assert code == 2
    assert json.loads(out)["relation"] == "INCONCLUSIVE"


def test_seeded_output_is_byte_identical(capsys):
    argv = ("dominance", "sdcp", "pareto(0.6)", "frechet(0.9)", "lomax(0.8)", "--theta", "0.2,0.3,0.5", "--mc-n", "20000", "--seed", "7", "--x", "2,5,50")
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a == b


def test_seed_from_environment(capsys, monkeypatch):
    argv = ("dominance", "sd", "pareto(0.5)", "--theta", "0.4,0.6", "--eta", "0.25,0.75", "--x", "3", "--mc-n", "5000")
    monkeypatch.setenv("HTD_SEED", "5")
    a = run(capsys, *argv)
    b = run(capsys, *argv, "--seed", "5")
    assert a == b


def test_reproduce_text_and_json(capsys):
    code, out, _ = run(capsys, "reproduce", "ex4.1")
    assert code == 0
    assert json.loads(out)["results"][0]["passed"] is True
    code, out, _ = run(capsys, "reproduce", "ex3.8", "--format", "text")
    assert code == 0 and "PASS" in out


def test_plotdata(capsys):
    code, out, _ = run(capsys, "plotdata", "pareto(1)", "--grid", "1,10,16,lin")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "x,survival,cdf,t,eta,Lambda"
    assert len(lines) == 17


def test_survival_and_canonical(capsys):
    code, out, _ = run(capsys, "survival", "pareto(0.5)", "--x", "4")
    assert code == 0 and json.loads(out)["survival"][0] == pytest.approx(0.5)
    code, out, _ = run(capsys, "canonical", "pareto( 2.0 )")
    assert out.strip() == "pareto(2)"


def test_majorize_chain(capsys):
    code, out, _ = run(capsys, "majorize", "0.2,0.3,0.5", "0,0,1", "--chain")
    doc = json.loads(out)
    assert code == 0
    assert doc["chain"][-1] == [0, 0, 1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "htd", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("htd ")
