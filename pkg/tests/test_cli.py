import subprocess
import sys

from conftest import corpus_path


def run_cli(*args, input_text=None):
    return subprocess.run(
        [sys.executable, "-m", "synthcell.cli", *args],
        capture_output=True, text=True, input=input_text, timeout=120,
    )


def test_check_accepts_corpus_and_rejects_duplicates(tmp_path):
    ok = run_cli("check", corpus_path("cell.ax"))
    assert ok.returncode == 0 and "85 axioms" in ok.stdout
    bad = tmp_path / "dup.ax"
    bad.write_text("rel p/0.\naxiom a assertion: p.\naxiom a assertion: p.\n")
    res = run_cli("check", str(bad))
    assert res.returncode == 1
    assert "duplicate" in res.stdout


def test_replay_prints_answer_channel():
    res = run_cli(
        "replay", corpus_path("simple_circuit.ax"), corpus_path("simple_circuit.proof")
    )
    assert res.returncode == 0
    assert "trg(s1,dxy(d4,d3))" in res.stdout
    assert "true" in res.stdout


def test_simulate_scenario_exits_zero_without_violations():
    res = run_cli("simulate", corpus_path("module1.scn"))
    assert res.returncode == 0
    assert "no safety violations" in res.stdout


def test_prove_repl_applies_and_undoes():
    script = "tab\nrs 13 12\nout\nundo\nquit\n"
    res = run_cli("prove", corpus_path("simple_circuit.ax"), input_text=script)
    assert res.returncode == 0
    assert "loaded 7 axioms" in res.stdout


def test_oracle_suites():
    res = run_cli("oracle", "gates", "--cases", "50")
    assert res.returncode == 0 and "ok" in res.stdout
