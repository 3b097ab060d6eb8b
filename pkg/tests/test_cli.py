import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from primeadd.cli import PURPOSE, main

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"
REGEN = os.environ.get("PRIMEADD_REGEN_GOLDEN") == "1"

# one golden file per command; paths are relative to the repository root
CASES = {
    "construct4": ["construct4", "--m", "8", "--p-index", "0", "--aprime", "1", "--bprime", "1", "--cprime", "1"],
    "exact4": ["exact4", "--m", "3"],
    "theorem2": ["theorem2", "--p", "5", "--q", "7", "--r", "3"],
    "lift": ["lift", "--in", "tests/golden/construct4.jsonl", "--d-mult", "1"],
    "star-witness": ["star-witness", "--a", "7", "--f", "12", "--g", "3"],
    "density": ["density", "--a", "7", "--f", "12", "--g", "3", "--truncation", "10000", "--corollary"],
    "count-pi": ["count-pi", "--x", "100000", "--g", "2", "--truncation", "10000"],
    "enumerate": ["enumerate", "--N", "500"],
    "count-shortest": ["count-shortest", "--N", "1000", "--N", "5000"],
    "check8": ["check8", "--N", "5000"],
    "verify": ["verify", "--in", "tests/golden/construct4.jsonl", "--in", "tests/golden/theorem2.jsonl"],
}


def run(argv, tmp_path, name="out.jsonl"):
    out = tmp_path / name
    code = main(["--output", str(out)] + argv)
    return code, out.read_text() if out.exists() else ""


def records(text):
    return [json.loads(line) for line in text.splitlines() if line]


@pytest.fixture(autouse=True)
def at_root(monkeypatch):
    monkeypatch.chdir(ROOT)


def test_every_command_has_a_golden_case():
    assert set(CASES) == set(PURPOSE)


@pytest.mark.parametrize("name", list(CASES))
def test_golden(name, tmp_path):
    code, text = run(CASES[name], tmp_path)
    assert code == 0
    path = GOLDEN / f"{name}.jsonl"
    if REGEN:
        path.write_text(text)
    assert text == path.read_text(), f"{name} output drifted; rerun with PRIMEADD_REGEN_GOLDEN=1 if intended"
    recs = records(text)
    assert recs[0]["record"] == "header" and recs[0]["command"] == name
    assert all(r["schema_version"] == 1 for r in recs)


def test_byte_identical_runs(tmp_path):
    _, a = run(CASES["construct4"], tmp_path, "a.jsonl")
    _, b = run(CASES["construct4"], tmp_path, "b.jsonl")
    assert a == b


def test_stdout_and_module_entry():
    proc = subprocess.run([sys.executable, "-m", "primeadd", "construct4", "--m", "8"],
                          capture_output=True, text=True, cwd=ROOT)
    assert proc.returncode == 0
    lines = proc.stdout.splitlines()
    assert len(lines) == 2 and json.loads(lines[1])["record"] == "certificate"


def test_even_bprime_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["construct4", "--bprime", "2"])
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert "--bprime" in err and "odd" in err and PURPOSE["construct4"] in err


def test_missing_flag_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["theorem2", "--p", "5"])
    assert exc.value.code == 2
    assert PURPOSE["theorem2"] in capsys.readouterr().err


def test_nonpositive_bound_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["construct4", "--m", "8", "--max-witnesses", "0"])
    assert exc.value.code == 2


def test_no_qualifying_role_exit_2(tmp_path, capsys):
    code, _ = run(["theorem2", "--p", "7", "--q", "17", "--r", "41"], tmp_path)
    assert code == 2
    assert "3 or 5 mod 8" in capsys.readouterr().err


def test_bound_exhausted_exit_3(tmp_path, capsys):
    code, _ = run(["construct4", "--m", "8", "--max-witnesses", "1", "--max-candidates", "3"], tmp_path)
    assert code == 3
    assert "inconclusive" in capsys.readouterr().err


def test_literal_variant_exit_4(tmp_path):
    code, text = run(["construct4", "--m", "8", "--variant", "literal"], tmp_path)
    assert code == 4
    assert records(text)[-1]["record"] == "failed-certificate"


def test_lift_d2_rejected(tmp_path):
    code, _ = run(["lift", "--in", "tests/golden/construct4.jsonl", "--d", "2"], tmp_path)
    assert code == 2


def test_verify_round_trip_and_tamper(tmp_path):
    code, text = run(["construct4", "--m", "12", "--p-index", "1"], tmp_path, "c.jsonl")
    assert code == 0
    code, rep = run(["verify", "--in", str(tmp_path / "c.jsonl")], tmp_path, "v.jsonl")
    assert code == 0 and records(rep)[1]["all_pass"] is True
    recs = records(text)
    recs[1]["exponents"]["a"] = str(int(recs[1]["exponents"]["a"]) + 1)
    (tmp_path / "bad.jsonl").write_text("\n".join(json.dumps(r) for r in recs) + "\n")
    code, rep = run(["verify", "--in", str(tmp_path / "bad.jsonl")], tmp_path, "v2.jsonl")
    assert code == 1 and records(rep)[1]["all_pass"] is False


def test_verify_malformed_certificate(tmp_path):
    _, text = run(CASES["construct4"], tmp_path, "c.jsonl")
    recs = records(text)
    recs[1]["schema_version"] = 99
    (tmp_path / "bad.jsonl").write_text("\n".join(json.dumps(r) for r in recs) + "\n")
    code, rep = run(["verify", "--in", str(tmp_path / "bad.jsonl")], tmp_path, "v.jsonl")
    assert code == 1 and records(rep)[1]["all_pass"] is False


def test_enumerate_checkpoint_resume(tmp_path):
    ck = tmp_path / "state.json"
    out = tmp_path / "e.jsonl"
    assert main(["--output", str(out), "enumerate", "--N", "25000", "--checkpoint", str(ck)]) == 0
    full = out.read_text()
    # simulate an interrupted run: keep records up to the first checkpoint, then resume
    state = {"N": 25000, "m": None, "last_completed": 10001}
    ck.write_text(json.dumps(state))
    keep = [line for line in full.splitlines() if json.loads(line)["record"] == "header"
            or int(json.loads(line)["n"]) <= 10001]
    out.write_text("\n".join(keep) + "\n")
    assert main(["--output", str(out), "enumerate", "--N", "25000", "--checkpoint", str(ck)]) == 0
    assert out.read_text() == full
    assert json.loads(ck.read_text())["last_completed"] == 25000


def test_checkpoint_mismatch_exit_2(tmp_path):
    ck = tmp_path / "state.json"
    ck.write_text(json.dumps({"N": 10, "m": None, "last_completed": 5}))
    assert main(["--output", str(tmp_path / "o"), "enumerate", "--N", "99", "--checkpoint", str(ck)]) == 2


def test_table_format(capsys):
    assert main(["--format", "table", "star-witness", "--a", "7", "--f", "12", "--g", "3"]) == 0
    out = capsys.readouterr().out
    assert "s: 7" in out and "{" not in out.splitlines()[1]


def test_bounds_env(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "bounds.json"
    cfg.write_text(json.dumps({"max_witnesses": 1, "max_candidates": 3}))
    monkeypatch.setenv("PRIMEADD_BOUNDS", str(cfg))
    assert main(["construct4", "--m", "8"]) == 3


def test_output_flags_on_either_side(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["-o", str(a), "star-witness", "--a", "7", "--f", "12", "--g", "3"]) == 0
    assert main(["star-witness", "--a", "7", "--f", "12", "--g", "3", "--output", str(b)]) == 0
    assert a.read_text() == b.read_text()
