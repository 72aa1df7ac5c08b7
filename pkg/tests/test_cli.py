"""Command-line surface: subcommands, exit codes, artifact round trips."""

import json
import subprocess
import sys

import pytest

from opineq.cli import cli_main
from opineq.generators import build_instance, evaluate_instance, instance_from_json


def test_list_prints_registry(capsys):
    assert cli_main(["list"]) == 0
    out = capsys.readouterr().out
    assert "check_naopaka" in out
    assert "Theorem (Naopaka)" in out
    assert len(out.strip().splitlines()) == 11


def test_verify_small_run(capsys):
    code = cli_main(["verify", "--checks", "check_cs", "--trials", "10", "--seed", "7"])
    out = capsys.readouterr().out
    assert code == 0
    assert "check_cs" in out
    assert "overall OK" in out


def test_verify_writes_deterministic_jsonl(tmp_path, capsys):
    args = ["verify", "--checks", "check_cs,check_hs", "--trials", "3",
            "--seed", "5", "--dim", "2"]
    p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert cli_main(args + ["--out", str(p1)]) == 0
    assert cli_main(args + ["--out", str(p2)]) == 0
    capsys.readouterr()
    assert p1.read_bytes() == p2.read_bytes()
    lines = p1.read_text().splitlines()
    assert len(lines) == 6
    names = {json.loads(l)["name"] for l in lines}
    assert names == {"check_cs", "check_hs"}


def test_verify_exponent_flags(tmp_path, capsys):
    path = tmp_path / "interp.jsonl"
    code = cli_main(["verify", "--checks", "check_interp", "--trials", "2",
                     "--dim", "2", "--pqr", "2,2,2", "--pqr", "4/3,4/3,4/3",
                     "--out", str(path)])
    capsys.readouterr()
    assert code == 0
    lines = [json.loads(l) for l in path.read_text().splitlines()]
    assert len(lines) == 4
    ps = sorted({l["params"]["p"] for l in lines})
    assert ps == pytest.approx([4 / 3, 2.0])


def test_verify_usage_errors(capsys):
    assert cli_main(["verify", "--checks", "check_wat"]) == 2
    assert "check_wat" in capsys.readouterr().err
    # violated exponent relation is a configuration error, not a crash
    assert cli_main(["verify", "--checks", "check_interp", "--pqr", "2,3,3"]) == 2
    capsys.readouterr()
    # argparse rejects unknown subcommands with its usage status
    assert cli_main(["frobnicate"]) == 2
    capsys.readouterr()


def test_search_writes_replayable_instance(tmp_path, capsys):
    path = tmp_path / "instance.json"
    code = cli_main(["search", "--check", "check_naopaka", "--drop", "normality",
                     "--budget", "150", "--seed", "5", "--dim", "2", "--len", "2",
                     "--out", str(path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "best normalized margin" in out and "drop: normality" in out
    saved = json.loads(path.read_text())
    inst = instance_from_json(saved)
    assert inst.check == "check_naopaka" and inst.drop == ("normality",)
    replay_code = cli_main(["replay", "--instance", str(path)])
    replay_out = capsys.readouterr().out
    obj = json.loads(replay_out)
    assert replay_code in (0, 1)
    assert (replay_code == 0) == obj["holds"]
    rep = evaluate_instance(inst)
    assert obj["margin"] == pytest.approx(rep.margin, abs=1e-12)


def test_replay_reproduces_saved_margin(tmp_path, capsys):
    inst = build_instance("check_cs", 12, dim=3, length=2)
    want = evaluate_instance(inst)
    path = tmp_path / "cs.json"
    path.write_text(json.dumps(inst.to_json(), sort_keys=True))
    assert cli_main(["replay", "--instance", str(path)]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["margin"] == pytest.approx(want.margin, abs=1e-12)
    assert obj["holds"] is True


def test_replay_missing_file_is_runtime_error(capsys):
    assert cli_main(["replay", "--instance", "/nonexistent/inst.json"]) == 1
    assert "error" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "opineq", "list"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "check_cs" in proc.stdout
