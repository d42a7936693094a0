import json

import pytest

from walshlp import verify
from walshlp.cli import build_parser, run
from walshlp.harness import InvariantViolation


def test_verify_group(capsys):
    assert run(["verify", "group", "--max-n", "256"]) == 0
    assert "ok   verify group" in capsys.readouterr().out


def test_verify_small_suites():
    assert run(["verify", "lemma-intervals", "--max-n", "200"]) == 0
    assert run(["verify", "partition", "--max-b", "64"]) == 0
    assert run(["verify", "transform", "-K", "8", "--trials", "5"]) == 0
    assert run(["verify", "martingale", "-K", "8", "--trials", "3"]) == 0
    assert run(["verify", "chain", "-K", "8", "--trials", "5"]) == 0


def test_usage_errors_exit_2(capsys):
    for argv in (["verify", "partition", "--max-b", "0"],
                 ["estimate", "--p-grid", "2.5"],
                 ["estimate", "--resolution", "21"],
                 ["frobnicate"],
                 ["estimate", "--min-intervals", "9", "--max-intervals", "3"]):
        with pytest.raises(SystemExit) as exc:
            if run(argv) == 2:
                raise SystemExit(2)
        assert exc.value.code == 2


def test_estimate_anchor(tmp_path, capsys):
    out = tmp_path / "r.json"
    argv = ["estimate", "--p-grid", "2.0", "--trials", "50", "--resolution", "10", "--seed", "7",
            "--out", str(out)]
    assert run(argv) == 0
    text = capsys.readouterr().out
    assert "seed=7" in text
    data = json.loads(out.read_text())
    assert len(data) == 50
    assert all(abs(d["ratio"] - 1) <= 1e-9 for d in data)
    first = out.read_bytes()
    assert run(argv) == 0
    assert out.read_bytes() == first


def test_report_requires_out(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run(["report", "--trials", "2"])
    assert exc.value.code == 2
    out = tmp_path / "r.csv"
    assert run(["report", "--trials", "3", "-K", "8", "--format", "csv", "--out", str(out)]) == 0
    assert out.read_text().count("\n") == 1 + 3 * 4


def test_summary_file(tmp_path):
    path = tmp_path / "s.json"
    assert run(["estimate", "--p-grid", "1.5", "--trials", "4", "-K", "8", "--summary", str(path)]) == 0
    assert "max_ratio" in json.loads(path.read_text())


def test_weak_type(capsys):
    assert run(["weak-type", "--operator", "G", "--trials", "3", "-K", "8"]) == 0
    assert run(["weak-type", "--operator", "S", "--trials", "3", "-K", "8", "--exact"]) == 0
    assert "operator=S" in capsys.readouterr().out


def test_invariant_failure_exits_1(monkeypatch, capsys):
    def broken(max_n):
        raise InvariantViolation("associativity: fails at a=1, b=2, c=3")
    monkeypatch.setattr(verify, "verify_group", broken)
    assert run(["verify", "group"]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert err == ["FAIL associativity: fails at a=1, b=2, c=3"]


@pytest.mark.parametrize("sub", [["verify", "group"], ["verify", "partition"], ["estimate"],
                                 ["weak-type"], ["report"]])
def test_help_documents_defaults(sub, capsys):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(sub + ["--help"])
    assert exc.value.code == 0
    assert "default" in capsys.readouterr().out
