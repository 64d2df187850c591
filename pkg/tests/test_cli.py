from __future__ import annotations

import json
from pathlib import Path

import pytest

from higherfermi.cli import build_parser, jsonable, main, parse_complex, run

FIXTURES = Path(__file__).parent / "fixtures"

SELFTEST_COMMANDS = [
    ["theta"], ["phi37"], ["lseries", "eval"], ["mellin-check"], ["unfold-check"], ["scatter"],
    ["fermi", "track"], ["fermi", "golden-rule"], ["fermi", "cone"], ["hessian"], ["cone"],
]


def report(tmp_path, argv, name="r.json"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, json.loads(out.read_text())


def test_parse_complex():
    assert parse_complex("3+0i") == 3
    assert parse_complex("0.5 - 2i") == 0.5 - 2j
    assert parse_complex(2) == 2


def test_jsonable():
    assert jsonable({"z": 1 + 2j, "x": float("inf"), "t": (1, 2)}) == {"z": [1.0, 2.0], "x": "inf", "t": [1, 2]}


def test_phi37_csv_stdout(capsys):
    assert main(["phi37", "--upto", "10"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "n,a_n"
    assert [int(l.split(",")[1]) for l in lines[1:]] == [1, -2, -3, 2, -2, 6, -1, 0, 6, 4]


@pytest.mark.parametrize("cmd", SELFTEST_COMMANDS, ids=lambda c: " ".join(c))
def test_selftests(tmp_path, cmd):
    code, rep = report(tmp_path, cmd + ["--selftest"])
    assert code == 0, rep
    assert rep["outputs"]["passed"] and rep["outputs"]["selftest"]


def test_usage_errors(capsys):
    assert main(["phi37", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err
    assert main(["nosuchcommand"]) == 2
    assert main(["theta"]) == 2  # missing --upto
    assert main(["cone", "--cone", "/no/such/file.json"]) == 2


def test_domain_error_exit_code(tmp_path):
    code, rep = report(tmp_path, ["cone", "--cone", str(FIXTURES / "cone_parity_violation.json")])
    assert code == 1
    assert rep["error"]["code"] == "fermi.parity_pattern"
    code, rep = report(tmp_path, ["lseries", "eval", "--s", "2+0i", "--upto", "20"])
    assert code == 1 and rep["error"]["code"] == "lseries.non_convergent"


def test_golden_rule_report(tmp_path):
    code, rep = report(tmp_path, ["fermi", "golden-rule", "--model", str(FIXTURES / "n1.json"), "--n", "1"])
    assert code == 0
    assert rep["outputs"]["mismatch_residue"] < 0.01
    assert rep["tool"]["name"] == "higherfermi"


def test_track_writes_csv_and_timing(tmp_path):
    csv = tmp_path / "curve.csv"
    code, rep = report(tmp_path, ["fermi", "track", "--model", str(FIXTURES / "n2.json"), "--order", "4",
                                  "--radius", "0.05", "--csv", str(csv)])
    assert code == 0
    assert csv.read_text().startswith("eps,re_s_hat,re_rho")
    timing = json.loads((tmp_path / "r.json.timing.json").read_text())
    assert timing["wall_clock_seconds"] >= 0
    assert "wall_clock" not in json.dumps(rep)


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"upto": 6, "form": "C"}))
    code, rep = report(tmp_path, ["theta", "--config", str(cfg)])
    assert code == 0 and rep["inputs"]["upto"] == 6 and rep["inputs"]["form"] == "C"
    code, rep = report(tmp_path, ["theta", "--config", str(cfg), "--upto", "3"])
    assert rep["inputs"]["upto"] == 3
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert main(["theta", "--config", str(cfg)]) == 2


def test_determinism(tmp_path):
    argv = ["hessian", "--random", "50", "--g", "2", "--m", "2", "--seed", "7"]
    main(argv + ["--out", str(tmp_path / "a.json")])
    main(argv + ["--out", str(tmp_path / "b.json")])
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_threads_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("HIGHERFERMI_THREADS", "2")
    code, rep = run(["unfold-check", "--upto", "30", "--out", str(tmp_path / "u.json")])
    assert code == 0 and rep.outputs["passed"]


def test_parser_lists_all_subcommands():
    text = build_parser().format_help()
    for name in ("theta", "phi37", "lseries", "mellin-check", "unfold-check", "scatter", "fermi", "hessian", "cone"):
        assert name in text
