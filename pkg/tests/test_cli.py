"""Command-line interface: subcommands, formats, and exit codes."""

import json

import pytest

from winavc.cli import EXIT_CONFIG, EXIT_OK, EXIT_USAGE, cli_main


@pytest.fixture
def bitflip_config(tmp_path):
    doc = {
        "alphabets": {"x": 2, "s": 2, "y": 2},
        "channel": [[1, 0], [0, 1], [0, 1], [1, 0]],
        "gamma": [{"coeffs": [0, 1], "bound": 0.2}],
        "lambda": [{"coeffs": [0, 1], "bound": 0.1}],
        "windows": {"w_x": 64, "w_s": 64},
        "n": 512,
    }
    path = tmp_path / "bitflip.json"
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def experiment_config(tmp_path):
    doc = {
        "alphabets": {"x": 2, "s": 2, "y": 2},
        "channel": [[1, 0], [0, 1], [0, 1], [1, 0]],
        "gamma": [{"coeffs": [0, 1], "bound": 0.3}],
        "lambda": [{"coeffs": [0, 1], "bound": 0.05}],
        "windows": {"w_x": 64, "w_s": 64},
        "code": {
            "layout": "thm1", "n1": 256, "message_bits": 3, "field_bits": 3,
            "p_x": {"weight": 0.1}, "key_len": 64,
        },
        "jammer": {"kind": "iid"},
        "trials": 20,
        "seed": 3,
    }
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_capacity_prints_value(bitflip_config, capsys):
    assert cli_main(["capacity", "--config", bitflip_config]) == EXIT_OK
    out = capsys.readouterr().out
    assert "0.357751" in out
    assert "c_ran" in out


def test_capacity_json_format(bitflip_config, capsys):
    assert cli_main(["capacity", "--config", bitflip_config, "--format", "json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["c_list"] == pytest.approx(0.3578, abs=1e-3)
    assert doc["c_ran"] == doc["c_list"]
    assert doc["verdict"] == "equals_Clist_thm1"


def test_missing_config_exits_2():
    assert cli_main(["capacity", "--config", "/nonexistent.json"]) == EXIT_CONFIG


def test_bad_usage_exits_1(capsys):
    assert cli_main(["not-a-command"]) == EXIT_USAGE
    assert cli_main([]) == EXIT_USAGE
    capsys.readouterr()


def test_symmetrize_check(bitflip_config, capsys):
    code = cli_main([
        "symmetrize", "--config", bitflip_config, "--px", "0.9,0.1",
        "--format", "json",
    ])
    assert code == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["feasible"] is True
    assert doc["residual"] <= 1e-7


def test_symmetrize_scan(bitflip_config, capsys):
    code = cli_main(["symmetrize", "--config", bitflip_config, "--scan",
                     "--format", "json"])
    assert code == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["count"] > 0  # w = 0.2 > p = 0.1: non-symmetrizable points exist


def test_check_windows(tmp_path, capsys):
    doc = {
        "sequence": [1, 1, 0, 0, 0, 0, 0, 0],
        "window": 4,
        "dim": 2,
        "constraints": [{"coeffs": [0, 1], "bound": 0.25}],
    }
    path = tmp_path / "win.json"
    path.write_text(json.dumps(doc))
    assert cli_main(["check-windows", "--config", str(path), "--format", "json"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["valid"] is False
    assert out["violations"][0]["start"] == 0


def test_simulate_runs(experiment_config, capsys):
    assert cli_main(["simulate", "--config", experiment_config]) == EXIT_OK
    out = capsys.readouterr().out
    assert "err_avg" in out.splitlines()[0]


def test_simulate_seed_override(experiment_config, capsys):
    assert cli_main(["simulate", "--config", experiment_config, "--seed", "99",
                     "--format", "json"]) == EXIT_OK
    first = json.loads(capsys.readouterr().out)
    assert cli_main(["simulate", "--config", experiment_config, "--seed", "99",
                     "--format", "json"]) == EXIT_OK
    second = json.loads(capsys.readouterr().out)
    assert first == second


def test_sweep_to_file(tmp_path):
    grid = {"w": [0.2], "p": [0.1], "trials": 0}
    cfg = tmp_path / "grid.json"
    cfg.write_text(json.dumps(grid))
    out = tmp_path / "rows.csv"
    assert cli_main(["sweep", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    text = out.read_text()
    assert text.startswith("w,p,alpha,n,R,c_list,verdict")
    assert "0.357751" in text


def test_selftest_passes(capsys):
    assert cli_main(["selftest"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_malformed_json_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli_main(["capacity", "--config", str(bad)]) == EXIT_CONFIG


def test_config_missing_fields_exits_2(tmp_path):
    cfg = tmp_path / "partial.json"
    cfg.write_text(json.dumps({"alphabets": {"x": 2, "s": 2, "y": 2}}))
    assert cli_main(["capacity", "--config", str(cfg)]) == EXIT_CONFIG
