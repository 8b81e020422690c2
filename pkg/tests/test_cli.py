"""CLI: subcommands, overrides, CSV schema, exit codes, determinism."""

import json
import math

import pytest
from scipy.optimize import brentq

from beepid.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main

BASE_CONFIG = {
    "runs": 2,
    "period_ms": [100],
    "p": [0.3],
    "interference_rate": [0.0],
    "ideal_channel": True,
    "master_seed": 42,
}


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(BASE_CONFIG))
    return str(path)


def test_analyze_reports_optimal_p(capsys):
    assert main(["analyze", "--n", "9"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "optimal_p(n=9) = 0.1" in out
    assert "false_id target = 0.111111" in out


def test_analyze_degenerate_false_id(capsys):
    assert main(["analyze", "--n", "10", "--p", "0", "--T", "100"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "false_id_prob(n=10, p=0.0, T=100) = 1" in out


def test_analyze_matches_independent_root_solve(capsys):
    assert main(["analyze", "--n", "10"]) == EXIT_OK
    out = capsys.readouterr().out
    reported = float(
        next(line for line in out.splitlines() if line.startswith("optimal_T(")).split(
            "= "
        )[1]
    )
    base = 1.0 - 1.0 / (math.e * 11)
    root = brentq(lambda t: base**t - 0.1, 1.0, 1e4, xtol=1e-12)
    assert reported == pytest.approx(root, abs=1e-9)


def test_analyze_rejects_bad_domain(capsys):
    assert main(["analyze", "--n", "0"]) == EXIT_CONFIG
    assert main(["analyze", "--n", "5", "--p", "2.0", "--T", "10"]) == EXIT_CONFIG
    assert main(["analyze", "--n", "5", "--p", "0.5"]) == EXIT_CONFIG
    assert main(["analyze", "--n", "5", "--target", "0"]) == EXIT_CONFIG


def test_simulate_ideal_point(config_path, tmp_path, capsys):
    out_path = tmp_path / "out.csv"
    assert main(["simulate", "--config", config_path, "--out", str(out_path)]) == EXIT_OK
    lines = out_path.read_text().splitlines()
    assert lines[0] == (
        "T_ms,p,interference_rate,filter_len,runs,events,tp,fn,tn,fp,tp_rate,tn_rate"
    )
    assert len(lines) == 2
    fields = lines[1].split(",")
    assert fields[0] == "100"
    assert fields[1] == "0.300000"
    assert fields[10] == "1.000000"


def test_simulate_rejects_grid_config(config_path, tmp_path):
    assert (
        main(
            [
                "simulate",
                "--config",
                config_path,
                "--set",
                "p=0.1,0.2",
                "--out",
                str(tmp_path / "x.csv"),
            ]
        )
        == EXIT_CONFIG
    )


def test_sweep_emits_one_row_per_point(config_path, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code = main(
        [
            "sweep",
            "--config",
            config_path,
            "--set",
            "period_ms=50,100",
            "--set",
            "p=0.1,0.3",
            "--set",
            "interference_rate=0,0.2",
            "--out",
            str(out_path),
        ]
    )
    assert code == EXIT_OK
    lines = out_path.read_text().splitlines()
    assert len(lines) == 1 + 8


def test_seeded_runs_are_byte_identical(config_path, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        code = main(
            [
                "sweep",
                "--config",
                config_path,
                "--seed",
                "7",
                "--set",
                "ideal_channel=false",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_thread_count_is_invisible_in_output(config_path, tmp_path):
    a, b = tmp_path / "t1.csv", tmp_path / "t2.csv"
    args = ["sweep", "--config", config_path, "--set", "period_ms=50,100", "--set", "ideal_channel=false"]
    assert main(args + ["--threads", "1", "--out", str(a)]) == EXIT_OK
    assert main(args + ["--threads", "2", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_compare_filter_csv(config_path, tmp_path):
    out_path = tmp_path / "cmp.csv"
    code = main(
        [
            "compare-filter",
            "--config",
            config_path,
            "--filter-len",
            "3",
            "--set",
            "interference_rate=0.2",
            "--set",
            "ideal_channel=false",
            "--out",
            str(out_path),
        ]
    )
    assert code == EXIT_OK
    lines = out_path.read_text().splitlines()
    assert lines[0].startswith("T_ms,p,interference_rate,filter_len,runs,tp_rate_off")
    fields = lines[1].split(",")
    assert fields[3] == "3"
    # net = tp_gain - tn_loss, all at 6 decimals
    tp_gain, tn_loss, net = float(fields[9]), float(fields[10]), float(fields[11])
    assert net == pytest.approx(tp_gain - tn_loss, abs=2e-6)


def test_missing_config_file(tmp_path, capsys):
    code = main(["sweep", "--config", str(tmp_path / "nope.json")])
    assert code == EXIT_CONFIG
    assert "not found" in capsys.readouterr().err


def test_malformed_config_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["sweep", "--config", str(path)]) == EXIT_CONFIG
    assert "not valid JSON" in capsys.readouterr().err


def test_unknown_override_key(config_path, capsys):
    code = main(["sweep", "--config", config_path, "--set", "warp_speed=9"])
    assert code == EXIT_CONFIG
    assert "unknown config key" in capsys.readouterr().err


def test_invalid_override_value(config_path, capsys):
    code = main(["sweep", "--config", config_path, "--set", "p=high"])
    assert code == EXIT_CONFIG


def test_runtime_error_exit_code(config_path, tmp_path):
    missing_dir = tmp_path / "no" / "such" / "dir" / "out.csv"
    code = main(["sweep", "--config", config_path, "--out", str(missing_dir)])
    assert code == EXIT_RUNTIME


def test_effective_config_round_trips(config_path, tmp_path):
    first_csv = tmp_path / "first.csv"
    dumped = tmp_path / "effective.json"
    args = [
        "sweep",
        "--config",
        config_path,
        "--set",
        "ideal_channel=false",
        "--seed",
        "123",
    ]
    assert main(args + ["--out", str(first_csv), "--dump-config", str(dumped)]) == EXIT_OK
    second_csv = tmp_path / "second.csv"
    assert main(["sweep", "--config", str(dumped), "--out", str(second_csv)]) == EXIT_OK
    assert first_csv.read_bytes() == second_csv.read_bytes()


def test_emit_gnuplot_companion(config_path, tmp_path):
    out_path = tmp_path / "plot.csv"
    code = main(
        ["sweep", "--config", config_path, "--out", str(out_path), "--emit-gnuplot"]
    )
    assert code == EXIT_OK
    script = (tmp_path / "plot.gp").read_text()
    assert "plot.csv" in script


def test_stdout_output(config_path, capsys):
    assert main(["simulate", "--config", config_path]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("T_ms,")
