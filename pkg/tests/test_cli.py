"""End-to-end command line tests, run through ``python -m spinwire``."""

import json
import subprocess
import sys

import pytest


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "spinwire", *args],
        cwd=cwd,
        capture_output=True,
        text=True,
        timeout=300,
    )


def stdout_value(result, key):
    for line in result.stdout.splitlines():
        if line.startswith(f"{key} = "):
            return float(line.split(" = ")[1].split(" ")[0])
    raise AssertionError(f"{key!r} not in output:\n{result.stdout}")


class TestTransfer:
    def test_baseline_run(self, tmp_path):
        result = run_cli(["transfer"], tmp_path)
        assert result.returncode == 0, result.stderr
        tau = stdout_value(result, "tau")
        assert tau == pytest.approx(7.853981633974483, abs=1e-6)
        out = tmp_path / "transfer.csv"
        assert out.exists()
        header = out.read_text().splitlines()[0]
        assert header.startswith("time,")
        assert "fidelity" in header and "info_flux" in header

    def test_correlations_arrive_early(self, tmp_path):
        base = run_cli(["transfer", "--steps", "800"], tmp_path)
        fast = run_cli(
            ["transfer", "--alpha", "0.25", "--steps", "800", "--out", "f.csv"],
            tmp_path,
        )
        assert fast.returncode == 0, fast.stderr
        assert stdout_value(fast, "tau") < stdout_value(base, "tau")

    def test_json_output_with_metadata(self, tmp_path):
        result = run_cli(
            ["transfer", "--format", "json", "--steps", "400"], tmp_path
        )
        assert result.returncode == 0, result.stderr
        payload = json.loads((tmp_path / "transfer.json").read_text())
        meta = payload["metadata"]
        assert meta["n"] == 10
        assert "tau" in meta and "no_early_transfer" in meta
        assert meta["entropy_units"] == "nats"

    def test_bits_flag(self, tmp_path):
        result = run_cli(
            ["transfer", "--format", "json", "--steps", "200", "--bits"],
            tmp_path,
        )
        assert result.returncode == 0, result.stderr
        payload = json.loads((tmp_path / "transfer.json").read_text())
        assert payload["metadata"]["entropy_units"] == "bits"

    def test_reruns_byte_identical(self, tmp_path):
        run_cli(["transfer", "--steps", "300", "--out", "a.csv"], tmp_path)
        run_cli(["transfer", "--steps", "300", "--out", "b.csv"], tmp_path)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_plot_flag_writes_png(self, tmp_path):
        result = run_cli(["transfer", "--steps", "200", "--plot"], tmp_path)
        assert result.returncode == 0, result.stderr
        png = tmp_path / "transfer.png"
        assert png.exists()
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_config_file_with_cli_override(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"n": 6, "steps": 200, "alpha": 0.1}))
        result = run_cli(
            ["transfer", "--config", str(cfg), "--n", "8", "--format", "json"],
            tmp_path,
        )
        assert result.returncode == 0, result.stderr
        meta = json.loads((tmp_path / "transfer.json").read_text())["metadata"]
        assert meta["n"] == 8  # flag beats file
        assert meta["alpha"] == 0.1  # file beats default


class TestScan:
    def test_combined_table(self, tmp_path):
        result = run_cli(
            ["scan", "--n", "4,5", "--alpha", "0,0.1", "--steps", "400"],
            tmp_path,
        )
        assert result.returncode == 0, result.stderr
        assert "n=4: 2/2 points ok" in result.stdout
        assert "n=5: 2/2 points ok" in result.stdout
        lines = (tmp_path / "scan.csv").read_text().splitlines()
        assert lines[0].startswith("n,alpha,")
        assert len(lines) == 5  # header + 2 chains x 2 alphas

    def test_inadmissible_points_marked_not_fatal(self, tmp_path):
        result = run_cli(
            [
                "scan",
                "--n",
                "4",
                "--alpha",
                "0,0.2,0.4",
                "--beta",
                "0.5",
                "--steps",
                "300",
            ],
            tmp_path,
        )
        assert result.returncode == 0, result.stderr
        assert "n=4: 1/3 points ok" in result.stdout

    def test_all_points_failing_is_an_error(self, tmp_path):
        result = run_cli(
            ["scan", "--n", "4", "--alpha", "0.45,0.49", "--beta", "1.0"],
            tmp_path,
        )
        assert result.returncode == 1
        assert "error:" in result.stderr


class TestOtoc:
    def test_default_times_write_three_tables(self, tmp_path):
        result = run_cli(["otoc", "--n", "8", "--engine", "wick"], tmp_path)
        assert result.returncode == 0, result.stderr
        for i in range(3):
            assert (tmp_path / f"otoc_{i:02d}.csv").exists()
        assert result.stdout.count("mean_position = ") == 3

    def test_sector_engine_profile(self, tmp_path):
        result = run_cli(
            [
                "otoc",
                "--n",
                "9",
                "--engine",
                "sector",
                "--alpha",
                "0.25",
                "--times",
                "0.5tau",
                "--format",
                "json",
            ],
            tmp_path,
        )
        assert result.returncode == 0, result.stderr
        payload = json.loads((tmp_path / "otoc_00.json").read_text())
        assert payload["metadata"]["engine"] == "sector"
        assert len(payload["columns"]["site"]) == 9

    def test_brute_engine_size_cap(self, tmp_path):
        result = run_cli(["otoc", "--n", "40", "--engine", "brute"], tmp_path)
        assert result.returncode == 1
        assert "error:" in result.stderr


class TestVerify:
    def test_battery_passes(self, tmp_path):
        result = run_cli(["verify"], tmp_path)
        assert result.returncode == 0, result.stderr
        assert "9/9 checks passed" in result.stdout
        assert result.stdout.count("ok - ") == 9

    def test_perturbed_hamiltonian_is_caught(self, tmp_path):
        result = run_cli(["verify", "--perturb"], tmp_path)
        assert result.returncode == 2
        assert "FAIL - " in result.stdout
        assert "verify failed:" in result.stderr


class TestExitCodes:
    def test_unknown_command(self, tmp_path):
        assert run_cli(["frobnicate"], tmp_path).returncode == 1

    def test_unknown_flag(self, tmp_path):
        assert run_cli(["transfer", "--frob", "1"], tmp_path).returncode == 1

    def test_help_exits_zero(self, tmp_path):
        result = run_cli(["--help"], tmp_path)
        assert result.returncode == 0
        for command in ("transfer", "scan", "otoc", "verify"):
            assert command in result.stdout

    def test_invalid_value_exits_one(self, tmp_path):
        result = run_cli(["transfer", "--steps", "0"], tmp_path)
        assert result.returncode == 1
        assert "error:" in result.stderr

    def test_probe_site_out_of_range(self, tmp_path):
        result = run_cli(["otoc", "--n", "6", "--y", "19"], tmp_path)
        assert result.returncode == 1
        assert "error:" in result.stderr
