import json

import numpy as np
import pytest

from tripod_holonomy.cli import main

OMEGA_TAU_1 = 18.251004041881252


def run(argv, capsys=None):
    code = main(argv)
    if capsys is not None:
        return code, capsys.readouterr()
    return code


class TestHolonomyCommand:
    def test_prints_not_matrix(self, capsys):
        code, out = run(["holonomy", "--loop", "standard"], capsys)
        assert code == 0
        doc = json.loads(out.out)
        assert doc["dim"] == 2
        entries = np.array(doc["entries"]).reshape(2, 2, 2)
        matrix = entries[..., 0] + 1j * entries[..., 1]
        np.testing.assert_allclose(matrix, [[0.0, 1.0], [-1.0, 0.0]], atol=1e-12)

    def test_wedge_loop_flag(self, capsys):
        code, out = run(["holonomy", "--loop", "wedge:2"], capsys)
        assert code == 0
        doc = json.loads(out.out)
        c = float(np.cos(np.pi / 4))
        np.testing.assert_allclose(
            np.array(doc["entries"]).reshape(2, 2, 2)[..., 0],
            [[c, c], [-c, c]],
            atol=1e-12,
        )

    def test_bad_loop_kind(self, capsys):
        code, out = run(["holonomy", "--loop", "pentagon"], capsys)
        assert code == 2
        assert "pentagon" in out.err


class TestSweepCommands:
    def test_ideal_sweep_single_point(self, tmp_path):
        out = tmp_path / "run"
        code = main([
            "ideal-sweep", "--omega-tau", f"{OMEGA_TAU_1}", "--states", "30",
            "--out", str(out),
        ])
        assert code == 0
        rows = (out / "sweep_lambda2_0.csv").read_text().strip().split("\n")
        assert rows[0] == "omega_tau,mean_fidelity"
        omega_tau, fid = map(float, rows[1].split(","))
        assert omega_tau == pytest.approx(OMEGA_TAU_1)
        assert fid == pytest.approx(1.0, abs=1e-6)

    def test_ideal_sweep_rejects_nonzero_lambda(self, tmp_path):
        code = main([
            "ideal-sweep", "--omega-tau", "18", "--lambda-sq", "0.01",
            "--out", str(tmp_path / "x"),
        ])
        assert code == 2

    def test_missing_grid_is_config_error(self, tmp_path):
        assert main(["ideal-sweep", "--out", str(tmp_path / "x")]) == 2

    def test_invalid_grid_is_config_error(self, tmp_path):
        assert main(["ideal-sweep", "--grid", "10:20:0", "--out", str(tmp_path / "x")]) == 2

    def test_noisy_zero_lambda_matches_ideal(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["--grid", "17:19:3", "--states", "24"]
        assert main(["ideal-sweep", *args, "--out", str(a)]) == 0
        assert main(["noisy-sweep", *args, "--lambda-sq", "0", "--out", str(b)]) == 0
        assert (a / "sweep_lambda2_0.csv").read_bytes() == (b / "sweep_lambda2_0.csv").read_bytes()

    def test_noisy_sweep_one_file_per_coupling(self, tmp_path):
        out = tmp_path / "n"
        code = main([
            "noisy-sweep", "--grid", "18:19:2", "--lambda-sq", "0,0.01",
            "--gamma0", "0.5", "--states", "16", "--steps", "600", "--out", str(out),
        ])
        assert code == 0
        assert (out / "sweep_lambda2_0.csv").exists()
        assert (out / "sweep_lambda2_0.01.csv").exists()
        ideal = np.loadtxt(out / "sweep_lambda2_0.csv", delimiter=",", skiprows=1)
        noisy = np.loadtxt(out / "sweep_lambda2_0.01.csv", delimiter=",", skiprows=1)
        assert np.all(noisy[:, 1] <= ideal[:, 1])

    def test_missing_noise_file(self, tmp_path, capsys):
        code, out = run([
            "noisy-sweep", "--grid", "18:19:2", "--noise-file", "nowhere/missing.json",
            "--out", str(tmp_path / "x"),
        ], capsys)
        assert code == 2
        assert "nowhere/missing.json" in out.err

    def test_under_resolved_run_exits_3(self, tmp_path):
        code = main([
            "noisy-sweep", "--omega-tau", "2000", "--lambda-sq", "0.05",
            "--steps", "3", "--states", "8", "--out", str(tmp_path / "x"),
        ])
        assert code == 3


class TestOptimalAndFit:
    def test_optimal_single_lambda(self, tmp_path):
        out = tmp_path / "opt"
        code = main([
            "optimal", "--lambda-sq", "0", "--states", "30", "--out", str(out),
        ])
        assert code == 0
        doc = json.loads((out / "optimal_points.json").read_text())
        assert len(doc["rows"]) == 1
        row = doc["rows"][0]
        assert row["lambda_sq"] == 0.0
        assert abs(row["omega_tau_star"] - OMEGA_TAU_1) <= 1e-3
        assert row["f_star"] >= 1.0 - 1e-6
        assert doc["config"]["states"] == 30

    def test_fit_recovers_synthetic_reference_coefficients(self, tmp_path):
        lams = np.linspace(1e-4, 1e-3, 7)
        rows = [
            {
                "lambda_sq": float(lam),
                "f_star": float(1 - 6.34 * lam),
                "omega_tau_star": float(OMEGA_TAU_1 - 59.40 * lam),
            }
            for lam in lams
        ]
        table = tmp_path / "table.json"
        table.write_text(json.dumps({"rows": rows}))
        out = tmp_path / "fit"
        code = main(["fit", "--table", str(table), "--out", str(out)])
        assert code == 0
        doc = json.loads((out / "fit_results.json").read_text())
        f2 = doc["fits"]["f_linear"]["coefficients"][0]
        assert f2["name"] == "F2"
        assert abs(f2["value"] - 6.34) <= 1e-8
        tau2 = doc["fits"]["tau_linear"]["coefficients"][0]
        assert abs(tau2["value"] - 59.40) <= 1e-8
        assert doc["f_of_tau_slope"] == pytest.approx(6.34 / 59.40, abs=1e-9)

    def test_fit_underdetermined_table(self, tmp_path):
        table = tmp_path / "table.json"
        table.write_text(json.dumps({
            "rows": [{"lambda_sq": 1e-4, "f_star": 0.999, "omega_tau_star": 18.25}]
        }))
        assert main(["fit", "--table", str(table), "--out", str(tmp_path / "x")]) == 2

    def test_fit_requires_table(self, tmp_path):
        assert main(["fit", "--out", str(tmp_path / "x")]) == 2

    def test_robustness_zero_coupling(self, tmp_path):
        out = tmp_path / "rob"
        code = main([
            "robustness", "--lambda-sq", "0", "--states", "24", "--out", str(out),
        ])
        assert code == 0
        doc = json.loads((out / "robustness.json").read_text())
        assert doc["rows"][0]["lambda_sq"] == 0.0
        assert abs(doc["rows"][0]["robustness"]) <= 1e-6


class TestDeterminismAndRoundTrip:
    def test_identical_config_identical_bytes(self, tmp_path):
        args = ["ideal-sweep", "--grid", "17:20:4", "--states", "20"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main([*args, "--out", str(a)]) == 0
        assert main([*args, "--out", str(b)]) == 0
        assert (a / "sweep_lambda2_0.csv").read_bytes() == (b / "sweep_lambda2_0.csv").read_bytes()

    def test_rerun_from_emitted_config(self, tmp_path):
        a = tmp_path / "a"
        assert main(["ideal-sweep", "--grid", "17:20:4", "--states", "20",
                     "--out", str(a)]) == 0
        emitted = a / "run_config.json"
        b = tmp_path / "b"
        assert main(["ideal-sweep", "--config", str(emitted), "--out", str(b)]) == 0
        assert (a / "sweep_lambda2_0.csv").read_bytes() == (b / "sweep_lambda2_0.csv").read_bytes()

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"grid": [17, 20, 4], "typo_key": 1}))
        assert main(["ideal-sweep", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 2

    def test_invalid_worker_env_is_config_error(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HOLONOMY_THREADS", "many")
        code = main(["ideal-sweep", "--grid", "17:19:2", "--states", "16",
                     "--out", str(tmp_path / "x")])
        assert code == 2

    def test_worker_env_respected(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HOLONOMY_THREADS", "1")
        assert main(["ideal-sweep", "--grid", "17:19:2", "--states", "16",
                     "--out", str(tmp_path / "x")]) == 0
