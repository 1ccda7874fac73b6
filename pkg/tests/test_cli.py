import json

import numpy as np
import pytest

from axirh.cli import main

BASE_CONFIG = {
    "n": 3,
    "alpha": 0.0,
    "domain": {"type": "disk", "center": [0.0, 2.0], "radius": 1.0},
    "lambda": {"fourier": {"0": [1.0, 0.0]}},
    "g": {"fourier": {"0": [1.0, 0.0]}},
    "solver": {"grid": {"K": 48, "M": 32}, "boundary_N": 128},
    "output": {"fields_csv": "fields.csv", "report_json": "report.json"},
}


def write_config(tmp_path, obj, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def load(path):
    with open(path) as fh:
        return json.load(fh)


class TestSolve:
    def test_trivial_schwarz(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        assert main(["solve", "--config", cfg, "--output-dir", str(tmp_path)]) == 0
        data = np.genfromtxt(tmp_path / "fields.csv", delimiter=",", names=True)
        assert np.all(data["A"] == 1.0)
        assert np.all(data["B"] == 0.0)
        report = load(tmp_path / "report.json")
        assert report["residuals"]["bc_residual_max"] == 0.0
        assert report["residuals"]["pde_residual_max"] == 0.0
        assert report["error"] is None

    def test_infeasible_exits_2(self, tmp_path):
        obj = dict(BASE_CONFIG)
        obj["n"] = 1
        obj["lambda"] = {"fourier": {"1": [1.0, 0.0]}}   # e^{i theta}
        obj["g"] = {"fourier": {"0": [1.0, 0.0]}}
        cfg = write_config(tmp_path, obj)
        assert main(["solve", "--config", cfg, "--output-dir", str(tmp_path)]) == 2
        report = load(tmp_path / "report.json")
        assert report["residuals"]["solvable"] is False
        moments = report["residuals"]["moments"]
        assert len(moments) >= 1
        assert abs(complex(*moments[0])) > 1e-8

    def test_unknown_keys_exit_1(self, tmp_path):
        obj = dict(BASE_CONFIG)
        obj["mystery"] = 1
        cfg = write_config(tmp_path, obj)
        assert main(["solve", "--config", cfg, "--output-dir", str(tmp_path)]) == 1

    def test_missing_physical_parameter_exit_1(self, tmp_path):
        obj = {k: v for k, v in BASE_CONFIG.items() if k != "n"}
        cfg = write_config(tmp_path, obj)
        assert main(["solve", "--config", cfg, "--output-dir", str(tmp_path)]) == 1

    def test_override(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        code = main(["solve", "--config", cfg, "--output-dir", str(tmp_path),
                     "--override", "solver.grid.K=32",
                     "--override", "solver.damping=0.5"])
        assert code == 0
        report = load(tmp_path / "report.json")
        assert report["solver"]["grid"]["K"] == 32
        assert report["solver"]["damping"] == 0.5


class TestVerify:
    def test_roundtrip_reproduces_residuals(self, tmp_path):
        obj = dict(BASE_CONFIG)
        obj["g"] = {"fourier": {"0": [1.5, 0.0], "1": [0.25, 0.0],
                                "-1": [0.25, 0.0]}}
        cfg = write_config(tmp_path, obj)
        assert main(["solve", "--config", cfg, "--output-dir", str(tmp_path),
                     "--override", "solver.tol_fp=0.002"]) == 0
        assert main(["verify", "--config", cfg, "--output-dir", str(tmp_path),
                     "--override", "solver.tol_fp=0.002"]) == 0
        solve_rep = load(tmp_path / "report.json")["residuals"]
        verify_rep = load(tmp_path / "report.verify.json")["residuals"]
        for key in ("pde_residual_max", "pde_residual_rms",
                    "bc_residual_max", "bc_residual_rms"):
            assert abs(solve_rep[key] - verify_rep[key]) <= 1e-12

    def test_corrupted_csv_reports_large_residuals(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        main(["solve", "--config", cfg, "--output-dir", str(tmp_path)])
        # corrupt the stored field: A -> A + x0 breaks the system residual
        path = tmp_path / "fields.csv"
        rows = path.read_text().splitlines()
        out = [rows[0]]
        for line in rows[1:]:
            x0, r, a, b = (float(v) for v in line.split(","))
            out.append(f"{x0:.17g},{r:.17g},{a + x0:.17g},{b:.17g}")
        path.write_text("\n".join(out) + "\n")
        # verification still succeeds (exit 0) and flags the damage
        assert main(["verify", "--config", cfg,
                     "--output-dir", str(tmp_path)]) == 0
        rep = load(tmp_path / "report.verify.json")["residuals"]
        assert rep["pde_residual_max"] > 0.5


class TestDeterminism:
    def test_byte_identical_reports(self, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        texts = []
        for run in ("a", "b"):
            outdir = tmp_path / run
            outdir.mkdir()
            assert main(["solve", "--config", cfg, "--output-dir",
                         str(outdir), "--seed", "11"]) == 0
            report = load(outdir / "report.json")
            del report["timestamps"]
            texts.append(json.dumps(report, sort_keys=True))
        assert texts[0] == texts[1]


class TestOtherCommands:
    def test_index_command(self, tmp_path, capsys):
        obj = dict(BASE_CONFIG)
        obj["n"] = 1
        obj["lambda"] = {"fourier": {"1": [1.0, 0.0]}}
        cfg = write_config(tmp_path, obj)
        assert main(["index", "--config", cfg]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["m"] == -1
        assert abs(complex(*payload["moments"][0]) - 1.0) < 1e-10

    def test_map_check_command(self, tmp_path, capsys):
        cfg = write_config(tmp_path, BASE_CONFIG)
        assert main(["map-check", "--config", cfg]) == 0
        diag = json.loads(capsys.readouterr().out)
        assert diag["kind"] == "affine"
        assert diag["roundtrip"] < 1e-10
        assert abs(diag["quadrature_area"] - np.pi) < 1e-8

    def test_oracle_compare_command(self, tmp_path):
        obj = dict(BASE_CONFIG)
        obj["g"] = {"fourier": {"0": [1.5, 0.0], "1": [0.25, 0.0],
                                "-1": [0.25, 0.0]}}
        obj["oracle"] = {"K": 32, "M": 32}
        cfg = write_config(tmp_path, obj)
        assert main(["oracle-compare", "--config", cfg, "--output-dir",
                     str(tmp_path), "--override", "solver.tol_fp=0.002"]) == 0
        report = load(tmp_path / "report.json")
        assert report["oracle"]["rel_l2"] < 0.05
        assert report["oracle"]["resolution"] == [32, 32]
