"""Command-line interface: exit codes, report schema, determinism, config."""

import json

import numpy as np
import pytest

from npp3.cli import main


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


SMALL_GRID = "x=-0.5:0.5:3,y=-0.5:0.5:3,z=-0.5:0.5:3"


class TestClassify:
    def test_elliptic(self, capsys):
        code, out, _ = run(["classify", "1", "6"], capsys)
        assert code == 0
        assert out.strip() == "Elliptic sigma=0"

    def test_flat(self, capsys):
        code, out, _ = run(["classify", "1", "0"], capsys)
        assert code == 0
        assert out.strip() == "Flat |sigma|=1"

    def test_no_solution(self, capsys):
        code, out, _ = run(["classify", "1", "-6"], capsys)
        assert code == 3
        assert out.startswith("NoSolution")

    def test_bad_lambda(self, capsys):
        code, _, err = run(["classify", "-1", "6"], capsys)
        assert code == 2
        assert "lambda" in err


class TestVerify:
    def test_standard_flat_passes(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code, _, err = run(
            ["verify", "standard-flat", "--lambda", "1", "--grid", SMALL_GRID,
             "--points", "3", "--out", str(out_path)],
            capsys,
        )
        assert code == 0
        report = json.loads(out_path.read_text())
        assert report["schema_version"] == 1
        assert report["summary"]["all_passed"] is True
        ids = [c["id"] for c in report["checks"]]
        assert ids == sorted(ids)
        assert len(ids) == len(set(ids))
        for check in report["checks"]:
            assert check["passed"] == (check["max_residual"] <= check["tolerance"])

    def test_unknown_example(self, capsys):
        code, _, err = run(["verify", "no-such-example"], capsys)
        assert code == 2

    def test_degenerate_grid_rejected(self, capsys):
        code, _, err = run(
            ["verify", "standard-flat", "--grid", "x=0:1:1,y=0:1:3,z=0:1:3"], capsys
        )
        assert code == 2
        assert "grid" in err

    def test_forced_failure_still_writes_report(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code, _, _ = run(
            ["verify", "standard-flat", "--grid", SMALL_GRID, "--points", "2",
             "--tol", "npp.commutators=1e-16", "--out", str(out_path)],
            capsys,
        )
        assert code == 1
        report = json.loads(out_path.read_text())
        assert report["summary"]["failed"] >= 1

    def test_deterministic_reports(self, tmp_path, capsys):
        paths = []
        for k in range(2):
            p = tmp_path / f"rep{k}.json"
            run(
                ["verify", "standard-flat", "--grid", SMALL_GRID, "--points", "2",
                 "--seed", "7", "--out", str(p)],
                capsys,
            )
            paths.append(json.loads(p.read_text()))
        for rep in paths:
            for check in rep["checks"]:
                check.pop("seconds")
        assert paths[0] == paths[1]

    def test_domain_violations_flagged(self, tmp_path, capsys):
        # grid crossing the zero locus of D sin + E cos: points are skipped,
        # remaining checks pass
        out_path = tmp_path / "report.json"
        code, _, _ = run(
            ["verify", "flat-b0nonzero", "--lambda", "1", "--D", "1", "--E", "0,1",
             "--grid", "r=-0.5:0.5:3,u=-1:1:3,v=-1:1:3", "--points", "3",
             "--out", str(out_path)],
            capsys,
        )
        assert code == 0
        report = json.loads(out_path.read_text())
        adapted = next(c for c in report["checks"] if c["id"] == "adapted.form")
        assert adapted["skipped"] > 0
        assert report["summary"]["all_passed"] is True

    def test_elliptic_passes_including_round_pullback(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code, _, _ = run(
            ["verify", "elliptic", "--lambda", "1", "--f", "0", "--points", "3",
             "--out", str(out_path)],
            capsys,
        )
        assert code == 0
        report = json.loads(out_path.read_text())
        assert report["summary"]["all_passed"] is True
        pullback = next(c for c in report["checks"] if c["id"] == "isometry.pullback")
        assert pullback["max_residual"] < 1e-5

    def test_csv_format(self, tmp_path, capsys):
        out_path = tmp_path / "report.csv"
        code, _, _ = run(
            ["verify", "standard-flat", "--grid", SMALL_GRID, "--points", "2",
             "--out", str(out_path), "--format", "csv"],
            capsys,
        )
        assert code == 0
        header = out_path.read_text().splitlines()[0]
        assert header.startswith("id,equation,max_residual")

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.ini"
        out_path = tmp_path / "report.json"
        cfg.write_text(
            "[example]\nname = flat-b0zero\nlambda = 1.0\nf = 0,1\n\n"
            "[grid]\nspec = r=-0.5:0.5:3,u=-0.5:0.5:3,v=-0.5:0.5:3\n\n"
            "[run]\nseed = 11\npoints = 2\n\n"
            f"[output]\npath = {out_path}\n"
        )
        code, _, _ = run(["verify", "--config", str(cfg)], capsys)
        assert code == 0
        report = json.loads(out_path.read_text())
        assert report["example"] == "flat-b0zero"
        assert report["config"]["f"] == [0.0, 1.0]
        assert report["config"]["seed"] == 11

    def test_env_default_tolerance(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("NPP3_DEFAULT_TOL", "1e-18")
        out_path = tmp_path / "report.json"
        code, _, _ = run(
            ["verify", "standard-flat", "--grid", SMALL_GRID, "--points", "2",
             "--out", str(out_path)],
            capsys,
        )
        assert code == 1  # impossible tolerance everywhere
        report = json.loads(out_path.read_text())
        assert all(c["tolerance"] == 1e-18 for c in report["checks"])


class TestCongruenceCommand:
    def test_rotation_scenario(self, tmp_path, capsys):
        out_csv = tmp_path / "traj.csv"
        summary = tmp_path / "summary.json"
        code, _, _ = run(
            ["congruence", "--rho", "0,1", "--sigma", "0,0", "--zeta0", "1,0",
             "--r-max", "5", "--step", "0.001", "--out", str(out_csv),
             "--summary", str(summary)],
            capsys,
        )
        assert code == 0
        data = json.loads(summary.read_text())
        assert data["modulus_drift"] < 1e-9
        assert data["closed_form_max_error"] < 1e-8
        assert out_csv.read_text().splitlines()[0] == "r,re_zeta,im_zeta"

    def test_ellipse_scenario(self, capsys):
        code, out, _ = run(
            ["congruence", "--rho", "0,0", "--sigma", "0.2,0", "--zeta0", "1,0",
             "--r-max", "1", "--step", "0.001", "--ellipse"],
            capsys,
        )
        assert code == 0
        data = json.loads(out)
        assert data["ellipse"]["semi_major"] == pytest.approx(np.exp(0.2), abs=1e-4)
        assert data["ellipse"]["inclination"] == pytest.approx(np.pi / 2, abs=1e-3)

    def test_example_bundle_default_point_respects_domain(self, tmp_path, capsys):
        # the chart midpoint of this instance sits on the excluded zero locus;
        # the driver falls back to an admissible sample
        summary = tmp_path / "summary.json"
        code, _, _ = run(
            ["congruence", "--example", "flat-b0nonzero", "--lambda", "1",
             "--D", "1", "--E", "0", "--summary", str(summary)],
            capsys,
        )
        assert code == 0
        data = json.loads(summary.read_text())
        assert data["max_difference"] < 1e-3

    def test_example_bundle(self, tmp_path, capsys):
        summary = tmp_path / "summary.json"
        code, _, _ = run(
            ["congruence", "--example", "standard-flat", "--lambda", "1",
             "--point", "0.1,0.2,0.3", "--r-max", "0.3", "--summary", str(summary)],
            capsys,
        )
        assert code == 0
        data = json.loads(summary.read_text())
        assert data["max_difference"] < 1e-3
        assert data["empirical"]["twist"] == pytest.approx(1.0, abs=1e-3)


class TestDiscrepancies:
    def test_measures_all_examples(self, tmp_path, capsys):
        out_path = tmp_path / "disc.json"
        code, _, _ = run(["discrepancies", "--out", str(out_path)], capsys)
        assert code == 0
        report = json.loads(out_path.read_text())
        assert report["sign_flips_required"] == []
        names = {m["example"] for m in report["measurements"]}
        assert names == {
            "standard-flat", "round-sphere", "flat-b0zero", "flat-b0nonzero", "elliptic",
        }
        sphere = next(m for m in report["measurements"] if m["example"] == "round-sphere")
        assert sphere["webster_measured"] == pytest.approx(sphere["webster_reading_sixth"], abs=1e-3)
        assert abs(sphere["webster_measured"] - sphere["webster_reading_third"]) > 0.5
        flat = next(m for m in report["measurements"] if m["example"] == "standard-flat")
        # on flat examples the two readings coincide at W = lambda
        assert flat["webster_reading_third"] == pytest.approx(flat["webster_reading_sixth"], abs=1e-6)
        assert flat["webster_measured"] == pytest.approx(1.0, abs=1e-3)


class TestListExamples:
    def test_lists_all(self, capsys):
        code, out, _ = run(["list-examples"], capsys)
        assert code == 0
        for name in ("standard-flat", "round-sphere", "flat-b0zero", "flat-b0nonzero", "elliptic"):
            assert name in out
