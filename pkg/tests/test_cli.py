import json
import math

import pytest

from beccert.cli import main, selfcheck_report
from beccert.zero_bias import two_point


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSelfcheck:
    def test_passes(self, capsys):
        code, out, _ = run_cli(capsys, "selfcheck")
        assert code == 0
        report = json.loads(out)
        assert report["ok"]
        assert abs(report["a"] - 0.099162) < 1e-6
        assert abs(report["l"] - 0.624489) < 1e-6
        assert report["dawson_1_residual"] < 1e-12

    def test_report_fields(self):
        report = selfcheck_report()
        for key in ("b_seam_M_residual", "dhat2_seam_residual",
                    "dhat1_quad_residual", "dhat2_quad_residual",
                    "dhat2_tail_alt_coeff_gap"):
            assert key in report


class TestBoundEval:
    def test_general_extremal(self, capsys):
        code, out, _ = run_cli(
            capsys, "bound", "eval", "--mode", "general", "--eps", "0.5092",
            "--u0", "2.4852", "--u", "5.9508")
        assert code == 0
        data = json.loads(out)
        assert abs(data["dstar"] - 0.56054) < 2e-5
        assert len(data["integrals"]) == 4

    def test_iid_extremal(self, capsys):
        code, out, _ = run_cli(
            capsys, "bound", "eval", "--mode", "iid-finite", "--eps", "0.3536",
            "--n", "8", "--u0", "2.6157", "--u", "8.9115")
        assert code == 0
        assert abs(json.loads(out)["dstar"] - 0.47849) < 3e-5

    def test_u0_above_u_is_usage_error(self, capsys):
        code, _, err = run_cli(
            capsys, "bound", "eval", "--mode", "general", "--eps", "0.5",
            "--u0", "6.0", "--u", "2.0")
        assert code == 2
        assert "U0" in err

    def test_missing_n_is_usage_error(self, capsys):
        code, _, _ = run_cli(
            capsys, "bound", "eval", "--mode", "iid-finite", "--eps", "0.5",
            "--u0", "2.0", "--u", "6.0")
        assert code == 2

    def test_unknown_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(capsys, "frobnicate")
        assert exc.value.code == 2


class TestBoundOptimize:
    def test_general(self, capsys):
        code, out, _ = run_cli(
            capsys, "bound", "optimize", "--mode", "general", "--eps",
            "0.5092", "--seed-u0", "2.5", "--seed-u", "6.0")
        assert code == 0
        data = json.loads(out)
        assert data["dstar"] + data["margin"] <= 0.5606


class TestZerobias:
    def test_rademacher_inline_json(self, capsys):
        code, out, _ = run_cli(
            capsys, "zerobias", "kappa1", "--dist",
            '{"atoms":[-1,1],"probs":[0.5,0.5]}')
        assert code == 0
        data = json.loads(out)
        assert data["beta3"] == 1.0
        assert data["kappa1"] == 0.5
        assert data["gap"] == 0.0

    def test_gap_alias_and_two_point(self, capsys):
        d = two_point(0.9)
        code, out, _ = run_cli(capsys, "zerobias", "gap", "--dist", d.to_json())
        assert code == 0
        data = json.loads(out)
        assert abs(data["gap"]) < 1e-12

    def test_from_file(self, capsys, tmp_path):
        path = tmp_path / "dist.json"
        path.write_text('{"atoms":[0.0, 1.0],"probs":[0.9, 0.1]}')
        code, out, _ = run_cli(capsys, "zerobias", "kappa1", "--dist", str(path))
        assert code == 0
        data = json.loads(out)
        assert not data["standardized_input"]
        assert abs(data["gap"]) < 1e-12  # two-point laws are extremal

    def test_threepoint_scan_default_passes(self, capsys, tmp_path):
        out_path = tmp_path / "scan.csv"
        code, _, err = run_cli(capsys, "zerobias", "threepoint-scan",
                               "--na", "8", "--nb", "6", "--nc", "6",
                               "--out", str(out_path))
        assert code == 0
        lines = out_path.read_text().strip().splitlines()
        assert lines[0] == "a,b,c,case,g"
        assert len(lines) > 200
        for line in lines[1:]:
            g = float(line.rsplit(",", 1)[1])
            assert g <= 1e-10
        assert "max_g=" in err


class TestCertifyCli:
    def test_narrow_window_roundtrip(self, capsys, tmp_path):
        out_path = tmp_path / "cert.json"
        csv_path = tmp_path / "cert.csv"
        code, out, err = run_cli(
            capsys, "certify", "general", "--eps-lo", "1.65",
            "--eps-hi", "1.7838", "--out", str(out_path),
            "--csv", str(csv_path), "--quiet")
        # a window certificate cannot be stitched (small-eps regime fails
        # at eps_lo = 1.65), so the CLI reports certification failure
        assert code == 1
        assert "certification failed" in err

    def test_lowered_target_fails(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "certify", "iid", "--target", "0.40",
            "--eps-lo", "0.40", "--eps-hi", "0.46",
            "--out", str(tmp_path / "c.json"), "--quiet")
        assert code == 1
        assert "certification failed" in err

    def test_bad_parallelism_is_usage_error(self, capsys, tmp_path):
        code, _, _ = run_cli(
            capsys, "certify", "general", "--parallel", "0",
            "--out", str(tmp_path / "c.json"), "--quiet")
        assert code == 2

    def test_out_of_range_quad_tol_is_usage_error(self, capsys):
        code, _, err = run_cli(
            capsys, "bound", "eval", "--mode", "general", "--eps", "0.5",
            "--u0", "2.0", "--u", "6.0", "--quad-tol", "1e-3")
        assert code == 2
        assert "quad_tol" in err


class TestEnvOverride:
    def test_quad_tol_env(self, monkeypatch):
        from beccert.certify import default_quad_tol
        monkeypatch.setenv("BECCERT_QUAD_TOL", "5e-11")
        assert default_quad_tol() == 5e-11
        monkeypatch.delenv("BECCERT_QUAD_TOL")
        assert default_quad_tol() == 1e-10
