import json

import pytest

from minkdeficit import cli


class TestConfigParsing:
    def test_defaults(self):
        cfg = cli.parse_config(["verify-basis"])
        assert cfg.command == "verify-basis"
        assert (cfg.k_lo, cfg.k_hi) == (7, 11)
        assert cfg.alphas == (0.25, 0.5, 0.75)
        assert cfg.fmt == "csv"
        assert cfg.seed == 0
        assert cfg.budgets["triples"] == 4_000_000

    def test_command_flag_form(self):
        cfg = cli.parse_config(["--command", "sweep", "--k", "8..9", "--alpha", "0.5"])
        assert cfg.command == "sweep"
        assert (cfg.k_lo, cfg.k_hi) == (8, 9)
        assert cfg.alphas == (0.5,)

    def test_single_k(self):
        cfg = cli.parse_config(["sweep", "--k", "7"])
        assert (cfg.k_lo, cfg.k_hi) == (7, 7)

    def test_dotted_tolerance_and_budget_flags(self):
        cfg = cli.parse_config([
            "verify-wigner", "--tol.wigner.gaunt-pointwise", "1e-10",
            "--tol.basis=1e-9", "--budget.paths", "500", "--budget.triples=99",
        ])
        assert cfg.tolerances == {"wigner.gaunt-pointwise": 1e-10, "basis": 1e-9}
        assert cfg.budgets["paths"] == 500
        assert cfg.budgets["triples"] == 99

    def test_config_file_with_flag_override(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({
            "command": "sweep", "k": "7..8", "alpha": [0.5],
            "seed": 11, "tol": {"report.w12-slope": 0.2},
        }))
        cfg = cli.parse_config(["--config", str(path), "--seed", "5"])
        assert cfg.command == "sweep"
        assert (cfg.k_lo, cfg.k_hi) == (7, 8)
        assert cfg.seed == 5  # flag wins
        assert cfg.tolerances["report.w12-slope"] == 0.2

    @pytest.mark.parametrize("argv", [
        ["bogus-command"],
        ["sweep", "--k", "5..9"],
        ["sweep", "--k", "7..99"],
        ["sweep", "--alpha", "1.5"],
        ["sweep", "--threads", "0"],
        ["report"],  # missing --in
        ["verify-basis", "--tol.basis", "-1"],
        ["verify-basis", "--budget.bogus", "3"],
    ])
    def test_config_errors(self, argv):
        with pytest.raises((cli.ConfigError, SystemExit)):
            cli.parse_config(argv)

    def test_main_exit_code_two_on_config_error(self, capsys):
        assert cli.main(["sweep", "--k", "1..2"]) == 2
        assert "config error" in capsys.readouterr().err


class TestRun:
    def test_verify_basis_writes_records(self, tmp_path, capsys):
        code = cli.main(["verify-basis", "--out-dir", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "gated checks passed" in out
        text = (tmp_path / "verify_basis.csv").read_text()
        assert text.startswith("suite,check_id,status,measured,expected,tolerance")
        assert "orthogonality-matrix,pass" in text

    def test_byte_identical_reruns(self, tmp_path):
        for d in ("a", "b"):
            assert cli.main(["verify-basis", "--seed", "3",
                             "--out-dir", str(tmp_path / d)]) == 0
        a = (tmp_path / "a" / "verify_basis.csv").read_bytes()
        b = (tmp_path / "b" / "verify_basis.csv").read_bytes()
        assert a == b

    def test_sweep_single_row_and_report(self, tmp_path, capsys):
        code = cli.main(["sweep", "--k", "7", "--alpha", "0.5",
                         "--out-dir", str(tmp_path)])
        assert code == 0
        sweep_csv = tmp_path / "sweep.csv"
        assert sweep_csv.exists()
        assert (tmp_path / "sweep_checks.csv").exists()
        capsys.readouterr()

        code = cli.main(["report", "--in", str(sweep_csv), "--out-dir", str(tmp_path)])
        assert code == 0  # fits are skipped (info) with fewer than 3 k values
        out = capsys.readouterr().out
        assert "traceability-" in out
        assert (tmp_path / "report.csv").exists()

    def test_budget_exhaustion_is_a_check_failure(self, tmp_path, capsys):
        code = cli.main(["sweep", "--k", "7", "--alpha", "0.5",
                         "--budget.triples", "10", "--out-dir", str(tmp_path)])
        assert code == 1
        out = capsys.readouterr().out
        assert "row-budget-k7-alpha0.5: FAIL" in out

    def test_threaded_sweep_is_deterministic(self, tmp_path):
        for d, threads in (("t1", "1"), ("t2", "3")):
            assert cli.main(["sweep", "--k", "7..8", "--alpha", "0.5",
                             "--threads", threads,
                             "--out-dir", str(tmp_path / d)]) == 0
        a = (tmp_path / "t1" / "sweep.csv").read_bytes()
        b = (tmp_path / "t2" / "sweep.csv").read_bytes()
        assert a == b

    def test_json_format(self, tmp_path):
        code = cli.main(["verify-geometry", "--format", "json",
                         "--out-dir", str(tmp_path)])
        assert code == 0
        data = json.loads((tmp_path / "verify_geometry.json").read_text())
        assert any(rec["check_id"] == "schur-identity-residual" for rec in data)
        assert all("runtime" in rec for rec in data)

    def test_gated_failure_exit_code(self, tmp_path):
        # an impossibly tight blanket tolerance forces a gated failure
        code = cli.main(["verify-geometry", "--tol.geometry", "1e-300",
                         "--out-dir", str(tmp_path)])
        assert code == 1
