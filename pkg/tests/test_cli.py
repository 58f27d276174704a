"""Tests for the command-line front end, the orchestrator and the report files."""

import json
from pathlib import Path

import pandas as pd
import pytest

from cli.main import EXIT_CONFIG, EXIT_PASSED, VerificationOrchestrator, main, run
from core.config import Settings
from schemas.reports import CheckReport
from schemas.run_config import RunConfig


class TestSettings:
    """Test environment-driven settings."""

    def test_env_prefix(self, monkeypatch):
        """Test that HWC_ variables override the defaults."""
        monkeypatch.setenv("HWC_BASIS_CUTOFF", "12")
        monkeypatch.setenv("HWC_LOG_FORMAT", "console")
        settings = Settings()
        assert settings.basis_cutoff == 12
        assert settings.log_format == "console"

    def test_cutoff_bound(self, monkeypatch):
        """Test that a cutoff below 4 is refused."""
        monkeypatch.setenv("HWC_BASIS_CUTOFF", "2")
        with pytest.raises(ValueError):
            Settings()


class TestRunConfig:
    """Test configuration validation."""

    def test_defaults(self):
        """Test that a bare subcommand validates."""
        config = RunConfig(subcommand="coeffs")
        assert config.k >= 1
        assert config.sigma_point == 1j

    def test_landau_needs_experiment(self):
        """Test that a landau run without an experiment is refused."""
        with pytest.raises(ValueError):
            RunConfig(subcommand="landau")

    def test_lower_half_plane(self):
        """Test that sigma must have positive imaginary part."""
        with pytest.raises(ValueError):
            RunConfig(subcommand="landau", experiment="spectrum", sigma=[0.0, -1.0])

    def test_diagonal_values_are_parsed(self):
        """Test that explicit diagonal entries must be Gaussian rationals."""
        with pytest.raises(ValueError):
            RunConfig(subcommand="coeffs", max_order=1, diagonal_values=["half"])

    def test_s_grid_is_sorted(self):
        """Test that the s grid is stored in increasing order."""
        config = RunConfig(subcommand="landau", experiment="decay", s_grid=[64.0, 16.0, 32.0])
        assert config.s_grid == [16.0, 32.0, 64.0]


class TestCoeffsOutput:
    """Test the coefficient table written by the coeffs subcommand."""

    def test_row_three(self, output_dir):
        """Test C^3 at k = 1 in table.csv."""
        report = run(RunConfig(subcommand="coeffs", k=1, max_order=3, output_dir=output_dir))
        assert report.status == "passed"

        table = pd.read_csv(Path(output_dir) / "table.csv", dtype=str)
        row = table[table.l == "3"].sort_values("r")
        assert list(row["re"]) == ["1/1", "0/1", "-1/3", "0/1"]
        assert set(row["im"]) == {"0/1"}

    def test_report_embeds_config(self, output_dir):
        """Test that report.json carries the config and one entry per contract."""
        run(RunConfig(subcommand="coeffs", k=2, max_order=4, output_dir=output_dir))
        report = CheckReport.model_validate_json((Path(output_dir) / "report.json").read_text())
        assert report.config.k == 2
        assert {r.name for r in report.results} >= {
            "coefficient_equations_plus",
            "coefficient_equations_minus",
            "phi_apply_agreement",
            "closed_form_agreement",
        }
        assert (Path(output_dir) / "series.csv").exists()

    def test_explicit_diagonal(self, output_dir):
        """Test a table with explicit free diagonal entries."""
        config = RunConfig(subcommand="coeffs", max_order=2, diagonal_values=["1/2", "0+1/1*i"],
                           output_dir=output_dir)
        report = run(config)
        assert report.status == "passed"
        assert "rescale_agreement" in {r.name for r in report.results}

    def test_deterministic(self, tmp_path):
        """Test that two runs with the same config write identical files."""
        first, second = tmp_path / "a", tmp_path / "b"
        run(RunConfig(subcommand="coeffs", max_order=5, diagonal="random", output_dir=str(first)))
        run(RunConfig(subcommand="coeffs", max_order=5, diagonal="random", output_dir=str(second)))
        assert (first / "table.csv").read_text() == (second / "table.csv").read_text()


class TestExitCodes:
    """Test the exit status of main."""

    def test_passing_run(self, output_dir):
        """Test exit status 0 for a passing check."""
        assert main(["verify-recursion", "--max-order", "2", "--random-tables", "1",
                     "--samples", "5", "--output-dir", output_dir]) == EXIT_PASSED

    def test_invalid_flag_value(self, output_dir):
        """Test exit status 2 for k = 0."""
        assert main(["coeffs", "--k", "0", "--output-dir", output_dir]) == EXIT_CONFIG

    def test_missing_experiment(self, output_dir):
        """Test exit status 2 for a landau run without an experiment."""
        assert main(["landau", "--output-dir", output_dir]) == EXIT_CONFIG

    def test_config_file_overrides_flags(self, tmp_path):
        """Test that config file values win over flags."""
        config_path = tmp_path / "config.json"
        output_dir = tmp_path / "out"
        config_path.write_text(json.dumps({"k": 2, "max_order": 2, "output_dir": str(output_dir)}))
        assert main(["coeffs", "--k", "3", "--config", str(config_path)]) == EXIT_PASSED
        report = json.loads((output_dir / "report.json").read_text())
        assert report["config"]["k"] == 2

    def test_unreadable_config_file(self, tmp_path):
        """Test exit status 2 for a config file that is not JSON."""
        config_path = tmp_path / "config.json"
        config_path.write_text("k = 2")
        assert main(["coeffs", "--config", str(config_path)]) == EXIT_CONFIG


class TestOrchestrator:
    """Test check dispatch."""

    def test_exception_becomes_failed_result(self, output_dir):
        """Test that a check raising is reported as a failure, not propagated."""
        report = run(RunConfig(subcommand="coeffs", max_order=0, output_dir=output_dir))
        assert report.status == "failed"
        assert report.results[0].details["error_type"] == "ConfigError"

    def test_run_all(self, output_dir):
        """Test sequential runs keep their order."""
        orchestrator = VerificationOrchestrator()
        configs = [
            RunConfig(subcommand="verify-forms", max_order=2, samples=1, output_dir=output_dir),
            RunConfig(subcommand="coeffs", max_order=2, output_dir=output_dir),
        ]
        results = orchestrator.run_all(configs)
        assert [r["check"] for r in results] == ["verify-forms", "coeffs"]
        assert all(r["status"] == "completed" for r in results)

    @pytest.mark.asyncio
    async def test_run_all_async(self, output_dir, test_settings):
        """Test that threaded runs return results in input order."""
        orchestrator = VerificationOrchestrator()
        configs = [
            RunConfig(subcommand="coeffs", k=k, max_order=3, output_dir=output_dir)
            for k in (1, 2, 3)
        ]
        results = await orchestrator.run_all_async(configs, max_workers=test_settings.max_workers)
        assert [r["status"] for r in results] == ["completed"] * 3
        assert [len(r["outcome"].table_rows) for r in results] == [10, 10, 10]

    def test_algebra_orders(self, output_dir):
        """Test that delta powers and the adiff identity run to their own bounds."""
        report = run(RunConfig(subcommand="verify-algebra", k=3, max_order=12, adiff_order=4, samples=20,
                               output_dir=output_dir))
        results = {r.name: r for r in report.results}
        assert report.status == "passed"
        assert results["delta_power_commutator"].details["max_n"] == 12
        assert results["adiff"].details["max_l"] == 4

    def test_adiff_order_defaults_to_max_order(self, output_dir):
        """Test that without adiff_order the identity runs to max_order."""
        report = run(RunConfig(subcommand="verify-algebra", k=1, max_order=3, samples=5, output_dir=output_dir))
        assert next(r for r in report.results if r.name == "adiff").details["max_l"] == 3

    def test_symbols_use_every_sample(self, output_dir):
        """Test that the round trip covers all requested random operators."""
        report = run(RunConfig(subcommand="landau", experiment="symbols", k=1, samples=100, output_dir=output_dir))
        round_trip = next(r for r in report.results if r.name == "symbol_round_trip_failures")
        assert round_trip.details["samples"] == 100
        assert round_trip.residual == 0.0

    def test_unknown_experiment_is_a_config_error(self):
        """Test that experiment names outside the known set fail validation."""
        with pytest.raises(ValueError):
            RunConfig(subcommand="landau", experiment="holonomy")

    def test_landau_dispatch(self, output_dir):
        """Test a small numerical run end to end."""
        report = run(RunConfig(subcommand="landau", experiment="spectrum", k=1, N=12, output_dir=output_dir))
        assert report.status == "passed"
        assert (Path(output_dir) / "table.csv").exists()
