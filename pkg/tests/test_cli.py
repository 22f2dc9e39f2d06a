"""CLI smoke tests for pdflap.

They use Click's CliRunner for isolated invocations on the small fixture
inputs from conftest.
"""

from __future__ import annotations

import math
from pathlib import Path

import pytest
from click.testing import CliRunner

from pdflap.cli import main
from pdflap.errors import (
    EXIT_RUNTIME_ERROR,
    EXIT_SUCCESS,
    EXIT_USAGE,
    EXIT_VERIFICATION_FAILED,
)

ROOT2 = math.sqrt(2.0)


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


# ---------------------------------------------------------------------------
# Version / help
# ---------------------------------------------------------------------------

class TestCLIBasics:
    def test_version(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["--version"])
        assert result.exit_code == 0
        assert "pdflap-cli" in result.output

    def test_help(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        assert "run" in result.output
        assert "inspect" in result.output
        assert "info" in result.output

    def test_short_help_alias(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["-h"])
        assert result.exit_code == 0
        assert "run" in result.output

    def test_run_help(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["run", "-h"])
        assert result.exit_code == 0
        assert "--pairs" in result.output
        assert "--verify" in result.output
        assert "--reduction" in result.output

    def test_info(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["info"])
        assert result.exit_code == EXIT_SUCCESS
        assert "pdflap-cli" in result.output
        assert "Max matrix size" in result.output


# ---------------------------------------------------------------------------
# Input validation
# ---------------------------------------------------------------------------

class TestInputValidation:
    def test_missing_input_option(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["run"])
        assert result.exit_code == EXIT_USAGE

    def test_negative_max_dim(self, runner: CliRunner, g3_file: Path) -> None:
        result = runner.invoke(main, ["run", "-i", str(g3_file), "-k", "-1"])
        assert result.exit_code == EXIT_USAGE

    def test_zero_workers(self, runner: CliRunner, g3_file: Path) -> None:
        result = runner.invoke(main, ["run", "-i", str(g3_file), "-w", "0"])
        assert result.exit_code == EXIT_USAGE

    def test_unknown_format(self, runner: CliRunner, g3_file: Path) -> None:
        result = runner.invoke(main, ["run", "-i", str(g3_file), "-f", "pdb"])
        assert result.exit_code == EXIT_USAGE

    def test_reversed_pair(self, runner: CliRunner, g3_file: Path) -> None:
        result = runner.invoke(main, ["run", "-i", str(g3_file), "-p", "2:1", "-q"])
        assert result.exit_code == EXIT_USAGE
        assert "a <= b" in result.output

    def test_non_positive_zero_tol(self, runner: CliRunner, g3_file: Path) -> None:
        result = runner.invoke(main, ["run", "-i", str(g3_file), "--zero-tol", "0", "-q"])
        assert result.exit_code == EXIT_USAGE

    def test_missing_file(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(main, ["run", "-i", str(tmp_path / "nope.flag"), "-q"])
        assert result.exit_code == EXIT_USAGE
        assert "Cannot read input" in result.output

    def test_parse_error_reports_line(self, runner: CliRunner, flag_file) -> None:
        path = flag_file("dim 0:\n0 0\ndim 1:\n0 0\n", "loop.flag")
        result = runner.invoke(main, ["run", "-i", str(path), "-q"])
        assert result.exit_code == EXIT_USAGE
        assert "line 4" in result.output


# ---------------------------------------------------------------------------
# Exit codes of computation failures
# ---------------------------------------------------------------------------

class TestExitCodes:
    def test_capacity(
        self, runner: CliRunner, g3_file: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.setattr("pdflap.laplacian.MAX_MATRIX_SIZE", 2)
        result = runner.invoke(main, ["run", "-i", str(g3_file), "-q"])
        assert result.exit_code == EXIT_RUNTIME_ERROR
        assert "PDFLAP_MAX_MATRIX_SIZE" in result.output

    def test_verification_failure(
        self, runner: CliRunner, g3_file: Path, tmp_path: Path,
        monkeypatch: pytest.MonkeyPatch,
    ) -> None:
        monkeypatch.setattr("pdflap.service.oracle_persistent_betti", lambda *args: 7)
        out = tmp_path / "report.json"
        result = runner.invoke(
            main, ["run", "-i", str(g3_file), "--verify", "--out-json", str(out), "-q"]
        )
        assert result.exit_code == EXIT_VERIFICATION_FAILED
        assert "Verification failed" in result.output
        assert "exact 7" in result.output
        # The report is still written.
        assert out.exists()

    def test_verify_success(self, runner: CliRunner, g3_file: Path) -> None:
        result = runner.invoke(main, ["run", "-i", str(g3_file), "--verify"])
        assert result.exit_code == EXIT_SUCCESS
        assert "match the exact oracle" in result.output


# ---------------------------------------------------------------------------
# CSV on stdout
# ---------------------------------------------------------------------------

class TestCSVOutput:
    def test_g3_at_infinity(self, runner: CliRunner, g3_file: Path) -> None:
        result = runner.invoke(main, ["run", "-i", str(g3_file), "-p", "inf:inf", "-q"])
        assert result.exit_code == EXIT_SUCCESS
        lines = result.output.strip().split("\n")
        assert lines[0] == "dim,a,b,betti,lambda_min_nonzero,n_eigenvalues"
        fields = lines[2].split(",")
        assert fields[:4] == ["1", "inf", "inf", "2"]
        assert float(fields[4]) == pytest.approx(3 - ROOT2, abs=1e-9)
        assert fields[5] == "7"
        assert len(lines) == 4

    def test_file_output_keeps_stdout_clean(
        self, runner: CliRunner, g3_file: Path, tmp_path: Path
    ) -> None:
        out = tmp_path / "g3.csv"
        result = runner.invoke(main, ["run", "-i", str(g3_file), "--out-csv", str(out), "-q"])
        assert result.exit_code == EXIT_SUCCESS
        assert result.output.strip() == ""
        assert out.read_text(encoding="utf-8").startswith("dim,a,b,")
