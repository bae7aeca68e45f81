"""
Tests for the command line: exit codes, config files and reports.
"""

import pytest

from app.cli.exception_handlers import (
    EXIT_DECODE,
    EXIT_ERROR,
    EXIT_FIELD_EXHAUSTED,
    EXIT_OK,
    EXIT_REJECTED,
    exit_code_for_records,
    handle_exception,
)
from app.main import main
from app.models.schemas import RunRecord, ScenarioSpec
from app.utils.exceptions import DecodeFailure, NonIntegralT, PrecoderNotFound


class TestRun:
    """cachesim run."""

    def test_success(self, capsys):
        """A decodable scenario exits 0 and prints the CSV and summary."""
        code = main(["run", "--scheme", "linear", "--K", "3", "--L", "2", "--N", "3", "--M", "1"])
        assert code == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out[0].startswith("scheme,K,L,N,M_num")
        assert out[1].startswith("linear,3,2,3,1,1,")
        assert out[1].endswith(",true,0")
        assert out[2].startswith("1 runs, 1 ok")

    def test_off_corner_rejected(self, capsys):
        """M away from a corner is rejected with exit 3."""
        code = main(["run", "--scheme", "single", "--K", "4", "--N", "4", "--M", "1/3"])
        assert code == EXIT_REJECTED
        assert ",false," in capsys.readouterr().out

    def test_missing_parameters(self):
        """scheme, K and N are required."""
        assert main(["run", "--scheme", "single"]) == EXIT_REJECTED

    def test_unknown_scheme(self):
        """Schema errors exit 3."""
        assert main(["run", "--scheme", "bogus", "--K", "3", "--N", "3", "--M", "1"]) == EXIT_REJECTED

    def test_bad_flag(self):
        """argparse usage errors exit 3."""
        assert main(["run", "--K", "three"]) == EXIT_REJECTED

    def test_no_subcommand(self):
        """A subcommand is required."""
        assert main([]) == EXIT_REJECTED

    def test_out_file(self, tmp_path, capsys):
        """--out writes the CSV to a file."""
        path = tmp_path / "run.csv"
        code = main(["run", "--scheme", "dedicated", "--K", "4", "--L", "2", "--N", "4", "--M", "2",
                     "--out", str(path)])
        assert code == EXIT_OK
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[1].startswith("dedicated,4,2,4,2,1,")
        assert "scheme," not in capsys.readouterr().out


class TestConfigFile:
    """--config key=value files."""

    def test_values_from_file(self, tmp_path, capsys):
        """Every parameter can come from the file."""
        config = tmp_path / "scenario.env"
        config.write_text("scheme=flexible\nK=4\nL=2\nN=4\nprofile=2,2\n")
        assert main(["run", "--config", str(config)]) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[1].startswith("flexible,4,2,4,1,1,")

    def test_flags_override_file(self, tmp_path, capsys):
        """A flag wins over the same key in the file."""
        config = tmp_path / "scenario.env"
        config.write_text("scheme=single\nK=4\nN=4\nM=1/3\n")
        assert main(["run", "--config", str(config), "--M", "1"]) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[1].startswith("single,4,1,4,1,1,")

    def test_unknown_key(self, tmp_path):
        """Keys that are not flags are rejected."""
        config = tmp_path / "scenario.env"
        config.write_text("scheme=single\nK=4\nN=4\nusers=4\n")
        assert main(["run", "--config", str(config)]) == EXIT_REJECTED

    def test_missing_file(self, tmp_path):
        """A config path that does not exist is rejected."""
        assert main(["run", "--config", str(tmp_path / "nope.env")]) == EXIT_REJECTED


class TestSweep:
    """cachesim sweep."""

    def test_servers(self, capsys):
        """One row per corner and server count."""
        code = main(["sweep", "--scheme", "linear", "--K", "3", "--N", "3", "--servers", "1,2"])
        assert code == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert len(out) == 1 + 8 + 1
        assert out[-1].startswith("8 runs, 8 ok")

    def test_rejected_points(self):
        """A sweep with no runnable point exits 3."""
        assert main(["sweep", "--scheme", "flexible", "--K", "3", "--L", "2", "--N", "3"]) == EXIT_REJECTED


class TestVerifyExamples:
    """cachesim verify-paper."""

    def test_all_examples(self, capsys):
        """Every worked example passes."""
        assert main(["verify-paper", "--seed", "3"]) == EXIT_OK
        assert "14/14 cases passed" in capsys.readouterr().out


class TestExitCodes:
    """Exception and record mapping."""

    @pytest.mark.parametrize("exc,code", [
        (NonIntegralT("KM/N is not an integer"), EXIT_REJECTED),
        (PrecoderNotFound("no precoder"), EXIT_FIELD_EXHAUSTED),
        (DecodeFailure("bad decode"), EXIT_DECODE),
        (RuntimeError("boom"), EXIT_ERROR),
    ])
    def test_exceptions(self, exc, code):
        """Each failure class has its own exit code."""
        assert handle_exception(exc) == code

    def test_first_failure_wins(self):
        """The first failed record in report order sets the exit code."""
        spec = ScenarioSpec(scheme="single", K=2, N=2, M=1)
        records = [
            RunRecord(spec=spec, decode_ok=True),
            RunRecord(spec=spec, failure_kind="field_exhausted"),
            RunRecord(spec=spec, failure_kind="decode"),
        ]
        assert exit_code_for_records(records) == EXIT_FIELD_EXHAUSTED
        assert exit_code_for_records(records[:1]) == EXIT_OK
