"""
CLI execution tests.
Runs the module entry point in a subprocess.
"""

import json
import subprocess
import sys

from sievegaps import __version__


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "sievegaps.cli", *args],
        capture_output=True,
        text=True,
    )


class TestCLIEntryPoint:
    """Test the module entry point end to end."""

    def test_version(self):
        """Test --version."""
        result = run_cli("--version")
        assert result.returncode == 0
        assert __version__ in result.stdout

    def test_matrix(self):
        """Test the matrix report on stdout."""
        result = run_cli("--quiet", "matrix", "--k", "6", "--L", "1")
        assert result.returncode == 0
        report = json.loads(result.stdout)
        assert report["determinant"] == "15*theta**2 - 64*theta + 48"

    def test_tuples_check(self):
        """Test admissibility of a 7-tuple."""
        result = run_cli("tuples", "check", "11,13,17,19,23,29,31")
        assert result.returncode == 0
        assert json.loads(result.stdout)["admissible"] is True

    def test_logs_on_stderr(self):
        """Test that log lines stay off stdout."""
        result = run_cli("--verbose", "e2", "gaps", "--limit", "1000")
        assert result.returncode == 0
        assert "[INFO]" in result.stderr or "[DEBUG]" in result.stderr
        json.loads(result.stdout)

    def test_usage_error(self):
        """Test that a missing required flag exits with 1."""
        result = run_cli("matrix", "--k", "6")
        assert result.returncode == 1
        assert "[ERROR]" in result.stderr
