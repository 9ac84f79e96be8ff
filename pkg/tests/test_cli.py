"""Tests for the CLI module."""

import pytest
from typer.testing import CliRunner

from shift_spectra.cli import app

runner = CliRunner()


def test_version_flag() -> None:
    """Test that --version shows the version."""
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert result.stdout.startswith("shift-spectra ")
    assert "." in result.stdout


def test_help_flag() -> None:
    """Test that --help shows help text."""
    result = runner.invoke(app, ["--help"])
    assert result.exit_code == 0
    assert "Exact generalized" in result.stdout


def test_no_args_shows_help() -> None:
    """Test that running without arguments lists the commands."""
    result = runner.invoke(app, [])
    assert "spectrum" in result.stdout
    assert "twosided" in result.stdout


@pytest.mark.parametrize(
    ("command", "expected"),
    [
        (["spectrum"], "--system"),
        (["eigenfunctions"], "--n"),
        (["decompose"], "--f"),
        (["iterate"], "--k"),
        (["resolvent"], "--grid"),
        (["simulate"], "--samples"),
        (["check"], "--quick"),
        (["twosided", "jordan"], "--eps"),
        (["twosided", "ak-poles"], "--k"),
        (["twosided", "operator"], "--M"),
        (["twosided", "coefficient"], "--g"),
    ],
)
def test_command_help(command: list[str], expected: str) -> None:
    """Test that every command documents its main option."""
    result = runner.invoke(app, [*command, "--help"])
    assert result.exit_code == 0
    assert expected in result.stdout


def test_twosided_lists_subcommands() -> None:
    """Test the twosided group help."""
    result = runner.invoke(app, ["twosided", "--help"])
    assert result.exit_code == 0
    for name in ("jordan", "ak-poles", "operator", "coefficient"):
        assert name in result.stdout


def test_negative_degree_rejected() -> None:
    """Test that typer rejects n < 0 before any work is done."""
    result = runner.invoke(app, ["spectrum", "--n=-1"])
    assert result.exit_code == 2
