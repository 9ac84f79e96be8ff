"""CLI module - assembles the typer app with all commands."""

from typing import Annotated

import typer

from shift_spectra.cli.check import check
from shift_spectra.cli.decompose import decompose, iterate
from shift_spectra.cli.helpers import version_callback
from shift_spectra.cli.resolvent import resolvent
from shift_spectra.cli.simulate import simulate
from shift_spectra.cli.spectrum import eigenfunctions, spectrum
from shift_spectra.cli.twosided import twosided_app

app = typer.Typer(
    name="shift-spectra",
    help="Exact generalized spectra of Perron-Frobenius operators on shift spaces.",
    no_args_is_help=True,
)

# Register commands
app.command()(spectrum)
app.command()(eigenfunctions)
app.command()(decompose)
app.command()(resolvent)
app.command()(iterate)
app.add_typer(twosided_app, name="twosided")
app.command()(simulate)
app.command()(check)


@app.callback()
def main(
    version: Annotated[
        bool,
        typer.Option(
            "--version",
            "-v",
            callback=version_callback,
            is_eager=True,
            help="Show version and exit.",
        ),
    ] = False,
) -> None:
    """Exact generalized spectra of Perron-Frobenius operators on shift spaces."""
    _ = version  # Unused, handled by callback
