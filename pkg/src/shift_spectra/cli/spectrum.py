"""Spectrum and eigenfunctions commands - one-sided generalized eigenvalues."""

from rich.table import Table

from shift_spectra.cli.helpers import (
    DegreeOption,
    OutputOption,
    QuietOption,
    SystemOption,
    console,
    emit_json,
    handle_errors,
    make_config,
    one_sided_system,
    status,
)
from shift_spectra.exactnum import format_scalar
from shift_spectra.serialize import EigenfunctionsOut, SpectrumOut
from shift_spectra.spectra import eigen_system


def spectrum(
    system: SystemOption = "full2-uniform",
    n: DegreeOption = 4,
    output: OutputOption = None,
    quiet: QuietOption = False,
) -> None:
    """Print the generalized eigenvalues on polynomials of degree ≤ n."""
    config = make_config(
        command="spectrum", system=system, params={"n": n}, output=output, quiet=quiet
    )
    with handle_errors():
        sys = one_sided_system(system)
        status(config, f"System {sys.name}, degree ≤ {n}")
        es = eigen_system(sys, n)

        if not config.quiet:
            table = Table("label", "eigenvalue", "≈")
            for label, lam in zip(es.labels, es.eigenvalues, strict=True):
                table.add_row(label, format_scalar(lam), f"{float(lam):.6g}")
            console.print(table)

        emit_json(SpectrumOut.of(es, n), config.output)


def eigenfunctions(
    system: SystemOption = "full2-uniform",
    n: DegreeOption = 4,
    output: OutputOption = None,
    quiet: QuietOption = False,
) -> None:
    """Export eigenfunctions Φ and dual functionals Φ' with exact coefficients."""
    config = make_config(
        command="eigenfunctions", system=system, params={"n": n}, output=output, quiet=quiet
    )
    with handle_errors():
        sys = one_sided_system(system)
        es = eigen_system(sys, n)
        status(config, f"Computed {es.dim} eigenfunctions for {sys.name}")
        emit_json(EigenfunctionsOut.of(es, n), config.output)
