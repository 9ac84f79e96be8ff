"""Decompose and iterate commands - spectral expansion of observables."""

from typing import Annotated

import typer

from shift_spectra.cli.helpers import (
    DegreeOption,
    ObservableOption,
    OutputOption,
    QuietOption,
    SystemOption,
    emit_json,
    handle_errors,
    make_config,
    one_sided_system,
    parse_observable,
    status,
)
from shift_spectra.exactnum import format_scalar
from shift_spectra.serialize import DecompositionOut, IterationOut, terms_out
from shift_spectra.spectra import decompose as spectral_decompose
from shift_spectra.spectra import eigen_system, iterate_pf


def decompose(
    f: ObservableOption,
    system: SystemOption = "full2-uniform",
    n: DegreeOption = 8,
    output: OutputOption = None,
    quiet: QuietOption = False,
) -> None:
    """Expand an observable as Σ c_i Φ_i."""
    config = make_config(
        command="decompose", system=system, params={"n": n, "f": f}, output=output, quiet=quiet
    )
    with handle_errors():
        sys = one_sided_system(system)
        es = eigen_system(sys, n)
        observable = parse_observable(es, f)
        decomposition = spectral_decompose(es, observable)
        status(config, f"{len(decomposition.terms)} nonzero modes")
        emit_json(
            DecompositionOut(system=sys.name, f=" + ".join(f), terms=terms_out(decomposition)),
            config.output,
        )


def iterate(
    f: ObservableOption,
    k: Annotated[int, typer.Option("--k", "-k", min=0, help="Number of applications of V")] = 10,
    system: SystemOption = "full2-uniform",
    n: DegreeOption = 8,
    output: OutputOption = None,
    quiet: QuietOption = False,
) -> None:
    """Apply the Perron-Frobenius operator k times and report the decay."""
    config = make_config(
        command="iterate",
        system=system,
        params={"n": n, "f": f, "k": k},
        output=output,
        quiet=quiet,
    )
    with handle_errors():
        sys = one_sided_system(system)
        es = eigen_system(sys, n)
        report = iterate_pf(es, parse_observable(es, f), k)
        rate = "none" if report.rate is None else format_scalar(report.rate)
        status(config, f"Limit {format_scalar(report.limit)}, mixing rate {rate}")
        emit_json(IterationOut.of(sys.name, " + ".join(f), report), config.output)
