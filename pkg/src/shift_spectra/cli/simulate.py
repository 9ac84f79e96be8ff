"""Simulate command - orbit histograms against the exact invariant density."""

from dataclasses import asdict
from typing import Annotated

import typer

from shift_spectra.cli.helpers import (
    OutputFormat,
    OutputOption,
    QuietOption,
    emit_json,
    handle_errors,
    make_config,
    status,
    write_csv,
)
from shift_spectra.conjugacy import DEFAULT_BURN_IN, HistogramRow, IntervalMap, histogram_simulation
from shift_spectra.serialize import HistogramSummaryOut


def simulate(
    map_name: Annotated[
        str, typer.Option("--map", "-m", help="renyi, renyi:<β> or golden")
    ] = "golden",
    samples: Annotated[int, typer.Option("--samples", help="Number of orbits")] = 1_000_000,
    bins: Annotated[int, typer.Option("--bins", min=1, help="Histogram bins on [0, 1]")] = 20,
    seed: Annotated[int, typer.Option("--seed", help="Seed of the random starts")] = 0,
    burn_in: Annotated[
        int, typer.Option("--burn-in", min=0, help="Map applications before binning")
    ] = DEFAULT_BURN_IN,
    threads: Annotated[
        int, typer.Option("--threads", "-t", min=1, help="Independent streams run in parallel")
    ] = 1,
    output_format: Annotated[
        OutputFormat,
        typer.Option("--format", help="csv: per-bin table; json: summary"),
    ] = OutputFormat.CSV,
    output: OutputOption = None,
    quiet: QuietOption = False,
) -> None:
    """Histogram T^burn_in of uniform starts and compare with the invariant density."""
    config = make_config(
        command="simulate",
        params={"map": map_name, "samples": samples, "bins": bins, "burn_in": burn_in},
        output=output,
        format=output_format.value,
        seed=seed,
        threads=threads,
        quiet=quiet,
    )
    with handle_errors():
        interval_map = IntervalMap.parse(map_name)
        status(config, f"Simulating {samples} orbits of {interval_map.label} (seed {seed})")
        result = histogram_simulation(
            interval_map,
            samples=samples,
            bins=bins,
            seed=seed,
            burn_in=burn_in,
            threads=config.threads,
            progress=not config.quiet,
        )
        if result.max_rel_error > result.tolerance:
            status(
                config,
                f"[yellow]Warning:[/yellow] max relative error {result.max_rel_error:.4f} "
                f"exceeds 3σ tolerance {result.tolerance:.4f}",
            )
        else:
            status(config, f"Max relative error {result.max_rel_error:.4f}")

        if config.format == "json":
            emit_json(HistogramSummaryOut.of(result), config.output)
        else:
            fieldnames = list(HistogramRow.__dataclass_fields__)
            write_csv([asdict(row) for row in result.rows], fieldnames, config.output)
