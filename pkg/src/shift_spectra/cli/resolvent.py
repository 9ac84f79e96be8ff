"""Resolvent command - generalized resolvent poles and values."""

from typing import Annotated

import typer
from rich.table import Table

from shift_spectra.cli.helpers import (
    DegreeOption,
    ObservableOption,
    OutputFormat,
    OutputOption,
    QuietOption,
    SystemOption,
    console,
    emit_json,
    handle_errors,
    make_config,
    one_sided_system,
    parse_grid,
    parse_observable,
    status,
    write_csv,
)
from shift_spectra.errors import PoleHitError
from shift_spectra.exactnum import format_scalar, parse_scalar
from shift_spectra.serialize import GridValueOut, ObservableOut, ResolventOut
from shift_spectra.spectra import eigen_system, generalized_resolvent


def resolvent(
    f: ObservableOption,
    system: SystemOption = "full2-uniform",
    n: DegreeOption = 8,
    lam: Annotated[
        list[str] | None,
        typer.Option("--lam", help="Exact λ at which to evaluate; repeatable"),
    ] = None,
    grid: Annotated[
        str | None,
        typer.Option("--grid", help="Float grid a:b:count for the CSV output"),
    ] = None,
    output_format: Annotated[
        OutputFormat,
        typer.Option("--format", help="json: poles and exact values; csv: float grid"),
    ] = OutputFormat.JSON,
    output: OutputOption = None,
    quiet: QuietOption = False,
) -> None:
    """Poles, residues and values of (λ - V)⁻¹ f."""
    config = make_config(
        command="resolvent",
        system=system,
        params={"n": n, "f": f, "lam": lam or [], "grid": grid},
        output=output,
        format=output_format.value,
        quiet=quiet,
    )
    with handle_errors():
        sys = one_sided_system(system)
        es = eigen_system(sys, n)
        res = generalized_resolvent(es, parse_observable(es, f))
        poles = ResolventOut.poles_of(res)
        status(config, f"{len(poles)} poles")

        if config.format == "csv":
            points = parse_grid(grid) if grid else []
            components = [res.component(k) for k in range(es.dim)]
            locations = {float(p.location): p.order for p in res.poles}
            fieldnames = ["lam", "pole_order", *[f"x{k}" for k in range(es.dim)]]
            rows = []
            for x in points:
                row: dict[str, object] = {"lam": x, "pole_order": locations.get(x, "")}
                for k, component in enumerate(components):
                    row[f"x{k}"] = "" if x in locations else component.evaluate_float(x).real
                rows.append(row)
            write_csv(rows, fieldnames, config.output)
            if config.output is not None:
                table_path = config.output.with_suffix(".poles.json")
                emit_json(ResolventOut(system=sys.name, f=" + ".join(f), poles=poles), table_path)
                status(config, f"Pole table written to {table_path}")
            elif not config.quiet:
                table = Table("label", "pole", "order", "coefficient")
                for p in poles:
                    table.add_row(p.label, p.location, str(p.order), p.coefficient)
                console.print(table)
            return

        values = []
        for text in lam or []:
            point = parse_scalar(text)
            try:
                value = res.evaluate(point)
            except PoleHitError as hit:
                status(config, f"λ = {text} is a pole of order {hit.order}")
                values.append(GridValueOut(lam=format_scalar(point), pole_order=hit.order))
                continue
            values.append(GridValueOut(lam=format_scalar(point), value=ObservableOut.of(value)))
        emit_json(
            ResolventOut(system=sys.name, f=" + ".join(f), poles=poles, values=values),
            config.output,
        )
