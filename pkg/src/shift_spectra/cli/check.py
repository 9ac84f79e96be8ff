"""Check command - run the invariant suite."""

from typing import Annotated

import typer
from rich.table import Table

from shift_spectra.cli.helpers import (
    EXIT_ENGINE,
    OutputOption,
    QuietOption,
    console,
    emit_json,
    handle_errors,
    make_config,
    status,
)
from shift_spectra.invariants import CHECKS, run_checks
from shift_spectra.serialize import CheckReportOut, CheckResultOut


def check(
    only: Annotated[
        list[str] | None,
        typer.Option("--only", help=f"Run only these checks: {', '.join(CHECKS)}"),
    ] = None,
    quick: Annotated[
        bool, typer.Option("--quick", help="Smaller sizes; finishes in seconds")
    ] = False,
    output: OutputOption = None,
    quiet: QuietOption = False,
) -> None:
    """Run the invariant suite; exit code 3 if any check fails."""
    config = make_config(
        command="check", params={"only": only or [], "quick": quick}, output=output, quiet=quiet
    )
    with handle_errors():
        results = run_checks(only or None, quick=quick, progress=not config.quiet)

    if not config.quiet:
        table = Table("check", "result", "detail")
        for r in results:
            verdict = "[green]pass[/green]" if r.passed else "[red]FAIL[/red]"
            table.add_row(r.name, verdict, r.detail)
        console.print(table)

    passed = all(r.passed for r in results)
    report = CheckReportOut(
        passed=passed,
        results=[CheckResultOut(name=r.name, passed=r.passed, detail=r.detail) for r in results],
    )
    emit_json(report, config.output)
    status(config, f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    if not passed:
        raise typer.Exit(EXIT_ENGINE)
