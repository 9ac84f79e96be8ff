"""Shared helper functions for CLI commands."""

from __future__ import annotations

import csv
import sys
from collections.abc import Iterator, Mapping, Sequence
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Literal

import typer
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from rich.console import Console

from shift_spectra import __version__
from shift_spectra.errors import ConfigError, EngineError
from shift_spectra.exactnum import Poly, parse_scalar
from shift_spectra.observables import BlockObservable, PolyObservable
from shift_spectra.spectra import EigenSystem, TestObservable, to_test_space
from shift_spectra.symdyn import ShiftSystem, Sidedness, resolve_system

EXIT_CONFIG = 2
EXIT_ENGINE = 3
EXIT_UNSTABLE = 4

console = Console(stderr=True)


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


def version_callback(value: bool) -> None:
    """Print version and exit."""
    if value:
        print(f"shift-spectra {__version__}")
        raise typer.Exit()


# =============================================================================
# Shared options
# =============================================================================

SystemOption = Annotated[
    str,
    typer.Option(
        "--system",
        "-s",
        help="Preset name, path to a JSON system config, or a name in the systems directory",
    ),
]
OutputOption = Annotated[
    Path | None,
    typer.Option("--output", "-o", help="Write the result here instead of stdout"),
]
QuietOption = Annotated[
    bool,
    typer.Option("--quiet", "-q", help="Suppress status lines on stderr"),
]
StrictOption = Annotated[
    bool,
    typer.Option("--strict", help="Exit with code 4 when a truncation is unstable"),
]
DegreeOption = Annotated[
    int,
    typer.Option("--n", "-n", min=0, help="Highest polynomial degree of the test space"),
]
ObservableOption = Annotated[
    list[str],
    typer.Option(
        "--f",
        "-f",
        help="Observable: h, phi:<label>, poly:c0,c1,..., block:a0,...;b0,...; repeat to sum",
    ),
]


# =============================================================================
# Run configuration
# =============================================================================


class RunConfig(BaseModel):
    """Validated parameters of one CLI invocation."""

    model_config = ConfigDict(extra="forbid")

    command: str
    system: str | None = None
    params: dict[str, Any] = Field(default_factory=dict)
    output: Path | None = None
    format: Literal["json", "csv"] = "json"
    seed: int | None = None
    threads: int = Field(default=1, ge=1)
    strict: bool = False
    quiet: bool = False


def make_config(**values: Any) -> RunConfig:
    """Build a RunConfig or exit with code 2."""
    try:
        return RunConfig.model_validate(values)
    except ValidationError as e:
        console.print(f"[red]Error:[/red] invalid options:\n{e}")
        raise typer.Exit(EXIT_CONFIG) from e


def status(config: RunConfig, message: str) -> None:
    if not config.quiet:
        console.print(message)


@contextmanager
def handle_errors() -> Iterator[None]:
    """Turn package errors into exit codes 2 (config) and 3 (engine)."""
    try:
        yield
    except ConfigError as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG) from e
    except EngineError as e:
        console.print(f"[red]Error ({type(e).__name__}):[/red] {e}")
        raise typer.Exit(EXIT_ENGINE) from e


def one_sided_system(name: str) -> ShiftSystem:
    sys_ = resolve_system(name)
    if sys_.sidedness is not Sidedness.ONE_SIDED:
        raise ConfigError(f"{sys_.name} is two-sided; use the 'twosided' commands")
    return sys_


# =============================================================================
# Output
# =============================================================================


def emit_json(model: BaseModel, output: Path | None) -> None:
    text = model.model_dump_json(indent=2) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


def write_csv(
    rows: Sequence[Mapping[str, Any]], fieldnames: Sequence[str], output: Path | None
) -> None:
    if output is None:
        writer = csv.DictWriter(sys.stdout, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return
    with output.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


# =============================================================================
# Parsing
# =============================================================================


def _coefficients(text: str) -> Poly:
    items = [item.strip() for item in text.split(",") if item.strip()]
    return Poly(tuple(parse_scalar(item) for item in items))


def _parse_term(es: EigenSystem, spec: str) -> TestObservable:
    sys_ = es.system
    kind, _, body = spec.partition(":")
    if kind == "h" and not body:
        return to_test_space(sys_, PolyObservable(sys_, Poly.of(0, 1)))
    if kind == "phi":
        try:
            return es.eigenpoly(es.index_of(body))
        except EngineError as e:
            raise ConfigError(f"{spec!r}: {e}") from e
    if kind == "poly":
        return to_test_space(sys_, PolyObservable(sys_, _coefficients(body)))
    if kind == "block":
        parts = body.split(";")
        if len(parts) != sys_.beta:
            raise ConfigError(f"{spec!r}: need {sys_.beta} blocks separated by ';'")
        return to_test_space(sys_, BlockObservable(sys_, tuple(_coefficients(p) for p in parts)))
    raise ConfigError(f"cannot parse observable {spec!r}")


def parse_observable(es: EigenSystem, specs: Sequence[str]) -> TestObservable:
    """Sum of the observables named by ``specs``.

    Raises:
        ConfigError: If a spec is malformed or names an unknown eigenfunction.
    """
    if not specs:
        raise ConfigError("give at least one --f")
    total: TestObservable | None = None
    for spec in specs:
        term = _parse_term(es, spec.strip())
        total = term if total is None else total + term  # type: ignore[operator]
    assert total is not None
    return total


def parse_grid(text: str) -> list[float]:
    """``a:b:n`` → ``n`` equally spaced floats from ``a`` to ``b``."""
    try:
        start, stop, count = text.split(":")
        a, b, n = float(parse_scalar(start)), float(parse_scalar(stop)), int(count)
    except ValueError as e:
        raise ConfigError(f"grid {text!r} is not of the form a:b:n") from e
    if n < 1:
        raise ConfigError("grid needs at least one point")
    if n == 1:
        return [a]
    return [a + (b - a) * k / (n - 1) for k in range(n)]
