"""Twosided commands - Jordan structure and A_k poles of the two-sided full 2-shift."""

import warnings
from typing import Annotated

import typer

from shift_spectra import twosided as engine
from shift_spectra.cli.helpers import (
    EXIT_UNSTABLE,
    OutputOption,
    QuietOption,
    StrictOption,
    emit_json,
    handle_errors,
    make_config,
    status,
)
from shift_spectra.errors import ConfigError, SpectrumWarning
from shift_spectra.exactnum import Scalar, format_scalar, parse_scalar
from shift_spectra.serialize import JordanOut, OperatorOut, PoleOrderOut, RationalFunctionOut

twosided_app = typer.Typer(
    help="Two-sided full 2-shift: V_L(ε) = Q₀ + εQ₁ on the tensor basis Φ_i⊗Ψ'_j.",
    no_args_is_help=True,
)

DegreeK = Annotated[int, typer.Option("--k", "-k", min=0, help="Total degree k (eigenvalue 2^-k)")]
Epsilon = Annotated[str, typer.Option("--eps", "-e", help="Exact coupling ε, e.g. 1 or 1/2")]


def parse_tensor(specs: list[str]) -> engine.TensorCoeffs:
    """``i,j=value`` entries, e.g. ``--f 2,0=1 --f 0,1=-1/2``."""
    pairs: dict[tuple[int, int], Scalar] = {}
    for spec in specs:
        index, _, value = spec.partition("=")
        try:
            i, j = (int(part) for part in index.split(","))
        except ValueError:
            raise ConfigError(f"tensor entry {spec!r} is not of the form i,j=value") from None
        pairs[(i, j)] = parse_scalar(value or "1")
    if not pairs:
        raise ConfigError("give at least one tensor entry")
    return engine.TensorCoeffs.from_pairs(pairs)


@twosided_app.command("jordan")
def jordan(
    k: DegreeK = 2,
    eps: Epsilon = "1",
    m_bound: Annotated[
        int | None, typer.Option("--M", help="Φ-side truncation (default k)")
    ] = None,
    n_bound: Annotated[
        int | None, typer.Option("--N", help="Ψ'-side truncation (default k+4)")
    ] = None,
    strict: StrictOption = False,
    output: OutputOption = None,
    quiet: QuietOption = False,
) -> None:
    """Algebraic and geometric multiplicity of the generalized eigenvalue 2^-k."""
    M = k if m_bound is None else m_bound
    N = k + 4 if n_bound is None else n_bound
    config = make_config(
        command="twosided jordan",
        params={"k": k, "eps": eps, "M": M, "N": N},
        output=output,
        strict=strict,
        quiet=quiet,
    )
    with handle_errors():
        epsilon = parse_scalar(eps)
        status(config, f"Building V_L(ε={eps}) on i ≤ {M}, j ≤ {N}")
        op = engine.build_operator(epsilon, M, N)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", SpectrumWarning)
            report = engine.jordan_analysis(op, k)
        for w in caught:
            status(config, f"[yellow]Warning:[/yellow] {w.message}")
        status(
            config,
            f"2^-{k}: algebraic {report.algebraic}, geometric {report.geometric}, "
            f"blocks {list(report.blocks)}",
        )
        emit_json(JordanOut.of(report, epsilon), config.output)

    if config.strict and not report.stable:
        raise typer.Exit(EXIT_UNSTABLE)


@twosided_app.command("ak-poles")
def ak_poles(
    k: DegreeK = 1,
    output: OutputOption = None,
    quiet: QuietOption = False,
) -> None:
    """Largest order of the pole 2^-k of A_k over degree-k basis pairs."""
    config = make_config(command="twosided ak-poles", params={"k": k}, output=output, quiet=quiet)
    with handle_errors():
        witness = engine.pole_order_check(k)
        status(config, f"A_{k} has a pole of order {witness.order} at 2^-{k}")
        emit_json(PoleOrderOut.of(witness), config.output)


@twosided_app.command("coefficient")
def coefficient(
    f: Annotated[list[str], typer.Option("--f", "-f", help="Entry i,j=value of f; repeatable")],
    g: Annotated[list[str], typer.Option("--g", "-g", help="Entry i,j=value of g; repeatable")],
    k: DegreeK = 1,
    output: OutputOption = None,
    quiet: QuietOption = False,
) -> None:
    """The perturbation coefficient A_k(λ) as an exact rational function."""
    config = make_config(
        command="twosided coefficient", params={"k": k, "f": f, "g": g}, output=output, quiet=quiet
    )
    with handle_errors():
        value = engine.perturbation_coefficient(k, parse_tensor(f), parse_tensor(g))
        poles = ", ".join(f"{format_scalar(loc)} (order {order})" for loc, order in value.poles)
        status(config, f"A_{k} poles: {poles or 'none'}")
        emit_json(RationalFunctionOut.of(value), config.output)


@twosided_app.command("operator")
def operator(
    eps: Epsilon = "1",
    m_bound: Annotated[int, typer.Option("--M", min=0, help="Φ-side truncation")] = 3,
    n_bound: Annotated[int, typer.Option("--N", min=0, help="Ψ'-side truncation")] = 3,
    output: OutputOption = None,
    quiet: QuietOption = False,
) -> None:
    """Export the truncated matrix of V_L(ε) as sparse exact entries."""
    config = make_config(
        command="twosided operator",
        params={"eps": eps, "M": m_bound, "N": n_bound},
        output=output,
        quiet=quiet,
    )
    with handle_errors():
        op = engine.build_operator(parse_scalar(eps), m_bound, n_bound)
        entries = op.sparse_entries()
        status(config, f"{len(op.indices)} basis vectors, {len(entries)} nonzero entries")
        emit_json(OperatorOut.of(op), config.output)
