"""JSON output schemas.

Every exact scalar is written as a string (``"3/4"``, ``"1/2+1/2√5"``); floats
only appear in simulation and grid outputs.
"""

from __future__ import annotations

from typing import Annotated, Literal

from pydantic import AfterValidator, BaseModel, ConfigDict

from shift_spectra import twosided
from shift_spectra.conjugacy import HistogramResult
from shift_spectra.errors import ConfigError
from shift_spectra.exactnum import Poly, RationalFunction, Scalar, format_scalar, parse_scalar
from shift_spectra.observables import BlockObservable, PolyObservable
from shift_spectra.spectra import (
    EigenSystem,
    IterationReport,
    SpectralDecomposition,
    SpectralTerm,
    TestObservable,
    VectorResolvent,
)
from shift_spectra.symdyn import ShiftSystem


def _exact(value: str) -> str:
    try:
        parse_scalar(value)
    except ConfigError as e:
        raise ValueError(str(e)) from e
    return value


ExactScalar = Annotated[str, AfterValidator(_exact)]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def scalars(values: tuple[Scalar, ...] | list[Scalar]) -> list[str]:
    return [format_scalar(v) for v in values]


def parse_scalars(values: list[str]) -> list[Scalar]:
    return [parse_scalar(v) for v in values]


# =============================================================================
# One-sided outputs
# =============================================================================


class ObservableOut(_Model):
    kind: Literal["poly", "block"]
    coefficients: list[ExactScalar] | None = None
    blocks: list[list[ExactScalar]] | None = None

    @classmethod
    def of(cls, f: TestObservable) -> ObservableOut:
        if isinstance(f, PolyObservable):
            return cls(kind="poly", coefficients=scalars(f.poly.coeffs))
        return cls(kind="block", blocks=[scalars(p.coeffs) for p in f.blocks])

    def to_observable(self, sys: ShiftSystem) -> TestObservable:
        if self.kind == "poly":
            return PolyObservable(sys, Poly(tuple(parse_scalars(self.coefficients or []))))
        return BlockObservable(
            sys, tuple(Poly(tuple(parse_scalars(b))) for b in self.blocks or [])
        )


class SpectrumOut(_Model):
    system: str
    n: int
    basis: str
    labels: list[str]
    eigenvalues: list[ExactScalar]

    @classmethod
    def of(cls, es: EigenSystem, n: int) -> SpectrumOut:
        return cls(
            system=es.system.name,
            n=n,
            basis=es.matrix.basis.value,
            labels=list(es.labels),
            eigenvalues=scalars(es.eigenvalues),
        )


class EigenfunctionOut(_Model):
    label: str
    eigenvalue: ExactScalar
    function: ObservableOut
    dual: list[ExactScalar]


class EigenfunctionsOut(_Model):
    system: str
    n: int
    basis: str
    eigenfunctions: list[EigenfunctionOut]

    @classmethod
    def of(cls, es: EigenSystem, n: int) -> EigenfunctionsOut:
        return cls(
            system=es.system.name,
            n=n,
            basis=es.matrix.basis.value,
            eigenfunctions=[
                EigenfunctionOut(
                    label=label,
                    eigenvalue=format_scalar(lam),
                    function=ObservableOut.of(es.eigenpoly(i)),
                    dual=scalars(es.dual[i]),
                )
                for i, (label, lam) in enumerate(zip(es.labels, es.eigenvalues, strict=True))
            ],
        )


class TermOut(_Model):
    label: str
    eigenvalue: ExactScalar
    coefficient: ExactScalar


def terms_out(decomposition: SpectralDecomposition) -> list[TermOut]:
    return [
        TermOut(
            label=t.label,
            eigenvalue=format_scalar(t.eigenvalue),
            coefficient=format_scalar(t.coefficient),
        )
        for t in decomposition.terms
    ]


def terms_in(terms: list[TermOut]) -> SpectralDecomposition:
    return SpectralDecomposition(
        tuple(
            SpectralTerm(t.label, parse_scalar(t.eigenvalue), parse_scalar(t.coefficient))
            for t in terms
        )
    )


class DecompositionOut(_Model):
    system: str
    f: str
    terms: list[TermOut]


class IterationOut(_Model):
    system: str
    f: str
    k: int
    terms: list[TermOut]
    limit: ExactScalar
    rate: ExactScalar | None
    image: ObservableOut
    residual: ObservableOut

    @classmethod
    def of(cls, system: str, f: str, report: IterationReport) -> IterationOut:
        return cls(
            system=system,
            f=f,
            k=report.k,
            terms=terms_out(report.decomposition),
            limit=format_scalar(report.limit),
            rate=None if report.rate is None else format_scalar(report.rate),
            image=ObservableOut.of(report.image),
            residual=ObservableOut.of(report.residual),
        )


class PoleOut(_Model):
    label: str
    location: ExactScalar
    order: int
    coefficient: ExactScalar
    residue: ObservableOut


class GridValueOut(_Model):
    lam: ExactScalar
    value: ObservableOut | None = None
    pole_order: int | None = None


class ResolventOut(_Model):
    system: str
    f: str
    poles: list[PoleOut]
    values: list[GridValueOut] = []

    @classmethod
    def poles_of(cls, resolvent: VectorResolvent) -> list[PoleOut]:
        return [
            PoleOut(
                label=p.label,
                location=format_scalar(p.location),
                order=p.order,
                coefficient=format_scalar(p.coefficient),
                residue=ObservableOut.of(p.residue),
            )
            for p in resolvent.poles
        ]


# =============================================================================
# Two-sided outputs
# =============================================================================


class PoleTermOut(_Model):
    location: ExactScalar
    order: int


class RationalFunctionOut(_Model):
    numerator: list[ExactScalar]
    poles: list[PoleTermOut]

    @classmethod
    def of(cls, r: RationalFunction) -> RationalFunctionOut:
        return cls(
            numerator=scalars(r.numerator.coeffs),
            poles=[PoleTermOut(location=format_scalar(loc), order=o) for loc, o in r.poles],
        )

    def to_rational_function(self) -> RationalFunction:
        return RationalFunction(
            Poly(tuple(parse_scalars(self.numerator))),
            tuple((parse_scalar(p.location), p.order) for p in self.poles),
        )


class TensorEntryOut(_Model):
    i: int
    j: int
    value: ExactScalar


class TensorCoeffsOut(_Model):
    M: int
    N: int
    entries: list[TensorEntryOut]

    @classmethod
    def of(cls, f: twosided.TensorCoeffs) -> TensorCoeffsOut:
        return cls(
            M=f.M,
            N=f.N,
            entries=[
                TensorEntryOut(i=ix.i, j=ix.j, value=format_scalar(v)) for ix, v in f.coeffs.items()
            ],
        )

    def to_coeffs(self) -> twosided.TensorCoeffs:
        return twosided.TensorCoeffs(
            self.M,
            self.N,
            {twosided.TensorIndex(e.i, e.j): parse_scalar(e.value) for e in self.entries},
        )


class OperatorEntryOut(_Model):
    """Entry in row ``(i, j)`` and column ``(m, n)``."""

    i: int
    j: int
    m: int
    n: int
    value: ExactScalar


class OperatorOut(_Model):
    epsilon: ExactScalar
    M: int
    N: int
    entries: list[OperatorEntryOut]

    @classmethod
    def of(cls, op: twosided.TwoSidedOperator) -> OperatorOut:
        return cls(
            epsilon=format_scalar(op.epsilon),
            M=op.M,
            N=op.N,
            entries=[
                OperatorEntryOut(i=row.i, j=row.j, m=col.i, n=col.j, value=format_scalar(v))
                for row, col, v in op.sparse_entries()
            ],
        )

    def to_operator(self) -> twosided.TwoSidedOperator:
        indices = twosided.truncation_indices(self.M, self.N)
        size = len(indices)
        rows: list[list[Scalar]] = [[parse_scalar("0")] * size for _ in range(size)]
        width = self.N + 1
        for e in self.entries:
            rows[e.i * width + e.j][e.m * width + e.n] = parse_scalar(e.value)
        return twosided.TwoSidedOperator(
            parse_scalar(self.epsilon),
            self.M,
            self.N,
            indices,
            tuple(tuple(row) for row in rows),
        )


class JordanOut(_Model):
    k: int
    epsilon: ExactScalar
    eigenvalue: ExactScalar
    algebraic: int
    geometric: int
    blocks: list[int]
    truncation: tuple[int, int]
    stable: bool

    @classmethod
    def of(cls, report: twosided.JordanReport, epsilon: Scalar) -> JordanOut:
        return cls(
            k=report.k,
            epsilon=format_scalar(epsilon),
            eigenvalue=format_scalar(report.eigenvalue),
            algebraic=report.algebraic,
            geometric=report.geometric,
            blocks=list(report.blocks),
            truncation=report.truncation,
            stable=report.stable,
        )

    def to_report(self) -> twosided.JordanReport:
        return twosided.JordanReport(
            k=self.k,
            eigenvalue=parse_scalar(self.eigenvalue),  # type: ignore[arg-type]
            algebraic=self.algebraic,
            geometric=self.geometric,
            blocks=tuple(self.blocks),
            truncation=self.truncation,
            stable=self.stable,
        )


class PoleOrderOut(_Model):
    k: int
    order: int
    expected: int
    f: TensorCoeffsOut
    g: TensorCoeffsOut
    coefficient: RationalFunctionOut

    @classmethod
    def of(cls, witness: twosided.PoleOrderWitness) -> PoleOrderOut:
        return cls(
            k=witness.k,
            order=witness.order,
            expected=witness.k + 1,
            f=TensorCoeffsOut.of(witness.f),
            g=TensorCoeffsOut.of(witness.g),
            coefficient=RationalFunctionOut.of(witness.coefficient),
        )


# =============================================================================
# Simulation and checks
# =============================================================================


class HistogramSummaryOut(_Model):
    map: str
    samples: int
    bins: int
    seed: int
    burn_in: int
    max_rel_error: float
    tolerance: float
    branch_frequencies: list[float]

    @classmethod
    def of(cls, result: HistogramResult) -> HistogramSummaryOut:
        return cls(
            map=result.map_label,
            samples=result.samples,
            bins=result.bins,
            seed=result.seed,
            burn_in=result.burn_in,
            max_rel_error=result.max_rel_error,
            tolerance=result.tolerance,
            branch_frequencies=list(result.branch_frequencies),
        )


class CheckResultOut(_Model):
    name: str
    passed: bool
    detail: str


class CheckReportOut(_Model):
    passed: bool
    results: list[CheckResultOut]
