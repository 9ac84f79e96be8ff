"""One-sided generalized spectral engine.

The Perron-Frobenius operator preserves the finite-dimensional spaces of
polynomials of degree ≤ n in the coding variable (block polynomials for the
golden-mean system). On them its matrix is (block) upper triangular, so the
generalized eigenvalues are read off the diagonal and the eigenpolynomials
follow by exact back-substitution.
"""

from __future__ import annotations

import functools
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb

from shift_spectra import linalg
from shift_spectra.errors import (
    DegeneracyError,
    EngineError,
    ObservableKindError,
    PoleHitError,
    SpectrumWarning,
    TruncationError,
)
from shift_spectra.exactnum import (
    ComplexScalar,
    Poly,
    RationalFunction,
    Scalar,
    abs_scalar,
    compare_scalars,
    format_scalar,
    scalar_sqrt,
    sign,
)
from shift_spectra.observables import (
    BlockObservable,
    CylFun,
    PolyObservable,
    inner_product,
    pf_apply,
)
from shift_spectra.symdyn import ShiftSystem

TestObservable = PolyObservable | BlockObservable
AnyObservable = PolyObservable | BlockObservable | CylFun


class BasisKind(Enum):
    """Coordinates used for ``X_n``."""

    MONOMIAL = "monomial"  # h^0 .. h^n
    BLOCK = "block"  # 1_{C[0]}h^0, 1_{C[1]}h^0, 1_{C[0]}h^1, ...


def basis_kind(sys: ShiftSystem) -> BasisKind:
    return BasisKind.BLOCK if sys.is_golden_mean else BasisKind.MONOMIAL


def block_size(sys: ShiftSystem) -> int:
    return sys.beta if sys.is_golden_mean else 1


# =============================================================================
# Coordinates
# =============================================================================


def to_test_space(sys: ShiftSystem, f: AnyObservable) -> TestObservable:
    """Bring ``f`` into the system's polynomial test space.

    Raises:
        ObservableKindError: If ``f`` is a cylinder function that is not a
            polynomial observable (depth > 0, or > 1 for golden-mean).
    """
    if isinstance(f, CylFun):
        if f.depth == 0:
            f = PolyObservable(sys, Poly.constant(f(())))
        elif f.depth == 1 and sys.is_golden_mean:
            return BlockObservable(sys, tuple(Poly.constant(f((j,))) for j in range(sys.beta)))
        else:
            raise ObservableKindError("cylinder functions of positive depth are not in X")
    if sys.is_golden_mean and isinstance(f, PolyObservable):
        return f.as_block()
    if not sys.is_golden_mean and isinstance(f, BlockObservable):
        raise ObservableKindError("block observables belong to the golden-mean system")
    return f


def observable_vector(sys: ShiftSystem, f: AnyObservable, size: int) -> tuple[Scalar, ...]:
    """Coordinates of ``f`` in the first ``size`` basis vectors.

    Raises:
        TruncationError: If ``f`` has components beyond ``size``.
    """
    g = to_test_space(sys, f)
    if isinstance(g, PolyObservable):
        if g.degree >= size:
            raise TruncationError(f"degree {g.degree} exceeds the space of dimension {size}")
        return tuple(g.poly.padded(size))
    bs = block_size(sys)
    degrees = size // bs
    if g.degree >= degrees:
        raise TruncationError(
            f"degree {g.degree} exceeds the block space of degree {degrees - 1}"
        )
    return tuple(g.blocks[k % bs].coefficient(k // bs) for k in range(size))


def vector_observable(sys: ShiftSystem, vector: Sequence[Scalar]) -> TestObservable:
    if not sys.is_golden_mean:
        return PolyObservable(sys, Poly(tuple(vector)))
    bs = block_size(sys)
    return BlockObservable(sys, tuple(Poly(tuple(vector[j::bs])) for j in range(bs)))


def _pf_vector(sys: ShiftSystem, vector: Sequence[Scalar], size: int) -> tuple[Scalar, ...]:
    image = pf_apply(sys, vector_observable(sys, vector))
    assert not isinstance(image, CylFun)
    return observable_vector(sys, image, size)


# =============================================================================
# Representation matrix
# =============================================================================


@dataclass(frozen=True)
class RepMatrix:
    """Matrix of ``V`` on ``X_n`` (columns are images of basis vectors)."""

    system: ShiftSystem
    degree: int
    entries: linalg.Matrix
    basis: BasisKind

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def block_size(self) -> int:
        return block_size(self.system)

    def diagonal_block(self, k: int) -> linalg.Matrix:
        bs = self.block_size
        rows = range(k * bs, (k + 1) * bs)
        return tuple(tuple(self.entries[i][j] for j in rows) for i in rows)


def rep_matrix(sys: ShiftSystem, n: int) -> RepMatrix:
    """Exact matrix of ``V`` restricted to ``X_n``.

    Raises:
        EngineError: If the (block) triangular structure does not hold.
    """
    if n < 0:
        raise EngineError("degree must be non-negative")
    bs = block_size(sys)
    size = bs * (n + 1)
    columns = []
    for k in range(size):
        unit = [Fraction(0)] * size
        unit[k] = Fraction(1)
        columns.append(_pf_vector(sys, unit, size))
    entries = linalg.transpose(tuple(columns))
    for i in range(size):
        for j in range(size):
            if i // bs > j // bs and entries[i][j] != 0:
                raise EngineError(f"representation matrix is not block triangular at ({i}, {j})")
    return RepMatrix(sys, n, entries, basis_kind(sys))


# =============================================================================
# Eigen system
# =============================================================================


def _modulus_order(x: Scalar, y: Scalar) -> int:
    """Descending ``|λ|``, positive first on ties."""
    by_modulus = compare_scalars(abs_scalar(y), abs_scalar(x))
    if by_modulus:
        return by_modulus
    return sign(y) - sign(x)


modulus_key = functools.cmp_to_key(_modulus_order)


def _block_eigenvalues(block: linalg.Matrix) -> list[Scalar]:
    if len(block) == 1:
        return [block[0][0]]
    if len(block) != 2:
        raise EngineError("diagonal blocks larger than 2x2 are not supported")
    (a, b), (c, d) = block
    trace = a + d
    discriminant = trace * trace - 4 * (a * d - b * c)
    if sign(discriminant) < 0:
        raise DegeneracyError("complex eigenvalues in a diagonal block")
    root = scalar_sqrt(discriminant)
    if root == 0:
        raise DegeneracyError("repeated eigenvalue in a diagonal block")
    return [(trace + root) / 2, (trace - root) / 2]


def _local_eigenvector(block: linalg.Matrix, lam: Scalar) -> tuple[Scalar, ...]:
    kernel = linalg.kernel(linalg.shift_diagonal(block, lam))
    if len(kernel) != 1:
        raise DegeneracyError("diagonal block eigenvalue is not simple")
    v = kernel[0]
    lead = next(x for x in v if x != 0)
    return tuple(x / lead for x in v)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues, eigenvectors ``Φ`` and dual functionals ``Φ'`` on ``X_n``.

    ``change_of_basis`` has the eigenvector coordinates as columns; the rows of
    ``dual`` (its inverse) are the functionals ``Φ'_i``.
    """

    matrix: RepMatrix
    eigenvalues: tuple[Scalar, ...]
    labels: tuple[str, ...]
    change_of_basis: linalg.Matrix
    dual: linalg.Matrix

    @property
    def system(self) -> ShiftSystem:
        return self.matrix.system

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def eigenvector(self, i: int) -> tuple[Scalar, ...]:
        return tuple(row[i] for row in self.change_of_basis)

    def eigenpoly(self, i: int) -> TestObservable:
        return vector_observable(self.system, self.eigenvector(i))

    @property
    def eigenpolys(self) -> tuple[TestObservable, ...]:
        return tuple(self.eigenpoly(i) for i in range(self.dim))

    def dual_functional(self, i: int) -> DualFunctional:
        return DualFunctional(self.system, self.dual[i])

    def index_of(self, label_or_value: str | Scalar) -> int:
        if isinstance(label_or_value, str):
            try:
                return self.labels.index(label_or_value)
            except ValueError:
                raise EngineError(f"no eigenfunction labelled {label_or_value!r}") from None
        for i, lam in enumerate(self.eigenvalues):
            if lam == label_or_value:
                return i
        raise EngineError(f"{format_scalar(label_or_value)} is not an eigenvalue")

    def vector(self, f: AnyObservable) -> tuple[Scalar, ...]:
        return observable_vector(self.system, f, self.dim)


def eigen_system(sys: ShiftSystem, n: int) -> EigenSystem:
    """Eigen decomposition of ``V`` on ``X_n`` by exact back-substitution.

    Bernoulli eigenpolynomials are monic. Golden-mean ones are scaled so the
    ``1_{C[0]}hᵏ`` coordinate of their top block is 1, which makes
    ``Φ_{0,+} = 1``.

    Raises:
        DegeneracyError: If two diagonal eigenvalues coincide.
    """
    matrix = rep_matrix(sys, n)
    a = matrix.entries
    bs = matrix.block_size
    size = matrix.size

    found: list[tuple[Scalar, str, tuple[Scalar, ...]]] = []
    for k in range(n + 1):
        block = matrix.diagonal_block(k)
        values = _block_eigenvalues(block)
        for position, lam in enumerate(values):
            label = str(k) if bs == 1 else f"{k}{'+' if position == 0 else '-'}"
            local = _local_eigenvector(block, lam)
            vector: list[Scalar] = [Fraction(0)] * size
            vector[k * bs : (k + 1) * bs] = local
            # solve the blocks above, bottom-up
            for upper in range(k - 1, -1, -1):
                rows = range(upper * bs, (upper + 1) * bs)
                above = range((upper + 1) * bs, (k + 1) * bs)
                rhs = [-sum((a[r][c] * vector[c] for c in above), Fraction(0)) for r in rows]
                shifted = linalg.shift_diagonal(matrix.diagonal_block(upper), lam)
                try:
                    solution = linalg.solve(shifted, rhs)
                except DegeneracyError:
                    raise DegeneracyError(
                        f"eigenvalue {format_scalar(lam)} repeats on the diagonal"
                    ) from None
                vector[upper * bs : (upper + 1) * bs] = solution
            found.append((lam, label, tuple(vector)))

    values_only = [lam for lam, _, _ in found]
    if len(set(values_only)) != len(values_only):
        raise DegeneracyError("repeated diagonal eigenvalues are not supported")
    found.sort(key=lambda item: modulus_key(item[0]))

    change = linalg.transpose(tuple(v for _, _, v in found))
    return EigenSystem(
        matrix=matrix,
        eigenvalues=tuple(lam for lam, _, _ in found),
        labels=tuple(label for _, label, _ in found),
        change_of_basis=change,
        dual=linalg.inverse(change),
    )


@functools.lru_cache(maxsize=64)
def bernoulli_poly(n: int) -> Poly:
    """``B_n(x)`` from ``Σ_{k≤n} C(n+1, k) B_k = 0`` with ``B_0 = 1``."""
    numbers = _bernoulli_numbers(n)
    return Poly(tuple(comb(n, k) * numbers[k] for k in range(n, -1, -1)))


@functools.lru_cache(maxsize=64)
def _bernoulli_numbers(n: int) -> tuple[Fraction, ...]:
    out = [Fraction(1)]
    for m in range(1, n + 1):
        acc = sum((comb(m + 1, k) * out[k] for k in range(m)), Fraction(0))
        out.append(-acc / (m + 1))
    return tuple(out)


# =============================================================================
# Decomposition, iteration, resolvent
# =============================================================================


@dataclass(frozen=True)
class SpectralTerm:
    label: str
    eigenvalue: Scalar
    coefficient: Scalar


@dataclass(frozen=True)
class SpectralDecomposition:
    """``f = Σ c_i Φ_i`` with only the nonzero ``c_i`` kept."""

    terms: tuple[SpectralTerm, ...]

    def coefficient(self, label: str) -> Scalar:
        for term in self.terms:
            if term.label == label:
                return term.coefficient
        return Fraction(0)

    def reconstruct(self, es: EigenSystem) -> TestObservable:
        vector: list[Scalar] = [Fraction(0)] * es.dim
        for term in self.terms:
            i = es.labels.index(term.label)
            for row in range(es.dim):
                vector[row] = vector[row] + term.coefficient * es.change_of_basis[row][i]
        return vector_observable(es.system, vector)


def decompose(es: EigenSystem, f: AnyObservable) -> SpectralDecomposition:
    """Coefficients ``c_i = ⟨Φ'_i | f⟩`` obtained from ``M⁻¹``.

    Raises:
        TruncationError: If ``f`` does not fit in ``X_n``.
    """
    coefficients = linalg.matvec(es.dual, es.vector(f))
    return SpectralDecomposition(
        tuple(
            SpectralTerm(label, lam, c)
            for label, lam, c in zip(es.labels, es.eigenvalues, coefficients, strict=True)
            if c != 0
        )
    )


@dataclass(frozen=True)
class IterationReport:
    """``V^k f`` with its limit coefficient and the mixing rate."""

    k: int
    image: TestObservable
    decomposition: SpectralDecomposition
    limit: Scalar
    rate: Scalar | None
    residual: TestObservable


def iterate_pf(es: EigenSystem, f: AnyObservable, k: int) -> IterationReport:
    """``V^k f = Σ c_i λ_i^k Φ_i`` computed exactly.

    ``limit`` is the coefficient of the eigenvalue-1 mode (equal to ``∫f dμ``);
    ``rate`` is the largest ``|λ_i|`` among the other modes present.
    """
    if k < 0:
        raise EngineError("iteration count must be non-negative")
    initial = decompose(es, f)
    evolved = SpectralDecomposition(
        tuple(
            SpectralTerm(t.label, t.eigenvalue, t.coefficient * t.eigenvalue**k)
            for t in initial.terms
        )
    )
    limit: Scalar = Fraction(0)
    rate: Scalar | None = None
    for term in initial.terms:
        if term.eigenvalue == 1:
            limit = term.coefficient
        else:
            modulus = abs_scalar(term.eigenvalue)
            if rate is None or compare_scalars(modulus, rate) > 0:
                rate = modulus
    image = evolved.reconstruct(es)
    top = es.index_of(Fraction(1))
    constant_mode = vector_observable(es.system, es.eigenvector(top)).scale(limit)
    return IterationReport(
        k=k,
        image=image,
        decomposition=evolved,
        limit=limit,
        rate=rate,
        residual=_subtract(image, constant_mode),
    )


def _subtract(f: TestObservable, g: TestObservable) -> TestObservable:
    if isinstance(f, PolyObservable) and isinstance(g, PolyObservable):
        return f - g
    if isinstance(f, BlockObservable) and isinstance(g, BlockObservable):
        return f - g
    raise ObservableKindError("cannot subtract observables of different kinds")


@dataclass(frozen=True)
class ResolventPole:
    label: str
    location: Scalar
    order: int
    residue: TestObservable
    coefficient: Scalar


@dataclass(frozen=True)
class VectorResolvent:
    """``(λ - V)⁻¹ f = Σ c_i/(λ - λ_i) Φ_i`` as an observable-valued rational function."""

    eigensystem: EigenSystem
    decomposition: SpectralDecomposition

    @property
    def poles(self) -> tuple[ResolventPole, ...]:
        es = self.eigensystem
        return tuple(
            ResolventPole(
                label=t.label,
                location=t.eigenvalue,
                order=1,
                residue=es.eigenpoly(es.labels.index(t.label)).scale(t.coefficient),
                coefficient=t.coefficient,
            )
            for t in self.decomposition.terms
        )

    def component(self, k: int) -> RationalFunction:
        """The ``k``-th basis coordinate as a scalar rational function of ``λ``."""
        es = self.eigensystem
        out = RationalFunction.constant(0)
        for t in self.decomposition.terms:
            weight = t.coefficient * es.change_of_basis[k][es.labels.index(t.label)]
            if weight != 0:
                out = out + RationalFunction.simple_pole(t.eigenvalue, weight)
        return out

    def pairing(self, g: AnyObservable) -> RationalFunction:
        """``⟨(λ - V)⁻¹ f, g⟩`` as a scalar rational function."""
        es = self.eigensystem
        out = RationalFunction.constant(0)
        for t in self.decomposition.terms:
            phi = es.eigenpoly(es.labels.index(t.label))
            weight = t.coefficient * inner_product(es.system, phi, g)
            if weight != 0:
                out = out + RationalFunction.simple_pole(t.eigenvalue, weight)
        return out

    def evaluate(self, lam: Scalar) -> TestObservable:
        """Exact value at a non-pole ``λ`` (inside or outside the unit circle).

        Raises:
            PoleHitError: If ``λ`` is a pole; the residue observable is attached.
        """
        for pole in self.poles:
            if pole.location == lam:
                raise PoleHitError(
                    f"λ = {format_scalar(lam)} is a pole of the resolvent",
                    order=pole.order,
                    residue=pole.residue,
                )
        scaled = SpectralDecomposition(
            tuple(
                SpectralTerm(t.label, t.eigenvalue, t.coefficient / (lam - t.eigenvalue))
                for t in self.decomposition.terms
            )
        )
        return scaled.reconstruct(self.eigensystem)

    def evaluate_complex(self, lam: ComplexScalar) -> tuple[ComplexScalar, ...]:
        """Exact basis coordinates at a complex ``λ``."""
        return tuple(
            ComplexScalar.of(0) + self.component(k).evaluate(lam)  # type: ignore[operator]
            for k in range(self.eigensystem.dim)
        )


def generalized_resolvent(es: EigenSystem, f: AnyObservable) -> VectorResolvent:
    return VectorResolvent(es, decompose(es, f))


@dataclass(frozen=True)
class RieszProjection:
    image: TestObservable
    in_spectrum: bool


def riesz_projection(es: EigenSystem, f: AnyObservable, lam: Scalar) -> RieszProjection:
    """Residue of the resolvent at ``λ``, i.e. ``c_i Φ_i``.

    Warns with :class:`SpectrumWarning` and returns zero when ``λ`` is not a
    generalized eigenvalue.
    """
    zero = vector_observable(es.system, [Fraction(0)] * es.dim)
    if not any(lam == mu for mu in es.eigenvalues):
        warnings.warn(
            f"{format_scalar(lam)} is not a generalized eigenvalue; projection is zero",
            SpectrumWarning,
            stacklevel=2,
        )
        return RieszProjection(zero, in_spectrum=False)
    for pole in generalized_resolvent(es, f).poles:
        if pole.location == lam:
            return RieszProjection(pole.residue, in_spectrum=True)
    return RieszProjection(zero, in_spectrum=True)


# =============================================================================
# Dual side
# =============================================================================


@dataclass(frozen=True)
class DualFunctional:
    """A linear functional on ``X_n`` stored as a row over the basis coordinates."""

    system: ShiftSystem
    row: tuple[Scalar, ...]

    def __call__(self, f: AnyObservable) -> Scalar:
        vector = observable_vector(self.system, f, len(self.row))
        return sum((a * b for a, b in zip(self.row, vector, strict=True)), Fraction(0))


def integration_functional(es: EigenSystem) -> DualFunctional:
    """``f ↦ ∫ f dμ`` as a row vector."""
    row = []
    for k in range(es.dim):
        unit = [Fraction(0)] * es.dim
        unit[k] = Fraction(1)
        basis_vector = vector_observable(es.system, unit)
        row.append(inner_product(es.system, basis_vector, CylFun.constant(es.system, 1)))
    return DualFunctional(es.system, tuple(row))


def koopman_dual_apply(es: EigenSystem, functional: DualFunctional) -> DualFunctional:
    """``U^× ℓ = ℓ ∘ V``: the row vector times the representation matrix."""
    return DualFunctional(es.system, linalg.vecmat(functional.row, es.matrix.entries))


def dual_decompose(es: EigenSystem, functional: DualFunctional) -> SpectralDecomposition:
    """Coefficients ``⟨ℓ | Φ_i⟩`` with ``ℓ = Σ ⟨ℓ | Φ_i⟩ Φ'_i``."""
    values = linalg.vecmat(functional.row, es.change_of_basis)
    return SpectralDecomposition(
        tuple(
            SpectralTerm(label, lam, c)
            for label, lam, c in zip(es.labels, es.eigenvalues, values, strict=True)
            if c != 0
        )
    )


def dual_reconstruct(es: EigenSystem, decomposition: SpectralDecomposition) -> DualFunctional:
    row: list[Scalar] = [Fraction(0)] * es.dim
    for term in decomposition.terms:
        dual_row = es.dual[es.labels.index(term.label)]
        row = [x + term.coefficient * y for x, y in zip(row, dual_row, strict=True)]
    return DualFunctional(es.system, tuple(row))
