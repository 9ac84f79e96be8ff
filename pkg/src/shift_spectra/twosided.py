"""Two-sided full 2-shift: the tensor basis ``Φ_i ⊗ Ψ'_j``, the split
``V_L(ε) = Q₀ + εQ₁``, Jordan structure of the generalized eigenvalues
``2^{-k}`` and the perturbation coefficients ``A_k(λ)``.

The Ψ side reuses the Φ side verbatim: ``Ψ_m`` is ``Φ_m`` pulled back along
the index reversal ``(…, ω₋₁, ω₀) ↦ (ω₀, ω₋₁, …)``.
"""

from __future__ import annotations

import functools
import itertools
import warnings
from collections.abc import Callable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from shift_spectra import linalg
from shift_spectra.errors import (
    CrossCheckError,
    EngineError,
    PoleHitError,
    SpectrumWarning,
    TruncationError,
)
from shift_spectra.exactnum import (
    Poly,
    RationalFunction,
    Scalar,
    conj,
    format_scalar,
    lagrange_interpolate,
)
from shift_spectra.observables import (
    CylFun,
    PolyObservable,
    koopman_apply,
    pf_apply,
    walsh_function,
)
from shift_spectra.spectra import EigenSystem, decompose, eigen_system
from shift_spectra.symdyn import ShiftSystem, preset

TWO_SIDED_PRESET = "twosided-full2"


def eigenvalue_of_degree(k: int) -> Fraction:
    """``2^{-k}``, the ``Q₀`` eigenvalue on total degree ``k``."""
    return Fraction(1, 2**k)


# =============================================================================
# One-sided brackets
# =============================================================================


@functools.lru_cache(maxsize=8)
def _phi_engine(size: int) -> EigenSystem:
    return eigen_system(preset("full2-uniform"), size)


def phi_engine(n: int) -> EigenSystem:
    """Eigen system of the one-sided 2-shift covering ``Φ_0..Φ_n``."""
    return _phi_engine(8 * (n // 8 + 1))


def phi_poly(m: int) -> Poly:
    es = phi_engine(m)
    poly = es.eigenpoly(es.index_of(str(m)))
    assert isinstance(poly, PolyObservable)
    return poly.poly


def sign_twisted_pf(p: Poly) -> Poly:
    """``V₊((-1)^{ω₁} p(h)) = ½(p(h/2) - p((1+h)/2))``; lowers the degree by one."""
    half = Fraction(1, 2)
    return (p.compose_affine(0, half) - p.compose_affine(half, half)).scale(half)


@functools.lru_cache(maxsize=256)
def bracket_column(m: int) -> tuple[Scalar, ...]:
    """``(⟨Φ'_i | V₊(-1)^{ω₁} Φ_m⟩)_{i < m}``."""
    if m == 0:
        return ()
    es = phi_engine(m)
    image = sign_twisted_pf(phi_poly(m))
    decomposition = decompose(es, PolyObservable(es.system, image))
    return tuple(decomposition.coefficient(str(i)) for i in range(m))


def bracket(i: int, m: int) -> Scalar:
    """``⟨Φ'_i | V₊(-1)^{ω₁} Φ_m⟩``; zero unless ``i < m``."""
    if i >= m or i < 0:
        return Fraction(0)
    return bracket_column(m)[i]


def q1_matrix_element(m: int, n: int, m_prime: int, n_prime: int) -> Scalar:
    """``⟨Q₁^× Φ_m⊗Ψ'_n | Φ'_{m'}⊗Ψ_{n'}⟩``.

    The product of the Ψ-side bracket ``⟨Ψ'_n | V₋(-1)^{ω₀} Ψ_{n'}⟩`` and the
    conjugated Φ-side bracket ``⟨Φ'_{m'} | V₊(-1)^{ω₁} Φ_m⟩``; it vanishes
    unless ``m' < m`` and ``n' > n``.
    """
    if min(m, n, m_prime, n_prime) < 0:
        raise EngineError("tensor indices must be non-negative")
    psi_side = bracket(n, n_prime)
    phi_side = conj(bracket(m_prime, m))
    return psi_side * phi_side  # type: ignore[operator,return-value]


# =============================================================================
# Tensor coefficients and the truncated operator
# =============================================================================


@dataclass(frozen=True, order=True)
class TensorIndex:
    """``Φ_i ⊗ Ψ'_j``; total degree ``i + j``."""

    i: int
    j: int

    @property
    def degree(self) -> int:
        return self.i + self.j

    @property
    def eigenvalue(self) -> Fraction:
        return eigenvalue_of_degree(self.degree)


@dataclass(frozen=True)
class TensorCoeffs:
    """Finitely supported ``Σ c_{i,j} Φ_i⊗Ψ'_j`` inside the bounds ``i ≤ M, j ≤ N``."""

    M: int
    N: int
    coeffs: Mapping[TensorIndex, Scalar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned: dict[TensorIndex, Scalar] = {}
        for index, value in self.coeffs.items():
            if not (0 <= index.i <= self.M and 0 <= index.j <= self.N):
                raise TruncationError(f"{index} lies outside the truncation ({self.M}, {self.N})")
            if value != 0:
                cleaned[index] = value
        object.__setattr__(self, "coeffs", dict(sorted(cleaned.items())))

    @classmethod
    def delta(cls, i: int, j: int, M: int | None = None, N: int | None = None) -> TensorCoeffs:
        return cls(i if M is None else M, j if N is None else N, {TensorIndex(i, j): Fraction(1)})

    @classmethod
    def from_pairs(cls, pairs: Mapping[tuple[int, int], Scalar]) -> TensorCoeffs:
        M = max((i for i, _ in pairs), default=0)
        N = max((j for _, j in pairs), default=0)
        return cls(M, N, {TensorIndex(i, j): v for (i, j), v in pairs.items()})

    def get(self, index: TensorIndex) -> Scalar:
        return self.coeffs.get(index, Fraction(0))

    @property
    def support(self) -> tuple[TensorIndex, ...]:
        return tuple(self.coeffs)

    @property
    def max_i(self) -> int:
        return max((index.i for index in self.coeffs), default=0)

    @property
    def max_j(self) -> int:
        return max((index.j for index in self.coeffs), default=0)

    def degree_slice(self, k: int) -> TensorCoeffs:
        return TensorCoeffs(
            self.M, self.N, {ix: v for ix, v in self.coeffs.items() if ix.degree == k}
        )

    def widen(self, M: int, N: int) -> TensorCoeffs:
        return TensorCoeffs(M, N, self.coeffs)

    def __add__(self, other: TensorCoeffs) -> TensorCoeffs:
        M, N = max(self.M, other.M), max(self.N, other.N)
        keys = set(self.coeffs) | set(other.coeffs)
        return TensorCoeffs(M, N, {ix: self.get(ix) + other.get(ix) for ix in keys})

    def scale(self, factor: Scalar) -> TensorCoeffs:
        return TensorCoeffs(self.M, self.N, {ix: v * factor for ix, v in self.coeffs.items()})


def truncation_indices(M: int, N: int) -> tuple[TensorIndex, ...]:
    """Basis order: ``i`` major, ``j`` minor; ``Q₁^×`` is strictly upper triangular in it."""
    return tuple(TensorIndex(i, j) for i in range(M + 1) for j in range(N + 1))


def q1_column(source: TensorIndex, N: int) -> Iterator[tuple[TensorIndex, Scalar]]:
    """Nonzero entries ``B_{(i,j)←(m,n)}`` for ``j ≤ N``."""
    for i in range(source.i):
        phi_side = conj(bracket(i, source.i))
        if phi_side == 0:
            continue
        for j in range(source.j + 1, N + 1):
            value = bracket(source.j, j) * phi_side  # type: ignore[operator]
            if value != 0:
                yield TensorIndex(i, j), value


@dataclass(frozen=True)
class TwoSidedOperator:
    """Truncation of ``V_L(ε)``: ``D + ε·B`` on ``span{Φ_i⊗Ψ'_j : i ≤ M, j ≤ N}``."""

    epsilon: Scalar
    M: int
    N: int
    indices: tuple[TensorIndex, ...]
    matrix: linalg.Matrix

    def position(self, index: TensorIndex) -> int:
        return index.i * (self.N + 1) + index.j

    def entry(self, row: TensorIndex, column: TensorIndex) -> Scalar:
        return self.matrix[self.position(row)][self.position(column)]

    def sparse_entries(self) -> list[tuple[TensorIndex, TensorIndex, Scalar]]:
        return [
            (row, column, self.matrix[r][c])
            for r, row in enumerate(self.indices)
            for c, column in enumerate(self.indices)
            if self.matrix[r][c] != 0
        ]

    def eigenvalue_multiset(self) -> tuple[Scalar, ...]:
        """Sorted spectrum; the matrix is upper triangular so it is the diagonal."""
        if not linalg.is_upper_triangular(self.matrix):
            raise EngineError("truncated operator lost its triangular structure")
        return tuple(sorted((self.matrix[r][r] for r in range(len(self.indices))), reverse=True))


def build_operator(epsilon: Scalar, M: int, N: int) -> TwoSidedOperator:
    """Exact matrix of ``Q₀ + εQ₁^×`` on the truncation.

    Raises:
        EngineError: If an entry violates the strict triangularity of ``Q₁^×``.
    """
    if M < 0 or N < 0:
        raise EngineError("truncation bounds must be non-negative")
    indices = truncation_indices(M, N)
    size = len(indices)
    rows: list[list[Scalar]] = [[Fraction(0)] * size for _ in range(size)]
    position = {index: k for k, index in enumerate(indices)}
    for c, column in enumerate(indices):
        rows[c][c] = column.eigenvalue
        if epsilon == 0:
            continue
        for target, value in q1_column(column, N):
            if not (target.i < column.i and target.j > column.j):
                raise EngineError(f"Q1 entry {target} <- {column} breaks strict triangularity")
            rows[position[target]][c] = epsilon * value
    return TwoSidedOperator(epsilon, M, N, indices, linalg.as_matrix(rows))


# =============================================================================
# Jordan structure
# =============================================================================


@dataclass(frozen=True)
class JordanReport:
    k: int
    eigenvalue: Scalar
    algebraic: int
    geometric: int
    blocks: tuple[int, ...]
    truncation: tuple[int, int]
    stable: bool
    nullities: tuple[int, ...] = ()


def _jordan_structure(
    op: TwoSidedOperator, k: int
) -> tuple[int, int, tuple[int, ...], tuple[int, ...]]:
    lam = eigenvalue_of_degree(k)
    # B lowers i, so span{i ≤ k} is invariant and holds every diagonal 2^{-k}
    chosen = [op.position(ix) for ix in op.indices if ix.i <= k]
    shifted = linalg.shift_diagonal(linalg.submatrix(op.matrix, chosen), lam)
    algebraic = sum(1 for p in chosen if op.matrix[p][p] == lam)
    nullities = [0]
    power = linalg.identity(len(chosen))
    while nullities[-1] < algebraic:
        power = linalg.matmul(power, shifted)
        nullity = linalg.nullity(power)
        if nullity == nullities[-1]:
            raise EngineError("nullity sequence stalled below the algebraic multiplicity")
        nullities.append(nullity)
    at_least = [nullities[r] - nullities[r - 1] for r in range(1, len(nullities))]
    blocks: list[int] = []
    for r, count in enumerate(at_least, start=1):
        longer = at_least[r] if r < len(at_least) else 0
        blocks.extend([r] * (count - longer))
    geometric = nullities[1] if len(nullities) > 1 else 0
    return algebraic, geometric, tuple(sorted(blocks, reverse=True)), tuple(nullities[1:])


def jordan_analysis(op: TwoSidedOperator, k: int, check_stability: bool = True) -> JordanReport:
    """Multiplicities and Jordan blocks of ``2^{-k}`` from exact ranks of ``(A - λ)^r``.

    The stability flag recomputes with ``N + 2`` and compares.

    Raises:
        TruncationError: If the truncation misses part of degree ``k``.
    """
    if k < 0:
        raise EngineError("k must be non-negative")
    if op.M < k or op.N < k:
        raise TruncationError(f"truncation ({op.M}, {op.N}) does not contain degree {k}")
    algebraic, geometric, blocks, nullities = _jordan_structure(op, k)
    stable = True
    if check_stability:
        wider = build_operator(op.epsilon, op.M, op.N + 2)
        stable = _jordan_structure(wider, k)[:3] == (algebraic, geometric, blocks)
        if not stable:
            warnings.warn(
                f"Jordan structure of 2^-{k} changed when N grew from {op.N} to {op.N + 2}",
                SpectrumWarning,
                stacklevel=2,
            )
    return JordanReport(
        k=k,
        eigenvalue=eigenvalue_of_degree(k),
        algebraic=algebraic,
        geometric=geometric,
        blocks=blocks,
        truncation=(op.M, op.N),
        stable=stable,
        nullities=nullities,
    )


# =============================================================================
# Resolvents and perturbation coefficients
# =============================================================================


@dataclass(frozen=True)
class TensorResolvent:
    """``(λ - Q₀)⁻¹ f = Σ c_{m,n}/(λ - 2^{-(m+n)}) Φ_m⊗Ψ'_n``."""

    f: TensorCoeffs

    @property
    def poles(self) -> tuple[tuple[Fraction, TensorCoeffs], ...]:
        degrees = sorted({ix.degree for ix in self.f.support})
        return tuple((eigenvalue_of_degree(k), self.f.degree_slice(k)) for k in degrees)

    def component(self, index: TensorIndex) -> RationalFunction:
        return RationalFunction.simple_pole(index.eigenvalue, self.f.get(index))

    def evaluate(self, lam: Scalar) -> TensorCoeffs:
        for location, residue in self.poles:
            if location == lam:
                raise PoleHitError(f"λ = {format_scalar(lam)} is a pole", order=1, residue=residue)
        return TensorCoeffs(
            self.f.M,
            self.f.N,
            {ix: c / (lam - ix.eigenvalue) for ix, c in self.f.coeffs.items()},
        )


def resolvent_q0(f: TensorCoeffs) -> TensorResolvent:
    return TensorResolvent(f)


def apply_q0(f: TensorCoeffs) -> TensorCoeffs:
    return TensorCoeffs(f.M, f.N, {ix: c * ix.eigenvalue for ix, c in f.coeffs.items()})


def _closing_truncation(
    f: TensorCoeffs, g: TensorCoeffs, truncation: tuple[int, int] | None
) -> tuple[int, int]:
    needed = (max(f.max_i, g.max_i), max(f.max_j, g.max_j))
    if truncation is None:
        return needed
    if truncation[0] < needed[0] or truncation[1] < needed[1]:
        raise TruncationError(
            f"truncation {truncation} cannot close the sums; supports need at least {needed}"
        )
    return truncation


def _chain_factor(degrees: Sequence[int]) -> RationalFunction:
    return RationalFunction(
        Poly.constant(1), tuple((eigenvalue_of_degree(d), 1) for d in degrees)
    )


def _direct_chains(
    start: TensorIndex, steps: int, max_j: int
) -> Iterator[tuple[list[TensorIndex], Scalar]]:
    """Chains with ``i`` strictly decreasing and ``j`` strictly increasing, with the product
    of their ``Q₁`` matrix elements."""
    if steps == 0:
        yield [start], Fraction(1)
        return
    for i in range(start.i):
        for j in range(start.j + 1, max_j + 1):
            value = q1_matrix_element(start.i, start.j, i, j)
            if value == 0:
                continue
            for tail, product in _direct_chains(TensorIndex(i, j), steps - 1, max_j):
                yield [start, *tail], value * product


def perturbation_coefficient_direct(k: int, f: TensorCoeffs, g: TensorCoeffs) -> RationalFunction:
    """``A_k(λ)`` as the finite sum over the index set of decreasing ``i`` and increasing ``j``.

    Reads ``Q₁`` through :func:`q1_matrix_element` only.
    """
    total = RationalFunction.constant(0)
    for start, c in f.coeffs.items():
        for chain, product in _direct_chains(start, k, g.max_j):
            d = g.get(chain[-1])
            if d == 0:
                continue
            weight = c * conj(d) * product  # type: ignore[operator]
            total = total + _chain_factor([ix.degree for ix in chain]) * weight
    return total


def _apply_off_diagonal(
    op: TwoSidedOperator, vector: Mapping[TensorIndex, RationalFunction]
) -> dict[TensorIndex, RationalFunction]:
    out: dict[TensorIndex, RationalFunction] = {}
    for source, value in vector.items():
        c = op.position(source)
        # strictly upper triangular: targets sit above the diagonal
        for r in range(c):
            entry = op.matrix[r][c]
            if entry != 0:
                target = op.indices[r]
                out[target] = out.get(target, RationalFunction.constant(0)) + value * entry
    return out


def _matrix_route(
    unit: TwoSidedOperator, k: int, f: TensorCoeffs, g: TensorCoeffs
) -> RationalFunction:
    vector = {ix: RationalFunction.simple_pole(ix.eigenvalue, c) for ix, c in f.coeffs.items()}
    for _ in range(k):
        vector = {
            ix: value * RationalFunction.simple_pole(ix.eigenvalue)
            for ix, value in _apply_off_diagonal(unit, vector).items()
        }
    total = RationalFunction.constant(0)
    for ix, value in vector.items():
        d = g.get(ix)
        if d != 0:
            total = total + value * conj(d)  # type: ignore[operator]
    return total


def perturbation_coefficient_matrix(
    k: int, f: TensorCoeffs, g: TensorCoeffs, truncation: tuple[int, int] | None = None
) -> RationalFunction:
    """``A_k(λ)`` by alternating the diagonal resolvent and the off-diagonal part of the
    truncated matrix ``V_L(1)`` from :func:`build_operator`."""
    M, N = _closing_truncation(f, g, truncation)
    return _matrix_route(build_operator(Fraction(1), M, N), k, f, g)


def perturbation_coefficient(
    k: int, f: TensorCoeffs, g: TensorCoeffs, truncation: tuple[int, int] | None = None
) -> RationalFunction:
    """``A_k(λ) = ⟨(λ - Q₀)⁻¹(Q₁^×(λ - Q₀)⁻¹)^k f | g⟩``, computed two ways.

    Raises:
        TruncationError: If ``truncation`` is smaller than the supports of f, g.
        CrossCheckError: If the direct and matrix routes disagree, or if a pole
            shows up at ``1, …, 2^{-(k-1)}``.
    """
    if k < 0:
        raise EngineError("k must be non-negative")
    truncation = _closing_truncation(f, g, truncation)
    direct = perturbation_coefficient_direct(k, f, g)
    by_matrix = perturbation_coefficient_matrix(k, f, g, truncation)
    if direct != by_matrix:
        raise CrossCheckError(f"A_{k}: direct and matrix evaluations disagree")
    for lower in range(k):
        if direct.pole_order(eigenvalue_of_degree(lower)) != 0:
            raise CrossCheckError(f"A_{k} has a forbidden pole at 2^-{lower}")
    return direct


@dataclass(frozen=True)
class PoleOrderWitness:
    k: int
    order: int
    f: TensorCoeffs
    g: TensorCoeffs
    coefficient: RationalFunction


def pole_order_check(k: int) -> PoleOrderWitness:
    """Largest order of the pole ``2^{-k}`` of ``A_k`` over degree-``k`` deltas.

    Only chains that stay on total degree ``k`` can reach order ``k+1``, so
    ``f = δ_{(m, k-m)}`` and ``g = δ_{(i, k-i)}`` are searched.
    """
    if k < 0:
        raise EngineError("k must be non-negative")
    lam = eigenvalue_of_degree(k)
    best: PoleOrderWitness | None = None
    for m, i in itertools.product(range(k + 1), repeat=2):
        f = TensorCoeffs.delta(m, k - m, k, k)
        g = TensorCoeffs.delta(i, k - i, k, k)
        coefficient = perturbation_coefficient(k, f, g)
        order = coefficient.pole_order(lam)
        if best is None or order > best.order:
            best = PoleOrderWitness(k, order, f, g, coefficient)
    assert best is not None
    return best


@dataclass(frozen=True)
class ResolventSeries:
    """``⟨(λ - V_L(ε))⁻¹ f | g⟩ = Σ_k ε^k A_k(λ)`` on a truncation."""

    epsilon: Scalar
    terms: tuple[RationalFunction, ...]
    total: RationalFunction


def resolvent_series(
    epsilon: Scalar,
    f: TensorCoeffs,
    g: TensorCoeffs,
    truncation: tuple[int, int] | None = None,
    check_points: Sequence[Scalar] = (Fraction(2), Fraction(-1), Fraction(3, 5)),
) -> ResolventSeries:
    """Sum the perturbation series and verify it against ``(λ - A)x = c`` solved exactly.

    Raises:
        CrossCheckError: If the series differs from the direct solve at a check point.
    """
    M, N = _closing_truncation(f, g, truncation)
    terms: list[RationalFunction] = []
    total = RationalFunction.constant(0)
    unit = build_operator(Fraction(1), M, N)
    # Q1 lowers i at every step, so at most M steps survive
    for k in range(M + 1):
        term = _matrix_route(unit, k, f, g)
        terms.append(term)
        total = total + term * epsilon**k
    op = build_operator(epsilon, M, N)
    c = [f.get(ix) for ix in op.indices]
    for lam in check_points:
        if any(lam == op.matrix[r][r] for r in range(len(op.indices))):
            continue
        x = linalg.solve(linalg.scale(linalg.shift_diagonal(op.matrix, lam), Fraction(-1)), c)
        expected: Scalar = Fraction(0)
        for xi, ix in zip(x, op.indices, strict=True):
            expected = expected + xi * conj(g.get(ix))  # type: ignore[operator]
        if total.evaluate(lam) != expected:
            raise CrossCheckError(
                f"resolvent series differs from the direct solve at λ = {format_scalar(lam)}"
            )
    return ResolventSeries(epsilon, tuple(terms), total)


# =============================================================================
# Pointwise formulas on finitely supported sequences
# =============================================================================


@dataclass(frozen=True)
class TwoSidedPoint:
    """A two-sided 0/1 sequence with finitely many ones.

    ``plus`` holds ``ω₁, ω₂, …`` and ``minus`` holds ``ω₀, ω₋₁, …``; both
    continue with zeros.
    """

    plus: tuple[int, ...] = ()
    minus: tuple[int, ...] = ()

    def at(self, position: int) -> int:
        if position >= 1:
            k = position - 1
            return self.plus[k] if k < len(self.plus) else 0
        k = -position
        return self.minus[k] if k < len(self.minus) else 0

    def right_shift_with(self, symbol: int) -> TwoSidedPoint:
        """``η_j = ω_{j-1}`` except ``η₁ = symbol``."""
        return TwoSidedPoint((symbol, *self.plus), self.minus[1:])

    def left_shift_with(self, symbol: int) -> TwoSidedPoint:
        """``η_j = ω_{j+1}`` except ``η₀ = symbol``."""
        return TwoSidedPoint(self.plus[1:], (symbol, *self.minus))


TwoSidedFunction = Callable[[TwoSidedPoint], Scalar]


def binary_value(digits: Sequence[int]) -> Fraction:
    """``h`` of a finitely supported one-sided sequence."""
    return sum((Fraction(d, 2 ** (k + 1)) for k, d in enumerate(digits)), Fraction(0))


def product_function(plus: Poly, minus: Poly) -> TwoSidedFunction:
    """``ω ↦ plus(h(ω₊))·minus(h(i(ω₋)))``."""

    def evaluate(point: TwoSidedPoint) -> Scalar:
        value = plus(binary_value(point.plus)) * minus(binary_value(point.minus))
        return value  # type: ignore[return-value]

    return evaluate


def cylinder_product(plus: CylFun, minus: CylFun) -> TwoSidedFunction:
    """``ω ↦ plus(ω₁…)·minus(ω₀, ω₋₁, …)``."""

    def evaluate(point: TwoSidedPoint) -> Scalar:
        plus_word = tuple(point.at(p) for p in range(1, plus.depth + 1))
        minus_word = tuple(point.at(-p) for p in range(minus.depth))
        return plus(plus_word) * minus(minus_word)

    return evaluate


def q0_pointwise(f: TwoSidedFunction, point: TwoSidedPoint) -> Scalar:
    half = Fraction(1, 2)
    return half * f(point.right_shift_with(0)) + half * f(point.right_shift_with(1))


def q1_pointwise(f: TwoSidedFunction, point: TwoSidedPoint) -> Scalar:
    """``(Q₁f)(ω) = ½(-1)^{ω₀}[f(…ω₋₁.0, ω₁…) - f(…ω₋₁.1, ω₁…)]``."""
    sign = -1 if point.at(0) else 1
    return Fraction(sign, 2) * (f(point.right_shift_with(0)) - f(point.right_shift_with(1)))


def q1_adjoint_pointwise(f: TwoSidedFunction, point: TwoSidedPoint) -> Scalar:
    """``(Q₁*f)(ω) = ½(-1)^{ω₁}[f(…ω₀, 0.ω₂…) - f(…ω₀, 1.ω₂…)]``."""
    sign = -1 if point.at(1) else 1
    return Fraction(sign, 2) * (f(point.left_shift_with(0)) - f(point.left_shift_with(1)))


def _sample_digits(count: int) -> list[tuple[int, ...]]:
    """``count`` finite binary words with distinct values ``h``."""
    length = max(count - 1, 1).bit_length()
    return [tuple((t >> (length - 1 - b)) & 1 for b in range(length)) for t in range(count)]


def pointwise_bracket(m: int, side: str = "phi") -> tuple[Scalar, ...]:
    """Recover ``(⟨Φ'_i | V₊(-1)^{ω₁} Φ_m⟩)_{i<m}`` from pointwise values.

    ``side="phi"`` applies ``Q₁`` to ``Φ_m ⊗ 1`` at points with ``ω₀ = 0``;
    ``side="psi"`` applies ``Q₁*`` to ``1 ⊗ Ψ_m`` at points with ``ω₁ = 0``.
    The degree ``m-1`` polynomial is interpolated from ``m`` dyadic samples and
    expanded in the ``Φ`` basis.
    """
    if m == 0:
        return ()
    one = Poly.constant(1)
    samples: list[tuple[Scalar, Scalar]] = []
    for digits in _sample_digits(m):
        if side == "phi":
            point = TwoSidedPoint(plus=digits, minus=(0,))
            value = q1_pointwise(product_function(phi_poly(m), one), point)
        elif side == "psi":
            point = TwoSidedPoint(plus=(0,), minus=digits)
            value = q1_adjoint_pointwise(product_function(one, phi_poly(m)), point)
        else:
            raise EngineError(f"unknown side {side!r}")
        samples.append((binary_value(digits), value))
    poly = lagrange_interpolate(samples)
    es = phi_engine(m)
    decomposition = decompose(es, PolyObservable(es.system, poly))
    return tuple(decomposition.coefficient(str(i)) for i in range(m))


def q1_crosscheck(m: int, n: int, m_prime: int, n_prime: int) -> Scalar:
    """Matrix element rebuilt from pointwise brackets; must equal :func:`q1_matrix_element`.

    Raises:
        CrossCheckError: On disagreement.
    """
    phi_side = pointwise_bracket(m, "phi")
    psi_side = pointwise_bracket(n_prime, "psi")
    phi_value = phi_side[m_prime] if m_prime < m else Fraction(0)
    psi_value = psi_side[n] if n < n_prime else Fraction(0)
    rebuilt = psi_value * conj(phi_value)  # type: ignore[operator]
    expected = q1_matrix_element(m, n, m_prime, n_prime)
    if rebuilt != expected:
        raise CrossCheckError(
            f"Q1 element ({m},{n})->({m_prime},{n_prime}): pointwise {format_scalar(rebuilt)} "
            f"vs tensor {format_scalar(expected)}"
        )
    return rebuilt


def q1_tensor_factors(system: ShiftSystem, plus: CylFun, minus: CylFun) -> tuple[CylFun, CylFun]:
    """One-sided factors of ``Q₁(plus ⊗ minus)``.

    ``V₊((-1)^{ω₁}·plus)`` on the right half and ``(-1)^{x₁}·U(minus)`` on the
    reversed left half, where ``U`` is the one-sided Koopman operator.
    """
    twist = walsh_function(system, 1)
    plus_factor = pf_apply(system, twist * plus)
    minus_factor = twist * koopman_apply(system, minus)
    assert isinstance(plus_factor, CylFun)
    return plus_factor, minus_factor
