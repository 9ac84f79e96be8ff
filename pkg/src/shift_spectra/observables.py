"""Finite-rank function spaces on shift spaces and the operator actions on them.

Three kinds of observable live here:

- :class:`CylFun`, a locally constant function of the first ``depth`` symbols;
- :class:`PolyObservable`, ``ω ↦ p(h(ω))`` for a polynomial ``p`` in the coding
  variable;
- :class:`BlockObservable`, ``Σ_j 1_{C[j]}·q_j(h)``, the golden-mean test space.

Integrals are exact: every integrand is reduced to pieces ``1_{C[w]}·p(h)`` and
each piece is integrated with the per-symbol moment table.
"""

from __future__ import annotations

import functools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from shift_spectra.errors import EngineError, ObservableKindError
from shift_spectra.exactnum import ComplexScalar, Poly, Scalar
from shift_spectra.symdyn import ShiftSystem, Word, block_moments, cylinder_measure


# =============================================================================
# Observable types
# =============================================================================


@dataclass(frozen=True, eq=False)
class CylFun:
    """Function of ``ω₁..ω_depth``; words missing from ``values`` map to 0."""

    system: ShiftSystem
    depth: int
    values: Mapping[Word, Scalar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned: dict[Word, Scalar] = {}
        for word, value in self.values.items():
            if len(word) != self.depth:
                raise ValueError(f"word {word} does not have depth {self.depth}")
            if value != 0 and self.system.is_admissible(word):
                cleaned[tuple(word)] = value
        object.__setattr__(self, "values", cleaned)

    @classmethod
    def constant(cls, system: ShiftSystem, value: Scalar | int) -> CylFun:
        return cls(system, 0, {(): Fraction(value) if isinstance(value, int) else value})

    @classmethod
    def indicator(cls, system: ShiftSystem, word: Word) -> CylFun:
        """``1_{C[word]}``."""
        return cls(system, len(word), {tuple(word): Fraction(1)})

    def __call__(self, word: Word) -> Scalar:
        """Value on any word at least ``depth`` long."""
        return self.values.get(tuple(word[: self.depth]), Fraction(0))

    def refine(self, depth: int) -> CylFun:
        if depth < self.depth:
            raise ValueError("refinement cannot lower the depth")
        if depth == self.depth:
            return self
        return CylFun(self.system, depth, {w: self(w) for w in self.system.words(depth)})

    def __add__(self, other: CylFun) -> CylFun:
        depth = max(self.depth, other.depth)
        a, b = self.refine(depth), other.refine(depth)
        keys = set(a.values) | set(b.values)
        return CylFun(self.system, depth, {w: a(w) + b(w) for w in keys})

    def __sub__(self, other: CylFun) -> CylFun:
        return self + other.scale(Fraction(-1))

    def scale(self, factor: Scalar) -> CylFun:
        return CylFun(self.system, self.depth, {w: v * factor for w, v in self.values.items()})

    def __mul__(self, other: CylFun) -> CylFun:
        depth = max(self.depth, other.depth)
        a, b = self.refine(depth), other.refine(depth)
        return CylFun(self.system, depth, {w: v * b(w) for w, v in a.values.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CylFun):
            return NotImplemented
        depth = max(self.depth, other.depth)
        return self.refine(depth).values == other.refine(depth).values

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class PolyObservable:
    """``ω ↦ poly(h(ω))``."""

    system: ShiftSystem
    poly: Poly

    @property
    def degree(self) -> int:
        return self.poly.degree

    def __add__(self, other: PolyObservable) -> PolyObservable:
        return PolyObservable(self.system, self.poly + other.poly)

    def __sub__(self, other: PolyObservable) -> PolyObservable:
        return PolyObservable(self.system, self.poly - other.poly)

    def scale(self, factor: Scalar) -> PolyObservable:
        return PolyObservable(self.system, self.poly.scale(factor))

    def as_block(self) -> BlockObservable:
        return BlockObservable(self.system, (self.poly,) * self.system.beta)


@dataclass(frozen=True)
class BlockObservable:
    """``Σ_j 1_{C[j]}·blocks[j](h)``; for the golden-mean system ``blocks = (q₀, q₁)``."""

    system: ShiftSystem
    blocks: tuple[Poly, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) != self.system.beta:
            raise ValueError("need one polynomial per symbol")

    @property
    def q0(self) -> Poly:
        return self.blocks[0]

    @property
    def q1(self) -> Poly:
        return self.blocks[1]

    @property
    def degree(self) -> int:
        return max(q.degree for q in self.blocks)

    def __add__(self, other: BlockObservable) -> BlockObservable:
        return BlockObservable(
            self.system, tuple(a + b for a, b in zip(self.blocks, other.blocks, strict=True))
        )

    def __sub__(self, other: BlockObservable) -> BlockObservable:
        return self + other.scale(Fraction(-1))

    def scale(self, factor: Scalar) -> BlockObservable:
        return BlockObservable(self.system, tuple(q.scale(factor) for q in self.blocks))

    def is_zero(self) -> bool:
        return all(q.is_zero() for q in self.blocks)


def constant_observable(system: ShiftSystem) -> PolyObservable | BlockObservable:
    """The constant 1 in the system's polynomial test space."""
    one = PolyObservable(system, Poly.constant(1))
    return one.as_block() if system.is_golden_mean else one


# =============================================================================
# Perron-Frobenius and Koopman actions
# =============================================================================


def _pf_poly(sys: ShiftSystem, p: Poly) -> Poly:
    coding = sys.coding_map
    out = Poly.zero()
    for i, weight in enumerate(sys.measure.probabilities):
        out = out + p.compose_affine(coding.offsets[i], coding.scales[i]).scale(weight)
    return out


def _pf_blocks(sys: ShiftSystem, blocks: tuple[Poly, ...]) -> tuple[Poly, ...]:
    coding = sys.coding_map
    out: list[Poly] = []
    for j in range(sys.beta):
        acc = Poly.zero()
        for i in range(sys.beta):
            if sys.adjacency[i][j]:
                image = blocks[i].compose_affine(coding.offsets[i], coding.scales[i])
                acc = acc + image.scale(sys.backward_weight(i, j))
        out.append(acc)
    return tuple(out)


def _pf_cylfun(sys: ShiftSystem, f: CylFun) -> CylFun:
    new_depth = max(f.depth - 1, 0 if sys.is_bernoulli else 1)
    values: dict[Word, Scalar] = {}
    for v in sys.words(new_depth):
        acc: Scalar = Fraction(0)
        for i in range(sys.beta):
            if v and not sys.adjacency[i][v[0]]:
                continue
            if sys.is_bernoulli:
                weight = sys.measure.probabilities[i]
            else:
                weight = sys.backward_weight(i, v[0])
            acc = acc + weight * f((i, *v))
        values[v] = acc
    return CylFun(sys, new_depth, values)


def pf_apply(
    sys: ShiftSystem, f: CylFun | PolyObservable | BlockObservable
) -> CylFun | PolyObservable | BlockObservable:
    """Exact image of ``f`` under the Perron-Frobenius operator.

    ``(Vf)(ω) = Σ_i w(i, ω₁)·f(i*ω)`` with weights ``p_i`` (Bernoulli) or
    ``π_i p_{iω₁} / π_{ω₁}`` (Markov).

    Raises:
        ObservableKindError: If ``f`` is not in this system's test space.
    """
    if isinstance(f, CylFun):
        return _pf_cylfun(sys, f)
    if isinstance(f, PolyObservable):
        if not sys.is_bernoulli:
            raise ObservableKindError(
                "V does not preserve polynomials in h on a Markov system; use as_block()"
            )
        return PolyObservable(sys, _pf_poly(sys, f.poly))
    if not sys.is_golden_mean:
        raise ObservableKindError("block observables belong to the golden-mean system")
    return BlockObservable(sys, _pf_blocks(sys, f.blocks))


def koopman_apply(sys: ShiftSystem, f: CylFun) -> CylFun:
    """``(Uf)(ω) = f(σω)``; the depth grows by one."""
    values = {
        (i, *w): value
        for w, value in f.values.items()
        for i in range(sys.beta)
        if sys.is_admissible((i, *w))
    }
    return CylFun(sys, f.depth + 1, values)


# =============================================================================
# Exact integration
# =============================================================================


@functools.lru_cache(maxsize=64)
def _moment_table(sys: ShiftSystem, nmax: int) -> tuple[tuple[Scalar, ...], ...]:
    return tuple(block_moments(sys, nmax))


def moment_table(sys: ShiftSystem, nmax: int) -> tuple[tuple[Scalar, ...], ...]:
    """``table[n][j] = ∫_{C[j]} hⁿ dμ`` (cached, grown in steps of 16)."""
    size = 16 * (nmax // 16 + 1)
    return _moment_table(sys, size)


def cylinder_integral(sys: ShiftSystem, word: Word, p: Poly) -> Scalar:
    """Exact ``∫_{C[word]} p(h) dμ``.

    On ``C[w]`` with last symbol ``j``, ``h = a + s·h(σ^{r-1}ω)`` where
    ``(a, s)`` is the affine map of ``w`` without its last symbol, and the
    conditional measure is ``μ(C[w])/π_j`` times ``μ`` on ``C[j]``.
    """
    if p.is_zero():
        return Fraction(0)
    table = moment_table(sys, max(p.degree, 0))
    if not word:
        return sum(
            (c * table[k][j] for k, c in enumerate(p.coeffs) for j in range(sys.beta)),
            Fraction(0),
        )
    offset, scale = sys.coding_map.word_affine(word[:-1])
    q = p.compose_affine(offset, scale)
    last = word[-1]
    factor = cylinder_measure(sys, word) / sys.measure.initial_probability(last)
    return factor * sum((c * table[k][last] for k, c in enumerate(q.coeffs)), Fraction(0))


def _pieces(f: CylFun | PolyObservable | BlockObservable) -> tuple[int, dict[Word, Poly]]:
    if isinstance(f, CylFun):
        return f.depth, {w: Poly.constant(v) for w, v in f.values.items()}
    if isinstance(f, PolyObservable):
        return 0, {(): f.poly}
    return 1, {(j,): q for j, q in enumerate(f.blocks) if not q.is_zero()}


def _refine_pieces(
    sys: ShiftSystem, depth: int, target: int, pieces: dict[Word, Poly]
) -> dict[Word, Poly]:
    if depth == target:
        return pieces
    out: dict[Word, Poly] = {}
    for w in sys.words(target):
        q = pieces.get(w[:depth])
        if q is not None:
            out[w] = q
    return out


def inner_product(
    sys: ShiftSystem,
    f: CylFun | PolyObservable | BlockObservable,
    g: CylFun | PolyObservable | BlockObservable,
) -> Scalar:
    """Exact ``∫ f·conj(g) dμ`` for any mix of observable kinds."""
    df, pf = _pieces(f)
    dg, pg = _pieces(g)
    depth = max(df, dg)
    pf = _refine_pieces(sys, df, depth, pf)
    pg = _refine_pieces(sys, dg, depth, pg)
    total: Scalar = Fraction(0)
    for w, p in pf.items():
        q = pg.get(w)
        if q is None:
            continue
        # coefficients are real, so conj(g) == g
        total = total + cylinder_integral(sys, w, p * q)
    return total


def integral(sys: ShiftSystem, f: CylFun | PolyObservable | BlockObservable) -> Scalar:
    return inner_product(sys, f, CylFun.constant(sys, 1))


# =============================================================================
# Walsh systems
# =============================================================================


@dataclass(frozen=True)
class WalshIndex:
    """``W_n = Π_k ψ_{s_k}(ω_k)`` where ``s_k`` are the base-``beta`` digits of ``n``."""

    n: int
    beta: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("Walsh index must be non-negative")

    def digits(self) -> tuple[int, ...]:
        """Digits ``s₁, s₂, …`` least significant first; empty for ``n = 0``."""
        out: list[int] = []
        n = self.n
        while n:
            n, s = divmod(n, self.beta)
            out.append(s)
        return tuple(out)


@dataclass(frozen=True)
class WalshSystem:
    """Orthogonal one-letter functions ``ψ_0 = 1, ψ_1, …`` for a Bernoulli measure.

    Built by exact Gram-Schmidt on ``1, 1_{0}, 1_{1}, …``; each ``ψ_s`` is scaled
    so its first nonzero value is 1, and squared norms are kept exactly.
    """

    system: ShiftSystem
    psi: tuple[tuple[Scalar, ...], ...]
    norms2: tuple[Scalar, ...]

    @classmethod
    def for_system(cls, sys: ShiftSystem) -> WalshSystem:
        if not sys.is_bernoulli:
            raise ObservableKindError("Walsh systems need a Bernoulli measure")
        p = sys.measure.probabilities
        beta = sys.beta

        def dot(u: tuple[Scalar, ...], v: tuple[Scalar, ...]) -> Scalar:
            return sum((pa * a * b for pa, a, b in zip(p, u, v, strict=True)), Fraction(0))

        basis: list[tuple[Scalar, ...]] = [(Fraction(1),) * beta]
        norms: list[Scalar] = [Fraction(1)]
        for a in range(beta - 1):
            v: tuple[Scalar, ...] = tuple(Fraction(int(a == b)) for b in range(beta))
            for u, nu in zip(basis, norms, strict=True):
                coeff = dot(v, u) / nu
                v = tuple(x - coeff * y for x, y in zip(v, u, strict=True))
            lead = next(x for x in v if x != 0)
            v = tuple(x / lead for x in v)
            basis.append(v)
            norms.append(dot(v, v))
        return cls(sys, tuple(basis), tuple(norms))

    def mean(self, s: int) -> Scalar:
        """``⟨ψ_s, 1⟩``: 1 for ``s = 0`` and 0 otherwise."""
        return sum(
            (pa * x for pa, x in zip(self.system.measure.probabilities, self.psi[s], strict=True)),
            Fraction(0),
        )

    def norm2(self, index: WalshIndex) -> Scalar:
        out: Scalar = Fraction(1)
        for s in index.digits():
            out = out * self.norms2[s]
        return out

    def function(self, index: WalshIndex) -> CylFun:
        """``W_n`` as a cylinder function of depth ``len(digits)``."""
        digits = index.digits()
        values: dict[Word, Scalar] = {}
        for w in self.system.words(len(digits)):
            v: Scalar = Fraction(1)
            for s, symbol in zip(digits, w, strict=True):
                v = v * self.psi[s][symbol]
            values[w] = v
        return CylFun(self.system, len(digits), values)


def walsh_function(sys: ShiftSystem, n: int) -> CylFun:
    return WalshSystem.for_system(sys).function(WalshIndex(n, sys.beta))


def walsh_pf_rule(sys: ShiftSystem, n: WalshIndex | int) -> WalshIndex | None:
    """``V W_n = W_{n/β}`` if ``β | n`` and 0 otherwise (``None`` marks zero)."""
    index = n if isinstance(n, WalshIndex) else WalshIndex(n, sys.beta)
    walsh = WalshSystem.for_system(sys)
    digits = index.digits()
    if digits and walsh.mean(digits[0]) == 0:
        return None
    return WalshIndex(index.n // sys.beta, sys.beta)


def walsh_koopman_rule(sys: ShiftSystem, n: WalshIndex | int) -> WalshIndex:
    """``U W_n = W_{βn}``."""
    index = n if isinstance(n, WalshIndex) else WalshIndex(n, sys.beta)
    return WalshIndex(index.n * sys.beta, sys.beta)


@dataclass(frozen=True)
class WalshSeries:
    """``sqrt(scale2) · Σ coeffs[n] W_n``, kept exact without taking the root."""

    system: ShiftSystem
    coeffs: Mapping[int, ComplexScalar]
    scale2: Scalar = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", {n: c for n, c in self.coeffs.items() if c != 0})

    def multiply(self, z: ComplexScalar) -> WalshSeries:
        return WalshSeries(self.system, {n: c * z for n, c in self.coeffs.items()}, self.scale2)

    def __sub__(self, other: WalshSeries) -> WalshSeries:
        if self.scale2 != other.scale2:
            raise ValueError("series must share the common scale")
        keys = set(self.coeffs) | set(other.coeffs)
        zero = ComplexScalar(Fraction(0))
        return WalshSeries(
            self.system,
            {n: self.coeffs.get(n, zero) - other.coeffs.get(n, zero) for n in keys},
            self.scale2,
        )

    def apply_pf(self) -> WalshSeries:
        out: dict[int, ComplexScalar] = {}
        for n, c in self.coeffs.items():
            image = walsh_pf_rule(self.system, n)
            if image is not None:
                out[image.n] = out.get(image.n, ComplexScalar(Fraction(0))) + c
        return WalshSeries(self.system, out, self.scale2)

    def norm2(self, walsh: WalshSystem) -> Scalar:
        """``Σ |c_n|²·‖W_n‖²`` times ``scale2`` (Walsh functions are orthogonal)."""
        total: Scalar = Fraction(0)
        for n, c in self.coeffs.items():
            total = total + c.abs2() * walsh.norm2(WalshIndex(n, self.system.beta))
        return total * self.scale2


def approximate_eigenfunction(sys: ShiftSystem, z: ComplexScalar, n: int) -> WalshSeries:
    """``f_n = n^{-1/2} Σ_{k<n} z^k W_{β^k}/‖W_{β^k}‖``."""
    walsh = WalshSystem.for_system(sys)
    norm2 = walsh.norm2(WalshIndex(sys.beta, sys.beta))
    coeffs = {sys.beta**k: z**k for k in range(n)}
    return WalshSeries(sys, coeffs, 1 / (n * norm2))


def approx_eigenfunction_defect(sys: ShiftSystem, z: ComplexScalar, n: int) -> Scalar:
    """Exact squared defect ``‖(z - V)f_n‖²`` from the Walsh representation.

    Raises:
        EngineError: If ``z`` is not exactly on the unit circle, equals 1, or
            ``n < 1``.
    """
    if n < 1:
        raise EngineError("n must be at least 1")
    if z.abs2() != 1:
        raise EngineError("z must lie exactly on the unit circle")
    if z == ComplexScalar(Fraction(1)):
        raise EngineError("z = 1 is an eigenvalue, not a point of the continuous spectrum")
    f = approximate_eigenfunction(sys, z, n)
    defect = f.multiply(z) - f.apply_pf()
    return defect.norm2(WalshSystem.for_system(sys))


def series_to_cylfun(series: WalshSeries, terms: Iterable[int] | None = None) -> CylFun:
    """Cylinder function of ``Σ coeffs[n]·W_n`` for real coefficients (scale dropped)."""
    walsh = WalshSystem.for_system(series.system)
    out = CylFun.constant(series.system, 0)
    for n in terms if terms is not None else sorted(series.coeffs):
        c = series.coeffs[n]
        if not c.is_real:
            raise ObservableKindError("complex Walsh coefficients have no real cylinder form")
        out = out + walsh.function(WalshIndex(n, series.system.beta)).scale(c.re)
    return out
