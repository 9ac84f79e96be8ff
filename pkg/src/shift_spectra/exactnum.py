"""Exact arithmetic kernel: ℚ, the real quadratic field ℚ(√d), polynomials and
rational functions in one variable.

ℚ is the standard :class:`fractions.Fraction`. ℚ(√d) is :class:`QuadExt`.
A *scalar* is either of the two; mixed arithmetic promotes the rational
operand into ``QuadExt`` with a zero √d part, which is lossless.
"""

from __future__ import annotations

import functools
import math
import operator
import re
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, TypeAlias, Union

from shift_spectra.errors import ConfigError, NotASquareError, PoleHitError

Rational = Fraction

DEFAULT_RADICAND = 5

ArithOp = Literal["+", "-", "*", "/"]


def _as_fraction(value: int | Fraction) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


@dataclass(frozen=True, slots=True)
class QuadExt:
    """The number ``a + b√d`` with rational ``a``, ``b`` and square-free ``d``."""

    a: Fraction
    b: Fraction = Fraction(0)
    d: int = DEFAULT_RADICAND

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _as_fraction(self.a))
        object.__setattr__(self, "b", _as_fraction(self.b))
        if self.d < 2:
            raise ValueError(f"radicand must be a square-free integer >= 2, got {self.d}")

    def _coerce(self, other: object) -> QuadExt | None:
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise ValueError(f"cannot mix √{self.d} and √{other.d}")
            return other
        if isinstance(other, int | Fraction):
            return QuadExt(Fraction(other), Fraction(0), self.d)
        return None

    # --- ring operations -------------------------------------------------

    def __add__(self, other: object) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __sub__(self, other: object) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other: object) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(
            self.a * o.a + self.d * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.d,
        )

    __rmul__ = __mul__

    def __neg__(self) -> QuadExt:
        return QuadExt(-self.a, -self.b, self.d)

    def __pos__(self) -> QuadExt:
        return self

    def conjugate(self) -> QuadExt:
        """Galois conjugate ``a - b√d``."""
        return QuadExt(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        """Field norm ``a² - d·b²``."""
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> QuadExt:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QuadExt division by zero")
        return QuadExt(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other: object) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> QuadExt:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, exponent: int) -> QuadExt:
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = QuadExt(Fraction(1), Fraction(0), self.d)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # --- order ------------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of ``a + b√d`` without floating point."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: the larger of a² and d·b² wins
        return sa if self.a * self.a > self.d * self.b * self.b else sb

    def _compare(self, other: object) -> int | None:
        o = self._coerce(other)
        if o is None:
            return None
        return (self - o).sign()

    def __lt__(self, other: object) -> bool:
        c = self._compare(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other: object) -> bool:
        c = self._compare(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other: object) -> bool:
        c = self._compare(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other: object) -> bool:
        c = self._compare(other)
        return NotImplemented if c is None else c >= 0

    def __abs__(self) -> QuadExt:
        return -self if self.sign() < 0 else self

    # --- equality and conversions ----------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QuadExt):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, int | Fraction):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def sqrt(self) -> QuadExt:
        """Exact non-negative square root inside ℚ(√d).

        Raises:
            NotASquareError: If the root is not an element of the field.
        """
        if self.sign() < 0:
            raise NotASquareError(f"{format_scalar(self)} is negative")
        if not self:
            return self
        if self.b == 0:
            try:
                return QuadExt(fraction_sqrt(self.a), Fraction(0), self.d)
            except NotASquareError:
                # (y√d)² = d·y²
                return QuadExt(Fraction(0), fraction_sqrt(self.a / self.d), self.d)
        # (x + y√d)² = (x² + d·y²) + 2xy√d
        root_norm = fraction_sqrt(self.norm())
        for candidate in (self.a + root_norm, self.a - root_norm):
            try:
                x = fraction_sqrt(candidate / 2)
            except NotASquareError:
                continue
            if x == 0:
                continue
            root = QuadExt(x, self.b / (2 * x), self.d)
            return abs(root)
        raise NotASquareError(f"{format_scalar(self)} is not a square in ℚ(√{self.d})")

    def __repr__(self) -> str:
        return f"QuadExt({format_scalar(self)})"


Scalar: TypeAlias = Union[Fraction, QuadExt]  # noqa: UP007

PHI = QuadExt(Fraction(1, 2), Fraction(1, 2))
"""The golden ratio (1+√5)/2."""


def phi_power(n: int) -> QuadExt:
    """Return φⁿ for any integer ``n``."""
    return PHI**n


def fraction_sqrt(value: Fraction) -> Fraction:
    """Exact square root of a non-negative rational.

    Raises:
        NotASquareError: If ``value`` is not the square of a rational.
    """
    value = _as_fraction(value)
    if value < 0:
        raise NotASquareError(f"{format_scalar(value)} is negative")
    num = math.isqrt(value.numerator)
    den = math.isqrt(value.denominator)
    if num * num != value.numerator or den * den != value.denominator:
        raise NotASquareError(f"{format_scalar(value)} is not a rational square")
    return Fraction(num, den)


def scalar_sqrt(value: Scalar) -> Scalar:
    """Exact square root in ℚ, falling back to ℚ(√5)."""
    if isinstance(value, QuadExt):
        return value.sqrt()
    try:
        return fraction_sqrt(value)
    except NotASquareError:
        return QuadExt(value).sqrt()


def sign(value: Scalar) -> int:
    """Exact sign of a scalar."""
    if isinstance(value, QuadExt):
        return value.sign()
    return (value > 0) - (value < 0)


def abs_scalar(value: Scalar) -> Scalar:
    return -value if sign(value) < 0 else value


def compare_scalars(x: Scalar, y: Scalar) -> int:
    """Three-way exact comparison, usable with :func:`functools.cmp_to_key`."""
    return sign(x - y)


scalar_key = functools.cmp_to_key(compare_scalars)


def to_scalar(value: int | Fraction | QuadExt) -> Scalar:
    if isinstance(value, QuadExt | Fraction):
        return value
    return Fraction(value)


def is_scalar(value: object) -> bool:
    return isinstance(value, Fraction | QuadExt | int) and not isinstance(value, bool)


_OPS: dict[str, Callable[[Scalar, Scalar], Scalar]] = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
}


def rational_arith(a: Fraction, b: Fraction, op: ArithOp) -> Fraction:
    """Exact reduced ``a op b`` in ℚ; division by zero raises ``ZeroDivisionError``."""
    result = _OPS[op](_as_fraction(a), _as_fraction(b))
    assert isinstance(result, Fraction)
    return result


def quad_arith(a: QuadExt, b: QuadExt, op: ArithOp) -> QuadExt:
    """Exact ``a op b`` in ℚ(√d); division uses the conjugate."""
    result = _OPS[op](a, b)
    assert isinstance(result, QuadExt)
    return result


# =============================================================================
# Serialization
# =============================================================================

_SCALAR_PATTERN = re.compile(
    r"^\s*(?P<an>[+-]?\d+)(?:/(?P<ad>\d+))?"
    r"(?:\s*(?P<bs>[+-])\s*(?P<bn>\d+)(?:/(?P<bd>\d+))?\s*(?:√|sqrt)(?P<d>\d+))?\s*$"
)


def format_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def format_scalar(value: Scalar | int) -> str:
    """Serialize a scalar: ``"num/den"`` for ℚ, ``"a/b+c/e√5"`` for ℚ(√5)."""
    if isinstance(value, QuadExt) and value.b != 0:
        b_sign = "-" if value.b < 0 else "+"
        return f"{format_fraction(value.a)}{b_sign}{format_fraction(abs(value.b))}√{value.d}"
    if isinstance(value, QuadExt):
        return format_fraction(value.a)
    return format_fraction(_as_fraction(value))


def parse_scalar(text: str) -> Scalar:
    """Parse the output of :func:`format_scalar` (also accepts ``3``, ``-1/2``).

    Raises:
        ConfigError: If the string is not a scalar literal.
    """
    match = _SCALAR_PATTERN.match(text)
    if match is None:
        raise ConfigError(f"not an exact scalar literal: {text!r}")
    a = Fraction(int(match["an"]), int(match["ad"] or 1))
    if match["bn"] is None:
        return a
    b = Fraction(int(match["bn"]), int(match["bd"] or 1))
    if match["bs"] == "-":
        b = -b
    return QuadExt(a, b, int(match["d"]))


# =============================================================================
# Complex scalars
# =============================================================================


@dataclass(frozen=True, slots=True)
class ComplexScalar:
    """``re + i·im`` with exact scalar components (for points on the unit circle)."""

    re: Scalar
    im: Scalar = Fraction(0)

    @staticmethod
    def of(value: ComplexScalar | Scalar | int) -> ComplexScalar:
        if isinstance(value, ComplexScalar):
            return value
        return ComplexScalar(to_scalar(value), Fraction(0))

    def __add__(self, other: ComplexScalar | Scalar | int) -> ComplexScalar:
        o = ComplexScalar.of(other)
        return ComplexScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: ComplexScalar | Scalar | int) -> ComplexScalar:
        o = ComplexScalar.of(other)
        return ComplexScalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: ComplexScalar | Scalar | int) -> ComplexScalar:
        return ComplexScalar.of(other) - self

    def __mul__(self, other: ComplexScalar | Scalar | int) -> ComplexScalar:
        o = ComplexScalar.of(other)
        return ComplexScalar(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __neg__(self) -> ComplexScalar:
        return ComplexScalar(-self.re, -self.im)

    def conjugate(self) -> ComplexScalar:
        return ComplexScalar(self.re, -self.im)

    def abs2(self) -> Scalar:
        """Squared modulus, an exact real scalar."""
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other: ComplexScalar | Scalar | int) -> ComplexScalar:
        o = ComplexScalar.of(other)
        denominator = o.abs2()
        if denominator == 0:
            raise ZeroDivisionError("complex division by zero")
        numerator = self * o.conjugate()
        return ComplexScalar(numerator.re / denominator, numerator.im / denominator)

    def __rtruediv__(self, other: ComplexScalar | Scalar | int) -> ComplexScalar:
        return ComplexScalar.of(other) / self

    def __pow__(self, exponent: int) -> ComplexScalar:
        if exponent < 0:
            return (ComplexScalar(Fraction(1)) / self) ** (-exponent)
        result = ComplexScalar(Fraction(1))
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ComplexScalar):
            return bool(self.re == other.re and self.im == other.im)
        if is_scalar(other):
            return bool(self.im == 0 and self.re == other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


def conj(value: ComplexScalar | Scalar) -> ComplexScalar | Scalar:
    """Complex conjugate; the identity on real scalars."""
    if isinstance(value, ComplexScalar):
        return value.conjugate()
    return value


# =============================================================================
# Polynomials
# =============================================================================


def _trim(coeffs: Iterable[Scalar]) -> tuple[Scalar, ...]:
    items = list(coeffs)
    while items and items[-1] == 0:
        items.pop()
    return tuple(items)


@dataclass(frozen=True)
class Poly:
    """Dense polynomial, ``coeffs[k]`` is the coefficient of ``x**k``.

    The highest stored coefficient is never zero; the zero polynomial has no
    coefficients and degree -1.
    """

    coeffs: tuple[Scalar, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _trim(to_scalar(c) for c in self.coeffs))

    @classmethod
    def of(cls, *coeffs: Scalar | int) -> Poly:
        return cls(tuple(to_scalar(c) for c in coeffs))

    @classmethod
    def constant(cls, value: Scalar | int) -> Poly:
        return cls((to_scalar(value),))

    @classmethod
    def monomial(cls, degree: int, coeff: Scalar | int = 1) -> Poly:
        return cls((Fraction(0),) * degree + (to_scalar(coeff),))

    @classmethod
    def zero(cls) -> Poly:
        return cls(())

    @classmethod
    def from_roots(cls, roots: Iterable[Scalar]) -> Poly:
        result = cls.constant(1)
        for root in roots:
            result = result * cls((-root, Fraction(1)))
        return result

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, k: int) -> Scalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    @property
    def leading(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def padded(self, size: int) -> list[Scalar]:
        """Coefficient list of exactly ``size`` entries."""
        if self.degree >= size:
            raise ValueError(f"degree {self.degree} does not fit in {size} coefficients")
        return [self.coefficient(k) for k in range(size)]

    def __add__(self, other: Poly | Scalar | int) -> Poly:
        o = other if isinstance(other, Poly) else Poly.constant(other)
        size = max(len(self.coeffs), len(o.coeffs))
        return Poly(tuple(self.coefficient(k) + o.coefficient(k) for k in range(size)))

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Poly | Scalar | int) -> Poly:
        o = other if isinstance(other, Poly) else Poly.constant(other)
        return self + (-o)

    def __rsub__(self, other: Poly | Scalar | int) -> Poly:
        return (-self) + other

    def __mul__(self, other: Poly | Scalar | int) -> Poly:
        if not isinstance(other, Poly):
            return self.scale(to_scalar(other))
        if self.is_zero() or other.is_zero():
            return Poly.zero()
        out: list[Scalar] = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def scale(self, factor: Scalar) -> Poly:
        return Poly(tuple(c * factor for c in self.coeffs))

    def __pow__(self, exponent: int) -> Poly:
        result = Poly.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __divmod__(self, divisor: Poly) -> tuple[Poly, Poly]:
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        remainder = list(self.coeffs)
        quotient: list[Scalar] = [Fraction(0)] * max(len(remainder) - divisor.degree, 0)
        lead = divisor.leading
        for k in range(len(remainder) - 1, divisor.degree - 1, -1):
            factor = remainder[k] / lead
            quotient[k - divisor.degree] = factor
            if factor == 0:
                continue
            for j, c in enumerate(divisor.coeffs):
                remainder[k - divisor.degree + j] = remainder[k - divisor.degree + j] - factor * c
        return Poly(tuple(quotient)), Poly(tuple(remainder[: divisor.degree]))

    def divide_linear(self, root: Scalar) -> tuple[Poly, Scalar]:
        """Synthetic division by ``(x - root)``: returns quotient and remainder."""
        if self.is_zero():
            return Poly.zero(), Fraction(0)
        acc: Scalar = Fraction(0)
        out: list[Scalar] = []
        for c in reversed(self.coeffs):
            acc = acc * root + c
            out.append(acc)
        remainder = out.pop()
        return Poly(tuple(reversed(out))), remainder

    def __call__(self, x: Scalar | ComplexScalar | int) -> Scalar | ComplexScalar:
        return poly_eval(self, x)

    def eval_complex(self, x: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def compose_affine(self, offset: Scalar | int, slope: Scalar | int) -> Poly:
        """The polynomial ``x ↦ p(offset + slope·x)``."""
        inner = Poly((to_scalar(offset), to_scalar(slope)))
        return self.compose(inner)

    def compose(self, inner: Poly) -> Poly:
        result = Poly.zero()
        for c in reversed(self.coeffs):
            result = result * inner + c
        return result

    def shift(self, a: Scalar) -> Poly:
        """The polynomial ``t ↦ p(t + a)``."""
        return self.compose_affine(a, 1)

    def derivative(self) -> Poly:
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def monic(self) -> Poly:
        if self.is_zero():
            raise ZeroDivisionError("zero polynomial has no monic form")
        return self.scale(1 / self.leading)

    def __repr__(self) -> str:
        return f"Poly({', '.join(format_scalar(c) for c in self.coeffs)})"


def poly_eval(p: Poly, x: Scalar | ComplexScalar | int) -> Scalar | ComplexScalar:
    """Exact Horner evaluation."""
    if isinstance(x, ComplexScalar):
        cacc = ComplexScalar(Fraction(0))
        for c in reversed(p.coeffs):
            cacc = cacc * x + c
        return cacc
    acc: Scalar = Fraction(0)
    point = to_scalar(x)
    for c in reversed(p.coeffs):
        acc = acc * point + c
    return acc


def lagrange_interpolate(points: Sequence[tuple[Scalar, Scalar]]) -> Poly:
    """Exact interpolating polynomial through distinct nodes."""
    result = Poly.zero()
    for i, (xi, yi) in enumerate(points):
        basis = Poly.constant(1)
        denominator: Scalar = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            basis = basis * Poly((-xj, Fraction(1)))
            denominator = denominator * (xi - xj)
        result = result + basis.scale(yi / denominator)
    return result


# =============================================================================
# Rational functions
# =============================================================================

Pole: TypeAlias = tuple[Scalar, int]


def _sorted_poles(orders: dict[Scalar, int]) -> tuple[Pole, ...]:
    keyed = sorted(orders.items(), key=lambda item: scalar_key(item[0]), reverse=True)
    return tuple((loc, order) for loc, order in keyed if order > 0)


@dataclass(frozen=True)
class PartialFractionTerm:
    """``Σ_s residues[s-1] / (λ - pole)^s`` for ``s = 1..order``."""

    pole: Scalar
    order: int
    residues: tuple[Scalar, ...]


@dataclass(frozen=True)
class PartialFractions:
    """Partial-fraction form: polynomial part plus one term per pole."""

    polynomial: Poly
    terms: tuple[PartialFractionTerm, ...]

    def to_rational_function(self) -> RationalFunction:
        total = RationalFunction.from_poly(self.polynomial)
        for term in self.terms:
            for s, residue in enumerate(term.residues, start=1):
                if residue != 0:
                    total = total + RationalFunction(Poly.constant(residue), ((term.pole, s),))
        return total

    def evaluate(self, lam: Scalar | ComplexScalar | int) -> Scalar | ComplexScalar:
        """Exact evaluation summing residues term by term."""
        point = lam if isinstance(lam, ComplexScalar) else to_scalar(lam)
        for term in self.terms:
            if point == term.pole:
                raise PoleHitError(
                    f"evaluation at pole {format_scalar(term.pole)}", order=term.order
                )
        total = poly_eval(self.polynomial, point)
        for term in self.terms:
            offset = point - term.pole
            for s, residue in enumerate(term.residues, start=1):
                total = total + residue / offset**s
        return total


@dataclass(frozen=True)
class RationalFunction:
    """``numerator(λ) / Π (λ - a)^r`` stored factored by its poles.

    The form is canonical: no pole location repeats, the numerator never
    vanishes at a listed pole, and the zero function has no poles.
    """

    numerator: Poly
    poles: tuple[Pole, ...] = ()

    def __post_init__(self) -> None:
        orders: dict[Scalar, int] = {}
        for loc, order in self.poles:
            if order < 0:
                raise ValueError("pole orders must be non-negative")
            orders[loc] = orders.get(loc, 0) + order
        numerator = self.numerator
        if numerator.is_zero():
            orders = {}
        for loc in list(orders):
            while orders[loc] > 0:
                quotient, remainder = numerator.divide_linear(loc)
                if remainder != 0:
                    break
                numerator = quotient
                orders[loc] -= 1
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "poles", _sorted_poles(orders))

    @classmethod
    def from_poly(cls, p: Poly) -> RationalFunction:
        return cls(p, ())

    @classmethod
    def constant(cls, value: Scalar | int) -> RationalFunction:
        return cls(Poly.constant(value), ())

    @classmethod
    def simple_pole(cls, location: Scalar, coeff: Scalar | int = 1) -> RationalFunction:
        """``coeff / (λ - location)``."""
        return cls(Poly.constant(coeff), ((location, 1),))

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def pole_order(self, location: Scalar) -> int:
        for loc, order in self.poles:
            if loc == location:
                return order
        return 0

    def denominator(self) -> Poly:
        result = Poly.constant(1)
        for loc, order in self.poles:
            result = result * Poly((-loc, Fraction(1))) ** order
        return result

    def _over(self, orders: dict[Scalar, int]) -> Poly:
        """Numerator rewritten over the common denominator ``orders``."""
        mine = dict(self.poles)
        numerator = self.numerator
        for loc, order in orders.items():
            missing = order - mine.get(loc, 0)
            if missing:
                numerator = numerator * Poly((-loc, Fraction(1))) ** missing
        return numerator

    def __add__(self, other: RationalFunction | Scalar | int) -> RationalFunction:
        o = other if isinstance(other, RationalFunction) else RationalFunction.constant(other)
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        orders = dict(self.poles)
        for loc, order in o.poles:
            orders[loc] = max(orders.get(loc, 0), order)
        return RationalFunction(self._over(orders) + o._over(orders), tuple(orders.items()))

    __radd__ = __add__

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.numerator, self.poles)

    def __sub__(self, other: RationalFunction | Scalar | int) -> RationalFunction:
        o = other if isinstance(other, RationalFunction) else RationalFunction.constant(other)
        return self + (-o)

    def __mul__(self, other: RationalFunction | Scalar | int) -> RationalFunction:
        if not isinstance(other, RationalFunction):
            return RationalFunction(self.numerator.scale(to_scalar(other)), self.poles)
        return RationalFunction(self.numerator * other.numerator, self.poles + other.poles)

    __rmul__ = __mul__

    def evaluate(self, lam: Scalar | ComplexScalar | int) -> Scalar | ComplexScalar:
        """Exact value at ``lam``.

        Raises:
            PoleHitError: If ``lam`` is one of the poles (carries the order).
        """
        point = lam if isinstance(lam, ComplexScalar) else to_scalar(lam)
        for loc, order in self.poles:
            if point == loc:
                raise PoleHitError(f"evaluation at pole {format_scalar(loc)}", order=order)
        value = poly_eval(self.numerator, point)
        for loc, order in self.poles:
            value = value / (point - loc) ** order
        return value

    def evaluate_float(self, lam: complex) -> complex:
        for loc, order in self.poles:
            if lam == float(loc):
                raise PoleHitError(f"evaluation at pole {format_scalar(loc)}", order=order)
        value = self.numerator.eval_complex(lam)
        for loc, order in self.poles:
            value /= (lam - float(loc)) ** order
        return value

    def partial_fractions(self) -> PartialFractions:
        """Decompose into polynomial part plus ``Σ c/(λ-a)^s`` terms."""
        polynomial, _ = divmod(self.numerator, self.denominator())
        terms: list[PartialFractionTerm] = []
        for loc, order in self.poles:
            shifted_num = self.numerator.shift(loc)
            shifted_den = Poly.constant(1)
            for other_loc, other_order in self.poles:
                if other_loc == loc:
                    continue
                shifted_den = shifted_den * Poly((loc - other_loc, Fraction(1))) ** other_order
            series = _series_divide(shifted_num, shifted_den, order)
            # coefficient of (λ-a)^{-s} is the Taylor coefficient of order (order - s)
            residues = tuple(series[order - s] for s in range(1, order + 1))
            terms.append(PartialFractionTerm(pole=loc, order=order, residues=residues))
        return PartialFractions(polynomial=polynomial, terms=tuple(terms))

    def __repr__(self) -> str:
        poles = ", ".join(f"{format_scalar(loc)}^{order}" for loc, order in self.poles)
        return f"RationalFunction({self.numerator!r} / [{poles}])"


def _series_divide(numerator: Poly, denominator: Poly, terms: int) -> list[Scalar]:
    """First ``terms`` Taylor coefficients at 0 of ``numerator/denominator``."""
    d0 = denominator.coefficient(0)
    out: list[Scalar] = []
    for s in range(terms):
        acc = numerator.coefficient(s)
        for j in range(1, s + 1):
            acc = acc - denominator.coefficient(j) * out[s - j]
        out.append(acc / d0)
    return out


def ratfun_eval(
    r: RationalFunction | PartialFractions, lam: Scalar | ComplexScalar | complex | float
) -> Scalar | ComplexScalar | complex:
    """Evaluate exactly for exact ``lam``, in floating point for ``float``/``complex``."""
    if isinstance(lam, complex | float):
        if isinstance(r, PartialFractions):
            r = r.to_rational_function()
        return r.evaluate_float(complex(lam))
    return r.evaluate(lam)
