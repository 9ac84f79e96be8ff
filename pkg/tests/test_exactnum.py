"""Tests for exact scalars, polynomials and rational functions."""

from fractions import Fraction

import pytest

from shift_spectra.errors import ConfigError, NotASquareError, PoleHitError
from shift_spectra.exactnum import (
    PHI,
    ComplexScalar,
    Poly,
    QuadExt,
    RationalFunction,
    format_scalar,
    fraction_sqrt,
    lagrange_interpolate,
    parse_scalar,
    poly_eval,
    quad_arith,
    rational_arith,
    ratfun_eval,
    scalar_sqrt,
    sign,
)


class TestRationalArith:
    """Tests for exact arithmetic in ℚ."""

    def test_addition(self) -> None:
        """Test that fractions add to the reduced sum."""
        assert rational_arith(Fraction(1, 2), Fraction(1, 3), "+") == Fraction(5, 6)

    def test_zero_absorbs(self) -> None:
        """Test multiplication by zero."""
        assert rational_arith(Fraction(1, 2), Fraction(0), "*") == Fraction(0, 1)

    def test_self_division(self) -> None:
        """Test that x / x is one."""
        assert rational_arith(Fraction(3, 4), Fraction(3, 4), "/") == 1

    def test_division_by_zero(self) -> None:
        """Test that division by zero raises its own error."""
        with pytest.raises(ZeroDivisionError):
            rational_arith(Fraction(1), Fraction(0), "/")


class TestQuadExt:
    """Tests for arithmetic in ℚ(√5)."""

    def test_phi_squared(self) -> None:
        """Test φ² = φ + 1."""
        assert quad_arith(PHI, PHI, "*") == QuadExt(Fraction(3, 2), Fraction(1, 2))
        assert PHI * PHI == PHI + 1

    def test_phi_inverse(self) -> None:
        """Test 1/φ = φ - 1."""
        assert 1 / PHI == QuadExt(Fraction(-1, 2), Fraction(1, 2))
        assert PHI.inverse() == PHI - 1

    def test_self_division(self) -> None:
        """Test (1, 0) / (1, 0) = 1."""
        one = QuadExt(Fraction(1))
        assert quad_arith(one, one, "/") == 1

    def test_division_by_zero(self) -> None:
        """Test that dividing by zero raises ZeroDivisionError."""
        with pytest.raises(ZeroDivisionError):
            PHI / QuadExt(Fraction(0))

    def test_rational_values_compare_equal_to_fractions(self) -> None:
        """Test that an element with zero √5 part equals the plain fraction."""
        assert QuadExt(Fraction(2, 3)) == Fraction(2, 3)
        assert hash(QuadExt(Fraction(2, 3))) == hash(Fraction(2, 3))

    def test_exact_sign(self) -> None:
        """Test signs of elements whose rational and irrational parts disagree."""
        assert sign(PHI - 2) == -1
        assert sign(PHI - Fraction(8, 5)) == 1
        assert sign(-(PHI**-3)) == -1
        assert PHI**-1 > PHI**-2 > 0

    def test_mixing_radicands_fails(self) -> None:
        """Test that √2 and √5 elements cannot be combined."""
        with pytest.raises(ValueError):
            QuadExt(Fraction(0), Fraction(1), 2) + PHI

    def test_sqrt(self) -> None:
        """Test exact square roots inside the field."""
        assert (PHI**2).sqrt() == PHI
        assert QuadExt(Fraction(5)).sqrt() == QuadExt(Fraction(0), Fraction(1))
        with pytest.raises(NotASquareError):
            PHI.sqrt()

    def test_float(self) -> None:
        """Test the float conversion of φ."""
        assert float(PHI) == pytest.approx(1.6180339887)


class TestSqrt:
    """Tests for rational square roots."""

    def test_perfect_square(self) -> None:
        """Test √(9/4) = 3/2."""
        assert fraction_sqrt(Fraction(9, 4)) == Fraction(3, 2)

    def test_not_a_square(self) -> None:
        """Test that √2 is rejected in ℚ."""
        with pytest.raises(NotASquareError):
            fraction_sqrt(Fraction(2))

    def test_fallback_to_quadratic_field(self) -> None:
        """Test that √5 falls back to ℚ(√5)."""
        assert scalar_sqrt(Fraction(5)) == QuadExt(Fraction(0), Fraction(1))


class TestFormatting:
    """Tests for scalar serialization."""

    def test_format_fraction(self) -> None:
        """Test that integers keep an explicit denominator."""
        assert format_scalar(Fraction(1)) == "1/1"
        assert format_scalar(Fraction(-3, 4)) == "-3/4"

    def test_format_quadratic(self) -> None:
        """Test the a+b√5 form."""
        assert format_scalar(PHI) == "1/2+1/2√5"
        assert format_scalar(1 / PHI) == "-1/2+1/2√5"
        assert format_scalar(PHI.conjugate()) == "1/2-1/2√5"

    @pytest.mark.parametrize("text", ["1/1", "-3/4", "1/2+1/2√5", "-7/3-2/9√5", "0/1"])
    def test_parse_inverts_format(self, text: str) -> None:
        """Test that formatted scalars parse back to themselves."""
        assert format_scalar(parse_scalar(text)) == text

    def test_parse_short_forms(self) -> None:
        """Test integers, whitespace and the sqrt spelling."""
        assert parse_scalar("3") == 3
        assert parse_scalar(" -1/2 ") == Fraction(-1, 2)
        assert parse_scalar("1/2 + 1/2sqrt5") == PHI

    def test_parse_rejects_garbage(self) -> None:
        """Test that non-scalars raise ConfigError."""
        with pytest.raises(ConfigError):
            parse_scalar("one half")


class TestPoly:
    """Tests for exact polynomials."""

    def test_root(self) -> None:
        """Test h - 1/2 at 1/2."""
        assert poly_eval(Poly.of(Fraction(-1, 2), 1), Fraction(1, 2)) == 0

    def test_square(self) -> None:
        """Test h² at 1/3."""
        assert poly_eval(Poly.monomial(2), Fraction(1, 3)) == Fraction(1, 9)

    def test_second_bernoulli_at_zero(self) -> None:
        """Test h² - h + 1/6 at 0."""
        assert poly_eval(Poly.of(Fraction(1, 6), -1, 1), 0) == Fraction(1, 6)

    def test_trailing_zeros_are_trimmed(self) -> None:
        """Test that the degree ignores zero leading coefficients."""
        p = Poly.of(1, 2, 0, 0)
        assert p.degree == 1
        assert p == Poly.of(1, 2)
        assert Poly.zero().is_zero()

    def test_compose_affine(self) -> None:
        """Test x ↦ p(a + s·x)."""
        p = Poly.monomial(2)
        assert p.compose_affine(1, 2) == Poly.of(1, 4, 4)

    def test_divmod(self) -> None:
        """Test exact division with remainder."""
        quotient, remainder = divmod(Poly.of(-1, 0, 1), Poly.of(-1, 1))
        assert quotient == Poly.of(1, 1)
        assert remainder.is_zero()

    def test_complex_evaluation(self) -> None:
        """Test evaluation at i."""
        value = poly_eval(Poly.of(1, 0, 1), ComplexScalar(Fraction(0), Fraction(1)))
        assert value == ComplexScalar(Fraction(0))

    def test_lagrange_interpolation(self) -> None:
        """Test that three nodes recover a quadratic."""
        p = Poly.of(Fraction(1, 6), -1, 1)
        nodes = [Fraction(0), Fraction(1, 3), Fraction(1)]
        assert lagrange_interpolate([(x, p(x)) for x in nodes]) == p


class TestRationalFunction:
    """Tests for factored rational functions."""

    def test_simple_pole(self) -> None:
        """Test 1/(λ-1) at 2."""
        assert RationalFunction.simple_pole(Fraction(1)).evaluate(2) == 1

    def test_double_pole(self) -> None:
        """Test 1/(λ-1/2)² at 1."""
        r = RationalFunction(Poly.constant(1), ((Fraction(1, 2), 2),))
        assert r.evaluate(1) == 4

    def test_pole_hit(self) -> None:
        """Test that evaluating at a pole reports its order."""
        r = RationalFunction.simple_pole(Fraction(1)) + RationalFunction.simple_pole(
            Fraction(1, 2)
        )
        with pytest.raises(PoleHitError) as excinfo:
            r.evaluate(Fraction(1, 2))
        assert excinfo.value.order == 1

    def test_cancellation(self) -> None:
        """Test that removable poles are cancelled in the canonical form."""
        r = RationalFunction(Poly.of(-1, 1), ((Fraction(1), 2),))
        assert r.poles == ((Fraction(1), 1),)
        assert r == RationalFunction.simple_pole(Fraction(1))

    def test_sum_cancels_to_zero(self) -> None:
        """Test that r - r has no poles."""
        r = RationalFunction.simple_pole(Fraction(1, 4), 3)
        difference = r - r
        assert difference.is_zero()
        assert difference.poles == ()

    def test_product_accumulates_orders(self) -> None:
        """Test that multiplying simple poles at one point raises the order."""
        r = RationalFunction.simple_pole(Fraction(1, 2)) * RationalFunction.simple_pole(
            Fraction(1, 2)
        )
        assert r.pole_order(Fraction(1, 2)) == 2

    def test_partial_fractions(self) -> None:
        """Test 1/((λ-1)(λ-1/2)) = 2/(λ-1) - 2/(λ-1/2)."""
        r = RationalFunction(Poly.constant(1), ((Fraction(1), 1), (Fraction(1, 2), 1)))
        pf = r.partial_fractions()
        residues = {term.pole: term.residues for term in pf.terms}
        assert residues == {Fraction(1): (Fraction(2),), Fraction(1, 2): (Fraction(-2),)}
        assert pf.polynomial.is_zero()
        assert pf.to_rational_function() == r

    def test_partial_fractions_of_double_pole(self) -> None:
        """Test that λ/(λ-1)² = 1/(λ-1) + 1/(λ-1)²."""
        r = RationalFunction(Poly.of(0, 1), ((Fraction(1), 2),))
        (term,) = r.partial_fractions().terms
        assert term.residues == (Fraction(1), Fraction(1))
        assert r.partial_fractions().evaluate(3) == r.evaluate(3)

    def test_float_and_complex_evaluation(self) -> None:
        """Test float evaluation off the real axis."""
        r = RationalFunction.simple_pole(Fraction(1, 2))
        value = ratfun_eval(r, 0.5 + 1j)
        assert isinstance(value, complex)
        assert value == pytest.approx(1 / 1j)
        exact = r.evaluate(ComplexScalar(Fraction(1, 2), Fraction(1)))
        assert exact == ComplexScalar(Fraction(0), Fraction(-1))

    @pytest.mark.parametrize("lam", [0.5, 0.5 + 0j])
    def test_float_evaluation_at_pole(self, lam: complex) -> None:
        """Test that a float λ on a pole raises PoleHitError with the order."""
        r = RationalFunction(Poly.of(1), ((Fraction(1, 2), 2), (Fraction(1), 1)))
        with pytest.raises(PoleHitError) as excinfo:
            ratfun_eval(r, lam)
        assert excinfo.value.order == 2
