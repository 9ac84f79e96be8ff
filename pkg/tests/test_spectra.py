"""Tests for the one-sided generalized spectral engine."""

from fractions import Fraction

import pytest
import sympy

from shift_spectra.errors import (
    EngineError,
    ObservableKindError,
    PoleHitError,
    SpectrumWarning,
    TruncationError,
)
from shift_spectra.exactnum import PHI, ComplexScalar, Poly
from shift_spectra.observables import (
    BlockObservable,
    CylFun,
    PolyObservable,
    inner_product,
    pf_apply,
)
from shift_spectra.spectra import (
    BasisKind,
    EigenSystem,
    bernoulli_poly,
    decompose,
    dual_decompose,
    dual_reconstruct,
    eigen_system,
    generalized_resolvent,
    integration_functional,
    iterate_pf,
    koopman_dual_apply,
    observable_vector,
    rep_matrix,
    riesz_projection,
    to_test_space,
)
from shift_spectra.symdyn import ShiftSystem, preset


def _h(sys: ShiftSystem) -> PolyObservable:
    return PolyObservable(sys, Poly.of(0, 1))


class TestRepMatrix:
    """Tests for the matrix of V on X_n."""

    def test_full2_degree_one(self, full2: ShiftSystem) -> None:
        """Test [[1, 1/4], [0, 1/2]]."""
        assert rep_matrix(full2, 1).entries == ((1, Fraction(1, 4)), (0, Fraction(1, 2)))

    def test_weighted_diagonal(self, weighted: ShiftSystem) -> None:
        """Test the diagonal Σpᵢ^(n+1) for p = (1/3, 2/3)."""
        entries = rep_matrix(weighted, 3).entries
        diagonal = [entries[i][i] for i in range(4)]
        third, two_thirds = Fraction(1, 3), Fraction(2, 3)
        assert diagonal == [third ** (n + 1) + two_thirds ** (n + 1) for n in range(4)]
        assert diagonal[1] == Fraction(5, 9)

    def test_golden_first_block(self, golden: ShiftSystem) -> None:
        """Test Q₀ = [[φ⁻¹, φ⁻²], [1, 0]]."""
        matrix = rep_matrix(golden, 0)
        assert matrix.basis is BasisKind.BLOCK
        assert matrix.entries == ((1 / PHI, PHI**-2), (1, 0))

    def test_golden_is_block_triangular(self, golden: ShiftSystem) -> None:
        """Test that entries below the diagonal blocks vanish."""
        matrix = rep_matrix(golden, 3)
        for i in range(matrix.size):
            for j in range(matrix.size):
                if i // 2 > j // 2:
                    assert matrix.entries[i][j] == 0

    def test_negative_degree(self, full2: ShiftSystem) -> None:
        """Test that n < 0 is rejected."""
        with pytest.raises(EngineError):
            rep_matrix(full2, -1)


class TestEigenSystem:
    """Tests for eigenvalues, eigenpolynomials and dual functionals."""

    def test_full2_eigenvalues(self) -> None:
        """Test the eigenvalues 2⁻ⁿ for n ≤ 16."""
        es = eigen_system(preset("full2-uniform"), 16)
        assert es.eigenvalues == tuple(Fraction(1, 2**n) for n in range(17))
        assert es.labels == tuple(str(n) for n in range(17))

    def test_first_eigenpolynomials(self, full2_es: EigenSystem) -> None:
        """Test Φ₁ = h - 1/2 and Φ₂ = h² - h + 1/6."""
        system = full2_es.system
        assert full2_es.eigenpoly(0) == PolyObservable(system, Poly.constant(1))
        assert full2_es.eigenpoly(1) == PolyObservable(system, Poly.of(Fraction(-1, 2), 1))
        assert full2_es.eigenpoly(2) == PolyObservable(system, Poly.of(Fraction(1, 6), -1, 1))

    def test_eigenpolynomials_are_bernoulli(self) -> None:
        """Test that Φₙ on the uniform 2-shift is the Bernoulli polynomial Bₙ for n ≤ 10."""
        es = eigen_system(preset("full2-uniform"), 10)
        x = sympy.Symbol("x")
        for n in range(11):
            expected = sympy.Poly(sympy.bernoulli(n, x), x).all_coeffs()[::-1]
            phi = es.eigenpoly(n)
            assert isinstance(phi, PolyObservable)
            coeffs = [sympy.Rational(c.numerator, c.denominator) for c in phi.poly.coeffs]
            assert coeffs == expected

    @pytest.mark.parametrize(
        "name", ["full2-uniform", "fullbeta-uniform", "fullbeta-weighted", "golden-mean"]
    )
    def test_eigen_equation(self, name: str) -> None:
        """Test V Φᵢ = λᵢ Φᵢ exactly."""
        sys = preset(name)
        es = eigen_system(sys, 6)
        for i, lam in enumerate(es.eigenvalues):
            phi = es.eigenpoly(i)
            assert pf_apply(sys, phi) == phi.scale(lam)

    def test_biorthogonality(self, golden_es: EigenSystem) -> None:
        """Test ⟨Φ'ᵢ | Φⱼ⟩ = δᵢⱼ."""
        for i in range(golden_es.dim):
            functional = golden_es.dual_functional(i)
            for j in range(golden_es.dim):
                assert functional(golden_es.eigenpoly(j)) == (1 if i == j else 0)

    def test_golden_degree_one(self, golden: ShiftSystem) -> None:
        """Test the order 1, φ⁻¹, -φ⁻², -φ⁻³ and the ± labels."""
        es = eigen_system(golden, 1)
        assert es.eigenvalues == (1, 1 / PHI, -(PHI**-2), -(PHI**-3))
        assert es.labels == ("0+", "1+", "0-", "1-")

    def test_golden_eigenvalue_closure(self, golden: ShiftSystem) -> None:
        """Test {φ⁻ᵏ} ∪ {-φ⁻ᵏ⁻²} for k ≤ 8."""
        es = eigen_system(golden, 8)
        expected = {PHI**-k for k in range(9)} | {-(PHI ** (-k - 2)) for k in range(9)}
        assert set(es.eigenvalues) == expected
        assert len(es.eigenvalues) == 18

    def test_golden_top_mode_is_constant(self, golden_es: EigenSystem) -> None:
        """Test Φ_{0,+} = 1."""
        top = golden_es.eigenpoly(golden_es.index_of("0+"))
        assert top == BlockObservable(golden_es.system, (Poly.constant(1), Poly.constant(1)))

    def test_zero_mean(self, full2_es: EigenSystem, golden_es: EigenSystem) -> None:
        """Test ∫Φ dμ = 0 for every mode but the constant one."""
        for es, top in ((full2_es, "0"), (golden_es, "0+")):
            one = CylFun.constant(es.system, 1)
            for i, label in enumerate(es.labels):
                expected = 1 if label == top else 0
                assert inner_product(es.system, es.eigenpoly(i), one) == expected

    def test_index_of(self, full2_es: EigenSystem) -> None:
        """Test lookup by label and by value."""
        assert full2_es.index_of("3") == 3
        assert full2_es.index_of(Fraction(1, 4)) == 2
        with pytest.raises(EngineError):
            full2_es.index_of(Fraction(1, 3))
        with pytest.raises(EngineError):
            full2_es.index_of("9")


class TestBernoulliPolynomials:
    """Tests for Bₙ."""

    def test_small_cases(self) -> None:
        """Test B₀ = 1, B₁ = x - 1/2 and B₄(0) = -1/30."""
        assert bernoulli_poly(0) == Poly.constant(1)
        assert bernoulli_poly(1) == Poly.of(Fraction(-1, 2), 1)
        assert bernoulli_poly(4)(Fraction(0)) == Fraction(-1, 30)

    @pytest.mark.parametrize("n", range(11))
    def test_multiplication_identity(self, n: int) -> None:
        """Test B(x)/2 + B(x + 1/2)/2 = 2⁻ⁿ B(2x) as polynomials."""
        b = bernoulli_poly(n)
        lhs = b.scale(Fraction(1, 2)) + b.compose_affine(Fraction(1, 2), 1).scale(Fraction(1, 2))
        assert lhs - b.compose_affine(0, 2).scale(Fraction(1, 2**n)) == Poly.zero()


class TestCoordinates:
    """Tests for moving observables into X_n."""

    def test_depth_one_cylinder_on_golden(self, golden: ShiftSystem) -> None:
        """Test that 1_{C[1]} is a block observable."""
        f = to_test_space(golden, CylFun.indicator(golden, (1,)))
        assert f == BlockObservable(golden, (Poly.zero(), Poly.constant(1)))

    def test_deep_cylinder_rejected(self, full2: ShiftSystem) -> None:
        """Test that 1_{C[0]} is not a polynomial in h."""
        with pytest.raises(ObservableKindError):
            to_test_space(full2, CylFun.indicator(full2, (0,)))

    def test_polynomial_promotes_to_blocks(self, golden: ShiftSystem) -> None:
        """Test that h becomes (h, h) on the golden-mean shift."""
        assert to_test_space(golden, _h(golden)) == BlockObservable(golden, (Poly.of(0, 1),) * 2)

    def test_truncation(self, full2: ShiftSystem) -> None:
        """Test that h⁷ does not fit in X₆."""
        with pytest.raises(TruncationError):
            observable_vector(full2, PolyObservable(full2, Poly.monomial(7)), 7)


class TestDecomposition:
    """Tests for spectral decompositions and iteration."""

    def test_h(self, full2_es: EigenSystem) -> None:
        """Test h = Φ₀/2 + Φ₁."""
        terms = decompose(full2_es, _h(full2_es.system)).terms
        assert [(t.label, t.eigenvalue, t.coefficient) for t in terms] == [
            ("0", 1, Fraction(1, 2)),
            ("1", Fraction(1, 2), 1),
        ]

    def test_basis_element(self, full2_es: EigenSystem) -> None:
        """Test that Φ₃ decomposes to a single term."""
        terms = decompose(full2_es, full2_es.eigenpoly(3)).terms
        assert [(t.label, t.coefficient) for t in terms] == [("3", 1)]

    def test_zero(self, full2_es: EigenSystem) -> None:
        """Test that the zero observable has no terms."""
        zero = PolyObservable(full2_es.system, Poly.zero())
        assert decompose(full2_es, zero).terms == ()

    def test_reconstruct(self, golden_es: EigenSystem) -> None:
        """Test that a decomposition rebuilds its observable."""
        golden = golden_es.system
        f = BlockObservable(golden, (Poly.of(1, 2, 0, 3), Poly.of(-1, 0, 1)))
        assert decompose(golden_es, f).reconstruct(golden_es) == f

    def test_iterate_two_modes(self, full2_es: EigenSystem) -> None:
        """Test V²(Φ₀ + Φ₁) = Φ₀ + Φ₁/4."""
        f = full2_es.eigenpoly(0) + full2_es.eigenpoly(1)
        report = iterate_pf(full2_es, f, 2)
        assert report.image == full2_es.eigenpoly(0) + full2_es.eigenpoly(1).scale(Fraction(1, 4))

    def test_iterate_h(self, full2_es: EigenSystem) -> None:
        """Test the limit ∫h = 1/2 and the rate 1/2."""
        report = iterate_pf(full2_es, _h(full2_es.system), 10)
        assert report.limit == Fraction(1, 2)
        assert report.rate == Fraction(1, 2)
        assert report.decomposition.coefficient("1") == Fraction(1, 2**10)
        assert report.residual == full2_es.eigenpoly(1).scale(Fraction(1, 2**10))

    def test_iterate_zero_mean_mode(self, full2_es: EigenSystem) -> None:
        """Test Φ₂ alone: limit 0, rate 1/4."""
        report = iterate_pf(full2_es, full2_es.eigenpoly(2), 3)
        assert report.limit == 0
        assert report.rate == Fraction(1, 4)
        assert report.decomposition.coefficient("2") == Fraction(1, 64)

    def test_iterate_golden_rate(self, golden_es: EigenSystem) -> None:
        """Test that the golden-mean mixing rate is φ⁻¹ once that mode is present."""
        f = golden_es.eigenpoly(golden_es.index_of("1+")) + golden_es.eigenpoly(
            golden_es.index_of("0-")
        )
        report = iterate_pf(golden_es, f, 4)
        assert report.rate == 1 / PHI
        assert report.limit == 0

    def test_iterate_matches_repeated_application(self, weighted: ShiftSystem) -> None:
        """Test that the spectral formula agrees with applying V k times."""
        es = eigen_system(weighted, 4)
        f = PolyObservable(weighted, Poly.of(1, -2, 0, 5, 1))
        image = f
        for _ in range(5):
            image = pf_apply(weighted, image)
        assert iterate_pf(es, f, 5).image == image

    def test_negative_iteration(self, full2_es: EigenSystem) -> None:
        """Test that k < 0 is rejected."""
        with pytest.raises(EngineError):
            iterate_pf(full2_es, _h(full2_es.system), -1)


class TestResolvent:
    """Tests for the continued resolvent and Riesz projections."""

    def test_poles_of_h(self, full2_es: EigenSystem) -> None:
        """Test poles {1, 1/2} with residues Φ₀/2 and Φ₁."""
        poles = generalized_resolvent(full2_es, _h(full2_es.system)).poles
        assert [(p.location, p.order) for p in poles] == [(1, 1), (Fraction(1, 2), 1)]
        assert poles[0].residue == full2_es.eigenpoly(0).scale(Fraction(1, 2))
        assert poles[1].residue == full2_es.eigenpoly(1)

    def test_single_mode(self, full2_es: EigenSystem) -> None:
        """Test that Φ₁ has a pole at 1/2 only and the resolvent is regular at 1."""
        resolvent = generalized_resolvent(full2_es, full2_es.eigenpoly(1))
        assert [p.location for p in resolvent.poles] == [Fraction(1, 2)]
        assert resolvent.evaluate(Fraction(1)) == full2_es.eigenpoly(1).scale(2)

    def test_constant_at_two(self, full2_es: EigenSystem) -> None:
        """Test (2 - V)⁻¹Φ₀ = Φ₀."""
        resolvent = generalized_resolvent(full2_es, full2_es.eigenpoly(0))
        assert resolvent.evaluate(Fraction(2)) == full2_es.eigenpoly(0)

    def test_value_of_h(self, full2_es: EigenSystem) -> None:
        """Test (2 - V)⁻¹h = 2h/3 + 1/6."""
        value = generalized_resolvent(full2_es, _h(full2_es.system)).evaluate(Fraction(2))
        assert value == PolyObservable(full2_es.system, Poly.of(Fraction(1, 6), Fraction(2, 3)))

    @pytest.mark.parametrize("lam", [Fraction(3), Fraction(1, 3), Fraction(-2, 7)])
    def test_resolvent_equation(self, golden_es: EigenSystem, lam: Fraction) -> None:
        """Test (λ - V)R(λ)f = f inside and outside the unit disc."""
        golden = golden_es.system
        f = BlockObservable(golden, (Poly.of(0, 1, 1), Poly.of(2)))
        value = generalized_resolvent(golden_es, f).evaluate(lam)
        assert isinstance(value, BlockObservable)
        assert value.scale(lam) - pf_apply(golden, value) == f

    def test_pole_hit(self, full2_es: EigenSystem) -> None:
        """Test that evaluation at 1/2 reports the residue Φ₁."""
        resolvent = generalized_resolvent(full2_es, _h(full2_es.system))
        with pytest.raises(PoleHitError) as excinfo:
            resolvent.evaluate(Fraction(1, 2))
        assert excinfo.value.order == 1
        assert excinfo.value.residue == full2_es.eigenpoly(1)

    def test_pairing_with_one(self, full2_es: EigenSystem) -> None:
        """Test ⟨R(λ)h, 1⟩ = (1/2)/(λ - 1)."""
        resolvent = generalized_resolvent(full2_es, _h(full2_es.system))
        pairing = resolvent.pairing(CylFun.constant(full2_es.system, 1))
        assert pairing.poles == ((Fraction(1), 1),)
        assert pairing.evaluate(Fraction(3)) == Fraction(1, 4)

    def test_complex_evaluation(self, full2_es: EigenSystem) -> None:
        """Test the constant coordinate of R(λ)Φ₀ at λ = 1 + i."""
        resolvent = generalized_resolvent(full2_es, full2_es.eigenpoly(0))
        coords = resolvent.evaluate_complex(ComplexScalar(Fraction(1), Fraction(1)))
        assert coords[0] == ComplexScalar(Fraction(0), Fraction(-1))
        assert all(c == ComplexScalar(Fraction(0)) for c in coords[1:])

    def test_riesz(self, full2_es: EigenSystem) -> None:
        """Test the projections of h and Φ₀."""
        h = _h(full2_es.system)
        assert riesz_projection(full2_es, h, Fraction(1, 2)).image == full2_es.eigenpoly(1)
        assert riesz_projection(full2_es, h, Fraction(1)).image == full2_es.eigenpoly(0).scale(
            Fraction(1, 2)
        )
        projection = riesz_projection(full2_es, full2_es.eigenpoly(0), Fraction(1, 2))
        assert projection.in_spectrum
        assert projection.image == PolyObservable(full2_es.system, Poly.zero())

    def test_riesz_off_spectrum(self, full2_es: EigenSystem) -> None:
        """Test that a point off the spectrum warns and projects to zero."""
        with pytest.warns(SpectrumWarning):
            projection = riesz_projection(full2_es, _h(full2_es.system), Fraction(1, 3))
        assert not projection.in_spectrum
        assert projection.image == PolyObservable(full2_es.system, Poly.zero())


class TestDualSide:
    """Tests for dual functionals and the Koopman dual."""

    def test_integration_is_first_dual(self, full2_es: EigenSystem) -> None:
        """Test that f ↦ ∫f dμ is Φ'₀."""
        assert integration_functional(full2_es).row == full2_es.dual[0]

    def test_integration_value(self, golden_es: EigenSystem) -> None:
        """Test ∫1_{C[0]} dμ = φ²/(1+φ²)."""
        functional = integration_functional(golden_es)
        golden = golden_es.system
        assert functional(CylFun.indicator(golden, (0,))) == PHI**2 / (1 + PHI**2)

    def test_dual_functionals_are_eigenvectors(self, golden_es: EigenSystem) -> None:
        """Test U^× Φ'ᵢ = λᵢ Φ'ᵢ."""
        for i, lam in enumerate(golden_es.eigenvalues):
            image = koopman_dual_apply(golden_es, golden_es.dual_functional(i))
            assert image.row == tuple(lam * x for x in golden_es.dual[i])

    def test_dual_round_trip(self, full2_es: EigenSystem) -> None:
        """Test that a functional is rebuilt from its dual decomposition."""
        functional = integration_functional(full2_es)
        decomposition = dual_decompose(full2_es, functional)
        assert [t.label for t in decomposition.terms] == ["0"]
        assert dual_reconstruct(full2_es, decomposition).row == functional.row
