"""Tests for interval maps, invariant densities and the orbit histogram."""

from fractions import Fraction

import numpy as np
import pytest

from shift_spectra.conjugacy import (
    MIN_SAMPLES,
    DensityPiece,
    DensitySpec,
    IntervalMap,
    check_invariance,
    cylinder_density_check,
    histogram_simulation,
    invariant_density,
    semiconjugacy_check,
    split_double,
    step,
)
from shift_spectra.errors import ConfigError, EngineError
from shift_spectra.exactnum import PHI
from shift_spectra.symdyn import ShiftSystem, preset


class TestIntervalMap:
    """Tests for the Rényi and golden-ratio maps."""

    def test_doubling(self) -> None:
        """Test T(3/4) = 1/2 and the left-branch tie at 1/2."""
        doubling = IntervalMap.renyi()
        assert doubling(Fraction(3, 4)) == Fraction(1, 2)
        assert doubling(Fraction(1, 2)) == 1

    def test_golden(self) -> None:
        """Test T_φ(1/φ) = 1 and T_φ(1) = 1/φ."""
        golden = IntervalMap.golden()
        assert golden(1 / PHI) == 1
        assert golden(Fraction(1)) == 1 / PHI

    def test_outside_unit_interval(self) -> None:
        """Test that points outside [0, 1] are rejected."""
        with pytest.raises(EngineError):
            IntervalMap.renyi()(Fraction(3, 2))

    @pytest.mark.parametrize(
        ("text", "label"), [("renyi", "renyi:2"), ("renyi:3", "renyi:3"), ("golden", "golden")]
    )
    def test_parse(self, text: str, label: str) -> None:
        """Test the map spellings accepted on the command line."""
        assert IntervalMap.parse(text).label == label

    @pytest.mark.parametrize("text", ["renyi:x", "renyi:1", "tent", "golden:2"])
    def test_parse_rejects(self, text: str) -> None:
        """Test that malformed map names raise ConfigError."""
        with pytest.raises(ConfigError):
            IntervalMap.parse(text)

    def test_partner_of_system(self, full2: ShiftSystem, golden: ShiftSystem) -> None:
        """Test the map paired with each system."""
        assert IntervalMap.for_system(full2) == IntervalMap.renyi(2)
        assert IntervalMap.for_system(golden) == IntervalMap.golden()
        assert IntervalMap.for_system(preset("fullbeta-uniform")) == IntervalMap.renyi(3)

    @pytest.mark.parametrize("name", ["fullbeta-weighted", "twosided-full2"])
    def test_no_partner(self, name: str) -> None:
        """Test that weighted and two-sided systems have no partner map."""
        with pytest.raises(ConfigError):
            IntervalMap.for_system(preset(name))


class TestDensities:
    """Tests for exact invariant densities."""

    def test_lebesgue(self) -> None:
        """Test that the Rényi density is constant 1."""
        density = invariant_density(IntervalMap.renyi(3))
        assert density(Fraction(1, 7)) == 1
        assert density.total() == 1

    def test_golden_profile(self) -> None:
        """Test the two values φ³/(1+φ²) and φ²/(1+φ²)."""
        density = invariant_density(IntervalMap.golden())
        norm = 1 + PHI**2
        assert density(Fraction(1, 2)) == PHI**3 / norm
        assert density(Fraction(9, 10)) == PHI**2 / norm
        assert float(density(Fraction(1, 2))) == pytest.approx(1.1708, abs=1e-4)
        assert float(density(Fraction(9, 10))) == pytest.approx(0.7236, abs=1e-4)
        assert density.total() == 1

    def test_breakpoint_belongs_to_left_piece(self) -> None:
        """Test ρ(1/φ) on the left value."""
        density = invariant_density(IntervalMap.golden())
        assert density(1 / PHI) == PHI**3 / (1 + PHI**2)

    def test_lebesgue_is_not_invariant_for_golden(self) -> None:
        """Test that the transfer operator moves the uniform density."""
        uniform = DensitySpec((DensityPiece(Fraction(0), Fraction(1), Fraction(1)),))
        assert check_invariance(IntervalMap.golden(), uniform)

    def test_negative_density(self) -> None:
        """Test that negative values are rejected."""
        with pytest.raises(EngineError):
            DensitySpec((DensityPiece(Fraction(0), Fraction(1), Fraction(-1)),))

    def test_bin_average_straddling_breakpoint(self) -> None:
        """Test the average over a bin that contains 1/φ."""
        density = invariant_density(IntervalMap.golden())
        a, b = Fraction(6, 10), Fraction(7, 10)
        expected = ((1 / PHI - a) * density(a) + (b - 1 / PHI) * density(b)) / (b - a)
        assert density.bin_average(a, b) == expected


class TestCylinderChecks:
    """Tests for the exact semi-conjugacy identities."""

    @pytest.mark.parametrize("name", ["full2-uniform", "fullbeta-uniform", "golden-mean"])
    def test_semiconjugacy(self, name: str) -> None:
        """Test T(h(C[w])) = h(C[σw]) for words up to length 6."""
        sys = preset(name)
        report = semiconjugacy_check(sys, IntervalMap.for_system(sys), 6)
        assert report.passed
        assert report.checked == 1 + sum(len(list(sys.words(n))) for n in range(1, 7))

    def test_empty_depth(self, full2: ShiftSystem) -> None:
        """Test that depth 0 checks only the empty word."""
        report = semiconjugacy_check(full2, IntervalMap.renyi(), 0)
        assert report.passed
        assert report.checked == 1

    @pytest.mark.parametrize("name", ["full2-uniform", "fullbeta-uniform", "golden-mean"])
    def test_cylinder_density(self, name: str) -> None:
        """Test ∫_{h(C[w])} ρ = μ(C[w]) for words up to length 8."""
        sys = preset(name)
        assert cylinder_density_check(sys, IntervalMap.for_system(sys), 8).passed

    def test_mismatched_pair(self, full2: ShiftSystem) -> None:
        """Test that the 2-shift cannot be checked against T_φ."""
        with pytest.raises(ConfigError, match="pairs with renyi:2"):
            semiconjugacy_check(full2, IntervalMap.golden(), 3)

    def test_weighted_pair(self) -> None:
        """Test that a weighted shift has no partner to check against."""
        with pytest.raises(ConfigError):
            cylinder_density_check(preset("fullbeta-weighted"), IntervalMap.renyi(3), 3)


class TestSimulation:
    """Tests for the floating-point orbit histogram."""

    def test_split_double(self) -> None:
        """Test that the low part carries the rounding error of φ."""
        hi, lo = split_double(PHI)
        assert hi == float(PHI)
        assert abs(lo) < 2**-52

    def test_step(self) -> None:
        """Test one doubling step with its branch indices."""
        y, branch = step(IntervalMap.renyi(), np.array([0.25, 0.5, 0.75]))
        assert y.tolist() == [0.5, 1.0, 0.5]
        assert branch.tolist() == [0, 0, 1]

    @pytest.mark.parametrize("text", ["renyi", "golden"])
    def test_histogram_matches_density(self, text: str) -> None:
        """Test every bin against the exact density within the statistical tolerance."""
        result = histogram_simulation(IntervalMap.parse(text), 200_000, 10, seed=1)
        assert len(result.rows) == 10
        assert sum(row.count for row in result.rows) == 200_000
        assert result.max_rel_error < 2 * result.tolerance

    def test_branch_frequencies(self) -> None:
        """Test that doubling-map digits are balanced."""
        result = histogram_simulation(IntervalMap.renyi(), 50_000, 5, seed=3)
        assert result.branch_frequencies == pytest.approx((0.5, 0.5), abs=0.01)

    def test_golden_branch_frequencies(self) -> None:
        """Test that the golden-ratio orbit visits [0, 1/φ] with probability φ²/(1+φ²)."""
        result = histogram_simulation(IntervalMap.golden(), 50_000, 5, seed=3)
        expected = float(PHI**2 / (1 + PHI**2))
        assert result.branch_frequencies[0] == pytest.approx(expected, abs=0.01)

    def test_deterministic(self) -> None:
        """Test that the same seed and thread count give the same histogram."""
        first = histogram_simulation(IntervalMap.golden(), MIN_SAMPLES, 8, seed=42, threads=2)
        second = histogram_simulation(IntervalMap.golden(), MIN_SAMPLES, 8, seed=42, threads=2)
        assert first == second

    def test_no_burn_in_is_uniform(self) -> None:
        """Test that zero iterations leave the uniform starts untouched."""
        result = histogram_simulation(IntervalMap.renyi(), 100_000, 10, seed=5, burn_in=0)
        assert result.max_rel_error < 2 * result.tolerance
        assert result.branch_frequencies == ()

    def test_too_few_samples(self) -> None:
        """Test that fewer than 10⁴ samples are rejected."""
        with pytest.raises(EngineError, match="at least"):
            histogram_simulation(IntervalMap.renyi(), MIN_SAMPLES - 1, 10, seed=0)

    def test_bad_bins(self) -> None:
        """Test that a non-positive bin count is rejected."""
        with pytest.raises(EngineError):
            histogram_simulation(IntervalMap.renyi(), MIN_SAMPLES, 0, seed=0)

    @pytest.mark.slow
    @pytest.mark.parametrize("text", ["renyi", "golden"])
    def test_histogram_at_scale(self, text: str) -> None:
        """Test 10⁶ samples in 20 bins within 2% per bin."""
        result = histogram_simulation(IntervalMap.parse(text), 1_000_000, 20, seed=2026, threads=4)
        assert result.max_rel_error < 0.02
