"""Interval side of the coding maps: Rényi β-maps and multiplication by φ.

Everything here is exact except :func:`histogram_simulation`, which iterates
orbits in double precision with numpy.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from tqdm import tqdm

from shift_spectra.errors import ConfigError, EngineError
from shift_spectra.exactnum import PHI, QuadExt, Scalar
from shift_spectra.symdyn import (
    ShiftSystem,
    Sidedness,
    Word,
    coding_interval,
    cylinder_measure,
)

MIN_SAMPLES = 10_000
DEFAULT_BURN_IN = 24


class MapKind(Enum):
    RENYI = "renyi"
    GOLDEN = "golden"


@dataclass(frozen=True)
class Branch:
    """``T(x) = slope·x - offset`` on ``[left, right]``."""

    left: Scalar
    right: Scalar
    slope: Scalar
    offset: Scalar

    def __call__(self, x: Scalar) -> Scalar:
        return self.slope * x - self.offset

    def preimage(self, y: Scalar) -> Scalar | None:
        x = (y + self.offset) / self.slope
        return x if self.left <= x <= self.right else None


@dataclass(frozen=True)
class IntervalMap:
    kind: MapKind
    beta: int = 2

    def __post_init__(self) -> None:
        if self.kind is MapKind.RENYI and self.beta < 2:
            raise ConfigError("a Rényi map needs β ≥ 2")

    @classmethod
    def renyi(cls, beta: int = 2) -> IntervalMap:
        return cls(MapKind.RENYI, beta)

    @classmethod
    def golden(cls) -> IntervalMap:
        return cls(MapKind.GOLDEN, 2)

    @classmethod
    def parse(cls, text: str) -> IntervalMap:
        """``renyi``, ``renyi:<β>`` or ``golden``."""
        name, _, arg = text.partition(":")
        if name == "golden" and not arg:
            return cls.golden()
        if name == "renyi":
            try:
                return cls.renyi(int(arg) if arg else 2)
            except ValueError:
                raise ConfigError(f"bad Rényi base {arg!r}") from None
        raise ConfigError(f"unknown map {text!r}; use renyi[:β] or golden")

    @classmethod
    def for_system(cls, sys: ShiftSystem) -> IntervalMap:
        """The interval map semi-conjugate to ``sys`` through its coding map."""
        if sys.sidedness is not Sidedness.ONE_SIDED:
            raise ConfigError("interval maps pair with one-sided systems only")
        if sys.is_golden_mean:
            return cls.golden()
        if sys.is_bernoulli and sys.is_uniform:
            return cls.renyi(sys.beta)
        raise ConfigError(f"{sys.name} has no piecewise-linear partner with equal branches")

    @property
    def label(self) -> str:
        return "golden" if self.kind is MapKind.GOLDEN else f"renyi:{self.beta}"

    @property
    def slope(self) -> Scalar:
        return PHI if self.kind is MapKind.GOLDEN else Fraction(self.beta)

    @property
    def branches(self) -> tuple[Branch, ...]:
        if self.kind is MapKind.GOLDEN:
            inv_phi = 1 / PHI
            return (
                Branch(Fraction(0), inv_phi, PHI, Fraction(0)),
                Branch(inv_phi, Fraction(1), PHI, Fraction(1)),
            )
        beta = self.beta
        return tuple(
            Branch(Fraction(b, beta), Fraction(b + 1, beta), Fraction(beta), Fraction(b))
            for b in range(beta)
        )

    def branch(self, symbol: int) -> Branch:
        return self.branches[symbol]

    def __call__(self, x: Scalar) -> Scalar:
        """Exact ``T(x)``; a breakpoint belongs to the branch on its left."""
        for branch in self.branches:
            if branch.left <= x <= branch.right:
                return branch(x)
        raise EngineError(f"{x} lies outside [0, 1]")

    def transfer(self, density: DensitySpec, y: Scalar) -> Scalar:
        """``Σ_b ρ(y_b)/|T'(y_b)|`` over the preimages ``y_b`` of ``y``."""
        total: Scalar = Fraction(0)
        for branch in self.branches:
            x = branch.preimage(y)
            if x is not None:
                total = total + density(x) / branch.slope
        return total


# =============================================================================
# Densities
# =============================================================================


@dataclass(frozen=True)
class DensityPiece:
    left: Scalar
    right: Scalar
    value: Scalar


@dataclass(frozen=True)
class DensitySpec:
    """Piecewise-constant density on ``[0, 1]``; a shared endpoint belongs to the left piece."""

    pieces: tuple[DensityPiece, ...]

    def __post_init__(self) -> None:
        if any(piece.value < 0 for piece in self.pieces):
            raise EngineError("density values must be non-negative")

    def __call__(self, x: Scalar) -> Scalar:
        for piece in self.pieces:
            if piece.left <= x <= piece.right:
                return piece.value
        return Fraction(0)

    @property
    def breakpoints(self) -> list[Scalar]:
        points: list[Scalar] = []
        for piece in self.pieces:
            for p in (piece.left, piece.right):
                if p not in points:
                    points.append(p)
        return points

    def integral(self, a: Scalar, b: Scalar) -> Scalar:
        total: Scalar = Fraction(0)
        for piece in self.pieces:
            lo, hi = max(a, piece.left), min(b, piece.right)
            if lo < hi:
                total = total + (hi - lo) * piece.value
        return total

    def total(self) -> Scalar:
        return self.integral(Fraction(0), Fraction(1))

    def bin_average(self, a: Scalar, b: Scalar) -> Scalar:
        return self.integral(a, b) / (b - a)


def _candidate_density(interval_map: IntervalMap) -> DensitySpec:
    if interval_map.kind is MapKind.RENYI:
        return DensitySpec((DensityPiece(Fraction(0), Fraction(1), Fraction(1)),))
    norm = 1 + PHI**2
    inv_phi = 1 / PHI
    return DensitySpec(
        (
            DensityPiece(Fraction(0), inv_phi, PHI**3 / norm),
            DensityPiece(inv_phi, Fraction(1), PHI**2 / norm),
        )
    )


def _sorted_unique(points: Sequence[Scalar]) -> list[Scalar]:
    out: list[Scalar] = []
    for p in sorted(points):
        if not out or out[-1] != p:
            out.append(p)
    return out


def check_invariance(
    interval_map: IntervalMap, density: DensitySpec
) -> list[tuple[Scalar, Scalar]]:
    """Sub-intervals on which the transfer operator does not fix ``density``.

    Both sides are constant between consecutive points of the breakpoints of
    ``ρ`` and their images under every branch, so comparing at midpoints is exact.
    """
    points: list[Scalar] = [Fraction(0), Fraction(1)]
    for branch in interval_map.branches:
        for p in [*density.breakpoints, branch.left, branch.right]:
            if branch.left <= p <= branch.right:
                points.append(branch(p))
        points.extend(density.breakpoints)
    grid = _sorted_unique([p for p in points if 0 <= p <= 1])
    failures = []
    for a, b in zip(grid, grid[1:], strict=False):
        mid = (a + b) / 2
        if interval_map.transfer(density, mid) != density(mid):
            failures.append((a, b))
    return failures


def invariant_density(interval_map: IntervalMap) -> DensitySpec:
    """Exact invariant density: Lebesgue for Rényi maps, the two-step profile for φ.

    Raises:
        EngineError: If the density is not a fixed point of the transfer operator.
    """
    density = _candidate_density(interval_map)
    if density.total() != 1:
        raise EngineError(f"invariant density of {interval_map.label} does not integrate to 1")
    failures = check_invariance(interval_map, density)
    if failures:
        raise EngineError(f"density for {interval_map.label} is not invariant on {failures}")
    return density


# =============================================================================
# Exact semi-conjugacy checks
# =============================================================================


@dataclass(frozen=True)
class CylinderReport:
    checked: int
    failures: tuple[Word, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def _check_pair(sys: ShiftSystem, interval_map: IntervalMap) -> None:
    try:
        expected = IntervalMap.for_system(sys)
    except ConfigError as exc:
        raise ConfigError(f"{sys.name} cannot be paired with {interval_map.label}: {exc}") from exc
    if expected != interval_map:
        raise ConfigError(f"{sys.name} pairs with {expected.label}, not {interval_map.label}")


def _image_interval(sys: ShiftSystem, word: Word) -> tuple[Scalar, Scalar]:
    if len(word) > 1:
        return coding_interval(sys, word[1:])
    followers = [coding_interval(sys, (s,)) for s in sys.successors(word)]
    return min(lo for lo, _ in followers), max(hi for _, hi in followers)


def semiconjugacy_check(sys: ShiftSystem, interval_map: IntervalMap, depth: int) -> CylinderReport:
    """Verify ``T(h(w·tail)) = h(σ(w)·tail)`` at both endpoints of every cylinder.

    The branch used is the one for ``w₁``, so breakpoints need no tie rule.

    Raises:
        ConfigError: If the map is not the partner of ``sys``.
    """
    _check_pair(sys, interval_map)
    failures: list[Word] = []
    checked = 1
    for length in range(1, depth + 1):
        for word in sys.words(length):
            checked += 1
            lo, hi = coding_interval(sys, word)
            branch = interval_map.branch(word[0])
            if (branch(lo), branch(hi)) != _image_interval(sys, word):
                failures.append(word)
    return CylinderReport(checked, tuple(failures))


def cylinder_density_check(
    sys: ShiftSystem, interval_map: IntervalMap, depth: int
) -> CylinderReport:
    """Verify ``∫_{h(C[w])} ρ dx = μ(C[w])`` for every admissible ``w`` up to ``depth``."""
    _check_pair(sys, interval_map)
    density = invariant_density(interval_map)
    failures: list[Word] = []
    checked = 0
    for length in range(1, depth + 1):
        for word in sys.words(length):
            checked += 1
            lo, hi = coding_interval(sys, word)
            if density.integral(lo, hi) != cylinder_measure(sys, word):
                failures.append(word)
    return CylinderReport(checked, tuple(failures))


# =============================================================================
# Orbit simulation
# =============================================================================


def split_double(value: Scalar) -> tuple[float, float]:
    """``(hi, lo)`` with ``hi + lo`` closer to ``value`` than one double."""
    if isinstance(value, QuadExt):
        scale = 1 << 120
        root = Fraction(math.isqrt(value.d * scale * scale), scale)
        approx = value.a + value.b * root
    else:
        approx = Fraction(value)
    hi = float(approx)
    return hi, float(approx - Fraction(hi))


@dataclass(frozen=True)
class HistogramRow:
    bin_left: float
    bin_right: float
    count: int
    empirical_density: float
    exact_density: float
    rel_error: float


@dataclass(frozen=True)
class HistogramResult:
    map_label: str
    samples: int
    bins: int
    seed: int
    burn_in: int
    rows: tuple[HistogramRow, ...]
    branch_frequencies: tuple[float, ...]

    @property
    def max_rel_error(self) -> float:
        return max(row.rel_error for row in self.rows)

    @property
    def tolerance(self) -> float:
        """Three standard deviations of a bin frequency, relative."""
        return 3 / math.sqrt(self.samples / self.bins)


def step(interval_map: IntervalMap, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One vectorised application of the map; also returns the branch index."""
    if interval_map.kind is MapKind.GOLDEN:
        phi_hi, phi_lo = split_double(PHI)
        branch = (x > 1 / phi_hi).astype(np.int64)
        y = phi_hi * x + phi_lo * x - branch
    else:
        beta = interval_map.beta
        branch = np.clip(np.ceil(beta * x) - 1, 0, beta - 1).astype(np.int64)
        y = beta * x - branch
    return np.clip(y, 0.0, 1.0), branch


def _simulate_chunk(
    interval_map: IntervalMap, size: int, bins: int, burn_in: int, seq: np.random.SeedSequence
) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seq)
    x = rng.random(size)
    branch_counts = np.zeros(len(interval_map.branches), dtype=np.int64)
    for _ in range(burn_in):
        x, branch = step(interval_map, x)
        branch_counts += np.bincount(branch, minlength=len(branch_counts))
    counts, _ = np.histogram(x, bins=bins, range=(0.0, 1.0))
    return counts, branch_counts


def histogram_simulation(
    interval_map: IntervalMap,
    samples: int,
    bins: int,
    seed: int,
    burn_in: int = DEFAULT_BURN_IN,
    threads: int = 1,
    progress: bool = False,
) -> HistogramResult:
    """Histogram of ``T^burn_in(x₀)`` over uniform seeded starts ``x₀``.

    The samples are split into ``threads`` chunks with independent streams
    spawned from ``seed``; the result does not depend on ``threads``
    scheduling, only on its value.

    Raises:
        EngineError: If fewer than 10⁴ samples are requested or ``bins < 1``.
    """
    if samples < MIN_SAMPLES:
        raise EngineError(f"histogram simulation needs at least {MIN_SAMPLES} samples")
    if bins < 1 or burn_in < 0 or threads < 1:
        raise EngineError("bins and threads must be positive and burn_in non-negative")
    density = invariant_density(interval_map)
    sizes = [samples // threads + (1 if k < samples % threads else 0) for k in range(threads)]
    streams = np.random.SeedSequence(seed).spawn(threads)
    counts = np.zeros(bins, dtype=np.int64)
    branch_counts = np.zeros(len(interval_map.branches), dtype=np.int64)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(_simulate_chunk, interval_map, size, bins, burn_in, seq)
            for size, seq in zip(sizes, streams, strict=True)
        ]
        for future in tqdm(futures, desc="Simulating", unit="chunk", disable=not progress):
            chunk_counts, chunk_branches = future.result()
            counts += chunk_counts
            branch_counts += chunk_branches
    rows = []
    for b in range(bins):
        left, right = Fraction(b, bins), Fraction(b + 1, bins)
        width = float(right - left)
        empirical = float(counts[b]) / (samples * width)
        exact = float(density.bin_average(left, right))
        rows.append(
            HistogramRow(
                bin_left=float(left),
                bin_right=float(right),
                count=int(counts[b]),
                empirical_density=empirical,
                exact_density=exact,
                rel_error=abs(empirical - exact) / exact,
            )
        )
    steps = int(branch_counts.sum())
    frequencies = tuple(float(c) / steps for c in branch_counts) if steps else ()
    return HistogramResult(
        map_label=interval_map.label,
        samples=samples,
        bins=bins,
        seed=seed,
        burn_in=burn_in,
        rows=tuple(rows),
        branch_frequencies=frequencies,
    )
