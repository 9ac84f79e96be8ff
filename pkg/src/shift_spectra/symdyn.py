"""Shift spaces: alphabets, adjacency, Bernoulli and Markov measures, cylinders
and the coding map onto [0, 1]."""

from __future__ import annotations

import itertools
import json
import os
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Literal

from platformdirs import user_config_dir
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from shift_spectra import linalg
from shift_spectra.errors import ConfigError, InadmissibleWordError, ObservableKindError
from shift_spectra.exactnum import PHI, Scalar, format_scalar, parse_scalar, sign

APP_NAME = "shift-spectra"
SYSTEMS_DIR_ENV_VAR = "SHIFT_SPECTRA_SYSTEMS_DIR"

GOLDEN_ADJACENCY = ((1, 1), (1, 0))
# the only transition matrix compatible with the hard-wired golden coding map
GOLDEN_TRANSITION: tuple[tuple[Scalar, ...], ...] = (
    (1 / PHI, 1 / PHI**2),
    (Fraction(1), Fraction(0)),
)

Word = tuple[int, ...]


class MeasureKind(Enum):
    """Kind of shift-invariant measure."""

    BERNOULLI = "bernoulli"
    MARKOV = "markov"


class Sidedness(Enum):
    ONE_SIDED = "one-sided"
    TWO_SIDED = "two-sided"


@dataclass(frozen=True)
class MeasureSpec:
    """Bernoulli weights, or a Markov transition matrix with its stationary vector."""

    kind: MeasureKind
    probabilities: tuple[Scalar, ...] = ()
    transition: linalg.Matrix = ()
    stationary: tuple[Scalar, ...] = ()

    @classmethod
    def bernoulli(cls, probabilities: Sequence[Scalar]) -> MeasureSpec:
        return cls(MeasureKind.BERNOULLI, probabilities=tuple(probabilities))

    @classmethod
    def markov(cls, transition: linalg.Matrix, stationary: Sequence[Scalar]) -> MeasureSpec:
        return cls(MeasureKind.MARKOV, transition=transition, stationary=tuple(stationary))

    def transition_probability(self, i: int, j: int) -> Scalar:
        if self.kind is MeasureKind.BERNOULLI:
            return self.probabilities[j]
        return self.transition[i][j]

    def initial_probability(self, i: int) -> Scalar:
        if self.kind is MeasureKind.BERNOULLI:
            return self.probabilities[i]
        return self.stationary[i]


@dataclass(frozen=True)
class CodingMap:
    """``h(i*ω) = offsets[i] + scales[i]·h(ω)``."""

    offsets: tuple[Scalar, ...]
    scales: tuple[Scalar, ...]

    def word_affine(self, word: Sequence[int]) -> tuple[Scalar, Scalar]:
        """(offset, scale) with ``h(w*ω) = offset + scale·h(ω)``."""
        offset: Scalar = Fraction(0)
        scale: Scalar = Fraction(1)
        for symbol in word:
            offset = offset + scale * self.offsets[symbol]
            scale = scale * self.scales[symbol]
        return offset, scale

    def periodic_value(self, period: Sequence[int]) -> Scalar:
        """``h`` at the periodic point ``period·period·…`` as a closed-form geometric sum."""
        offset, scale = self.word_affine(period)
        return offset / (1 - scale)


@dataclass(frozen=True)
class Cylinder:
    """``C[i₁,…,i_r]``; ``start`` only matters for two-sided systems."""

    word: Word
    start: int = 1

    def __len__(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class ShiftSystem:
    """A subshift of finite type with an invariant measure."""

    name: str
    beta: int
    adjacency: tuple[tuple[int, ...], ...]
    measure: MeasureSpec
    sidedness: Sidedness = Sidedness.ONE_SIDED

    def __post_init__(self) -> None:
        self.validate()

    # ===== Validation =====

    def validate(self) -> None:
        """Check structural and measure invariants exactly.

        Raises:
            ConfigError: On any violation.
        """
        if self.beta < 2:
            raise ConfigError(f"alphabet size must be >= 2, got {self.beta}")
        if len(self.adjacency) != self.beta or any(len(r) != self.beta for r in self.adjacency):
            raise ConfigError("adjacency must be a beta x beta matrix")
        if any(a not in (0, 1) for row in self.adjacency for a in row):
            raise ConfigError("adjacency entries must be 0 or 1")
        if any(sum(row) == 0 for row in self.adjacency):
            raise ConfigError("adjacency has a dead state (row without a 1)")

        m = self.measure
        if m.kind is MeasureKind.BERNOULLI:
            if len(m.probabilities) != self.beta:
                raise ConfigError("need one probability per symbol")
            if any(sign(p) <= 0 for p in m.probabilities):
                raise ConfigError("Bernoulli probabilities must be positive")
            if sum(m.probabilities, Fraction(0)) != 1:
                raise ConfigError("Bernoulli probabilities must sum to 1")
            if not self.is_full:
                raise ConfigError("Bernoulli measures need the full adjacency matrix")
            return

        if self.sidedness is Sidedness.TWO_SIDED:
            raise ConfigError("two-sided systems support Bernoulli measures only")
        if self.adjacency != GOLDEN_ADJACENCY:
            raise ConfigError("Markov measures are supported on the golden-mean adjacency only")
        if len(m.transition) != self.beta or len(m.stationary) != self.beta:
            raise ConfigError("transition/stationary shapes do not match beta")
        for i, row in enumerate(m.transition):
            if sum(row, Fraction(0)) != 1:
                raise ConfigError(f"transition row {i} does not sum to 1")
            for j, p in enumerate(row):
                if (p == 0) != (self.adjacency[i][j] == 0):
                    raise ConfigError(
                        f"transition[{i}][{j}] must vanish exactly where adjacency does"
                    )
                if sign(p) < 0:
                    raise ConfigError("transition probabilities must be non-negative")
        if tuple(tuple(row) for row in m.transition) != GOLDEN_TRANSITION:
            raise ConfigError(
                "Markov measures need the golden-mean transition matrix "
                "[[1/φ, 1/φ²], [1, 0]]; the coding map onto [0, 1] is fixed to it"
            )
        if sum(m.stationary, Fraction(0)) != 1:
            raise ConfigError("stationary vector must sum to 1")
        if linalg.vecmat(m.stationary, m.transition) != m.stationary:
            raise ConfigError("stationary vector is not invariant under the transition matrix")

    # ===== Properties =====

    @property
    def is_full(self) -> bool:
        return all(a == 1 for row in self.adjacency for a in row)

    @property
    def is_bernoulli(self) -> bool:
        return self.measure.kind is MeasureKind.BERNOULLI

    @property
    def is_uniform(self) -> bool:
        return self.is_bernoulli and len(set(self.measure.probabilities)) == 1

    @property
    def is_golden_mean(self) -> bool:
        return self.measure.kind is MeasureKind.MARKOV

    @property
    def coding_map(self) -> CodingMap:
        if self.is_bernoulli:
            offsets: list[Scalar] = []
            acc: Scalar = Fraction(0)
            for p in self.measure.probabilities:
                offsets.append(acc)
                acc = acc + p
            return CodingMap(tuple(offsets), self.measure.probabilities)
        inv_phi = 1 / PHI
        return CodingMap((Fraction(0), inv_phi), (inv_phi, inv_phi))

    def backward_weight(self, i: int, j: int) -> Scalar:
        """``π_i p_ij / π_j``: weight of the branch ``i*ω`` for ``ω`` in ``C[j]``."""
        m = self.measure
        return m.initial_probability(i) * m.transition_probability(i, j) / m.initial_probability(j)

    # ===== Words =====

    def is_admissible(self, word: Sequence[int]) -> bool:
        if any(not 0 <= s < self.beta for s in word):
            return False
        return all(self.adjacency[a][b] == 1 for a, b in itertools.pairwise(word))

    def cylinder(self, word: Sequence[int], start: int = 1) -> Cylinder:
        """Build an admissible cylinder.

        Raises:
            InadmissibleWordError: If the word violates the adjacency matrix.
        """
        w = tuple(word)
        if not self.is_admissible(w):
            raise InadmissibleWordError(f"word {w} is not admissible in {self.name}", word=w)
        if self.sidedness is Sidedness.ONE_SIDED and start != 1:
            raise InadmissibleWordError("one-sided cylinders start at index 1", word=w)
        return Cylinder(w, start)

    def words(self, length: int) -> Iterator[Word]:
        """Admissible words of ``length`` in lexicographic order."""
        if length == 0:
            yield ()
            return
        for shorter in self.words(length - 1):
            for s in range(self.beta):
                candidate = (*shorter, s)
                if not shorter or self.adjacency[shorter[-1]][s]:
                    yield candidate

    def successors(self, word: Sequence[int]) -> list[int]:
        if not word:
            return list(range(self.beta))
        return [s for s in range(self.beta) if self.adjacency[word[-1]][s]]


# =============================================================================
# Measures, intervals, moments
# =============================================================================


def cylinder_measure(sys: ShiftSystem, c: Cylinder | Sequence[int]) -> Scalar:
    """Exact ``μ(C[w])``: ``π_{i₁}p_{i₁i₂}…`` (Bernoulli: product of weights)."""
    word = c.word if isinstance(c, Cylinder) else tuple(c)
    if not sys.is_admissible(word):
        raise InadmissibleWordError(f"word {word} is not admissible in {sys.name}", word=word)
    if not word:
        return Fraction(1)
    m = sys.measure
    value = m.initial_probability(word[0])
    for a, b in itertools.pairwise(word):
        value = value * m.transition_probability(a, b)
    return value


def _top_tail(sys: ShiftSystem, word: Sequence[int]) -> tuple[int, ...]:
    if sys.is_bernoulli:
        return (sys.beta - 1,)
    # largest admissible continuation alternates 1,0 after a 0 and 0,1 after a 1
    return (0, 1) if word and word[-1] == 1 else (1, 0)


def coding_interval(sys: ShiftSystem, c: Cylinder | Sequence[int]) -> tuple[Scalar, Scalar]:
    """Exact endpoints ``(a, b)`` of ``h(C[w])``.

    ``a`` is ``h(w·000…)``; ``b`` is ``h`` at ``w`` followed by the largest
    admissible tail.
    """
    word = c.word if isinstance(c, Cylinder) else tuple(c)
    if not sys.is_admissible(word):
        raise InadmissibleWordError(f"word {word} is not admissible in {sys.name}", word=word)
    coding = sys.coding_map
    offset, scale = coding.word_affine(word)
    tail_value = coding.periodic_value(_top_tail(sys, word))
    return offset, offset + scale * tail_value


def h_moments(sys: ShiftSystem, nmax: int) -> list[Scalar]:
    """Moments ``∫ hⁿ dμ`` for ``n = 0..nmax`` of a Bernoulli system.

    Raises:
        ObservableKindError: For Markov systems (use :func:`block_moments`).
    """
    if not sys.is_bernoulli:
        raise ObservableKindError("h_moments needs a Bernoulli measure; use block_moments")
    p = sys.measure.probabilities
    c = sys.coding_map.offsets
    moments: list[Scalar] = [Fraction(1)]
    for n in range(1, nmax + 1):
        rhs: Scalar = Fraction(0)
        for k in range(n):
            weight = sum(
                (pi ** (k + 1) * ci ** (n - k) for pi, ci in zip(p, c, strict=True)),
                Fraction(0),
            )
            rhs = rhs + comb(n, k) * weight * moments[k]
        diagonal = sum((pi ** (n + 1) for pi in p), Fraction(0))
        moments.append(rhs / (1 - diagonal))
    return moments


def block_moments(sys: ShiftSystem, nmax: int) -> list[tuple[Scalar, ...]]:
    """Per-symbol moments ``∫_{C[j]} hⁿ dμ`` for ``n = 0..nmax``.

    Splitting over the first symbol, ``m_n⁽ʲ⁾ = Σ_k w_jk ∫_{C[k]} (c_j + s_j h)ⁿ``
    with backward weights ``w_jk``; the ``n``-th moment vector solves a
    ``β×β`` linear system given the lower ones.
    """
    coding = sys.coding_map
    beta = sys.beta
    weights = [
        [sys.backward_weight(j, k) if sys.adjacency[j][k] else Fraction(0) for k in range(beta)]
        for j in range(beta)
    ]
    moments: list[tuple[Scalar, ...]] = [
        tuple(sys.measure.initial_probability(j) for j in range(beta))
    ]
    for n in range(1, nmax + 1):
        system: list[list[Scalar]] = []
        rhs: list[Scalar] = []
        for j in range(beta):
            c_j, s_j = coding.offsets[j], coding.scales[j]
            row: list[Scalar] = [
                (1 if j == k else 0) - weights[j][k] * s_j**n for k in range(beta)
            ]
            acc: Scalar = Fraction(0)
            for k in range(beta):
                if weights[j][k] == 0:
                    continue
                for lower in range(n):
                    term = comb(n, lower) * c_j ** (n - lower) * s_j**lower
                    acc = acc + weights[j][k] * term * moments[lower][k]
            system.append(row)
            rhs.append(acc)
        moments.append(linalg.solve(linalg.as_matrix(system), rhs))
    return moments


# =============================================================================
# Presets and config files
# =============================================================================


def _golden_mean() -> ShiftSystem:
    norm = 1 + PHI**2
    return ShiftSystem(
        name="golden-mean",
        beta=2,
        adjacency=GOLDEN_ADJACENCY,
        measure=MeasureSpec.markov(linalg.as_matrix(GOLDEN_TRANSITION), (PHI**2 / norm, 1 / norm)),
    )


def _bernoulli(
    name: str,
    probabilities: Sequence[Fraction],
    sidedness: Sidedness = Sidedness.ONE_SIDED,
) -> ShiftSystem:
    beta = len(probabilities)
    return ShiftSystem(
        name=name,
        beta=beta,
        adjacency=tuple((1,) * beta for _ in range(beta)),
        measure=MeasureSpec.bernoulli(probabilities),
        sidedness=sidedness,
    )


PRESETS = {
    "full2-uniform": lambda: _bernoulli("full2-uniform", [Fraction(1, 2)] * 2),
    "fullbeta-uniform": lambda: _bernoulli("fullbeta-uniform", [Fraction(1, 3)] * 3),
    "fullbeta-weighted": lambda: _bernoulli(
        "fullbeta-weighted", [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]
    ),
    "golden-mean": _golden_mean,
    "twosided-full2": lambda: _bernoulli(
        "twosided-full2", [Fraction(1, 2)] * 2, Sidedness.TWO_SIDED
    ),
}


def bernoulli_system(
    probabilities: Sequence[Fraction | int], name: str = "bernoulli"
) -> ShiftSystem:
    """Full shift on ``len(probabilities)`` symbols with the given weights."""
    return _bernoulli(name, [Fraction(p) for p in probabilities])


def preset(name: str) -> ShiftSystem:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None


class MeasureConfig(BaseModel):
    """``measure`` block of a system config file."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["bernoulli", "markov"]
    probabilities: list[str] | None = None
    transition: list[list[str]] | None = None
    stationary: list[str] | None = None


class SystemConfig(BaseModel):
    """JSON system config; scalars are exact strings like ``"1/3"`` or ``"1/2+1/2√5"``."""

    model_config = ConfigDict(extra="forbid")

    name: str = "custom"
    beta: int
    adjacency: list[list[int]]
    measure: MeasureConfig
    sidedness: Literal["one-sided", "two-sided"] = "one-sided"

    @field_validator("beta")
    @classmethod
    def _beta_at_least_two(cls, value: int) -> int:
        if value < 2:
            raise ValueError("beta must be >= 2")
        return value

    def to_system(self) -> ShiftSystem:
        m = self.measure
        if m.kind == "bernoulli":
            if m.probabilities is None:
                raise ConfigError("bernoulli measure needs 'probabilities'")
            spec = MeasureSpec.bernoulli([parse_scalar(p) for p in m.probabilities])
        else:
            if m.transition is None or m.stationary is None:
                raise ConfigError("markov measure needs 'transition' and 'stationary'")
            spec = MeasureSpec.markov(
                linalg.as_matrix([[parse_scalar(x) for x in row] for row in m.transition]),
                [parse_scalar(x) for x in m.stationary],
            )
        return ShiftSystem(
            name=self.name,
            beta=self.beta,
            adjacency=tuple(tuple(row) for row in self.adjacency),
            measure=spec,
            sidedness=Sidedness(self.sidedness),
        )

    @classmethod
    def from_system(cls, sys: ShiftSystem) -> SystemConfig:
        m = sys.measure
        if m.kind is MeasureKind.BERNOULLI:
            measure = MeasureConfig(
                kind="bernoulli", probabilities=[format_scalar(p) for p in m.probabilities]
            )
        else:
            measure = MeasureConfig(
                kind="markov",
                transition=[[format_scalar(x) for x in row] for row in m.transition],
                stationary=[format_scalar(x) for x in m.stationary],
            )
        return cls(
            name=sys.name,
            beta=sys.beta,
            adjacency=[list(row) for row in sys.adjacency],
            measure=measure,
            sidedness=sys.sidedness.value,
        )


def get_systems_dir() -> Path:
    """Directory holding user-defined ``<name>.json`` system configs.

    Checks the SHIFT_SPECTRA_SYSTEMS_DIR environment variable first.
    If not set, uses the default user config directory.
    """
    env_path = os.environ.get(SYSTEMS_DIR_ENV_VAR)
    if env_path:
        return Path(env_path)
    return Path(user_config_dir(APP_NAME)) / "systems"


def load_system_file(path: Path) -> ShiftSystem:
    """Read and validate a JSON system config.

    Raises:
        ConfigError: If the file is unreadable, malformed or invalid.
    """
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read system config {path}: {e}") from e
    try:
        config = SystemConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid system config {path}:\n{e}") from e
    return config.to_system()


def resolve_system(name: str) -> ShiftSystem:
    """Preset name, then file path, then ``<name>.json`` in the systems directory."""
    if name in PRESETS:
        return preset(name)
    path = Path(name)
    if path.is_file():
        return load_system_file(path)
    candidate = get_systems_dir() / f"{name}.json"
    if candidate.is_file():
        return load_system_file(candidate)
    raise ConfigError(
        f"unknown system {name!r}: not a preset ({', '.join(PRESETS)}), "
        f"not a file, and no {candidate}"
    )
