"""Pytest configuration and shared fixtures."""

import json
from fractions import Fraction
from pathlib import Path

import pytest

from shift_spectra.spectra import EigenSystem, eigen_system
from shift_spectra.symdyn import SYSTEMS_DIR_ENV_VAR, ShiftSystem, bernoulli_system, preset


@pytest.fixture
def full2() -> ShiftSystem:
    """The one-sided full 2-shift with the uniform Bernoulli measure."""
    return preset("full2-uniform")


@pytest.fixture
def golden() -> ShiftSystem:
    """The golden-mean subshift with its Parry-type Markov measure."""
    return preset("golden-mean")


@pytest.fixture
def weighted() -> ShiftSystem:
    """Full 2-shift with Bernoulli weights (1/3, 2/3)."""
    return bernoulli_system([Fraction(1, 3), Fraction(2, 3)], name="weighted2")


@pytest.fixture
def full2_es(full2: ShiftSystem) -> EigenSystem:
    """Eigen system of the full 2-shift on polynomials of degree ≤ 6."""
    return eigen_system(full2, 6)


@pytest.fixture
def golden_es(golden: ShiftSystem) -> EigenSystem:
    """Eigen system of the golden-mean subshift on blocks of degree ≤ 3."""
    return eigen_system(golden, 3)


@pytest.fixture
def systems_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Point the systems directory at an ephemeral folder via environment variable."""
    directory = tmp_path / "systems"
    directory.mkdir()
    monkeypatch.setenv(SYSTEMS_DIR_ENV_VAR, str(directory))
    return directory


@pytest.fixture
def third_system_file(systems_dir: Path) -> Path:
    """A user-defined Bernoulli system with weights (1/4, 3/4) saved as quarter.json."""
    path = systems_dir / "quarter.json"
    path.write_text(
        json.dumps(
            {
                "name": "quarter",
                "beta": 2,
                "adjacency": [[1, 1], [1, 1]],
                "measure": {"kind": "bernoulli", "probabilities": ["1/4", "3/4"]},
            }
        ),
        encoding="utf-8",
    )
    return path
