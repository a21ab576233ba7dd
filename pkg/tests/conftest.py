"""
Shared pytest fixtures for weylwalk tests.
"""

import logging
from pathlib import Path

import pytest

from weylwalk_core import WeylPoint
from weylwalk_walks import RngStream, StepLaw


@pytest.fixture(scope="session")
def project_root() -> Path:
    """Get the project root directory."""
    return Path(__file__).parent.parent


@pytest.fixture(scope="session")
def recipes_dir(project_root: Path) -> Path:
    return project_root / "recipes"


@pytest.fixture
def rng() -> RngStream:
    """A fixed stream; tests that need independence derive substreams."""
    return RngStream(seed=20240611)


@pytest.fixture
def rademacher() -> StepLaw:
    return StepLaw.rademacher()


@pytest.fixture
def gaussian() -> StepLaw:
    return StepLaw.gaussian()


@pytest.fixture
def gap_two() -> WeylPoint:
    """k=2 lattice start (0, 2)."""
    return WeylPoint(coords=(0.0, 2.0))


@pytest.fixture
def gap_one() -> WeylPoint:
    return WeylPoint(coords=(0.0, 1.0))


@pytest.fixture
def spread_three() -> WeylPoint:
    """k=3 start (0, 2, 4)."""
    return WeylPoint(coords=(0.0, 2.0, 4.0))


@pytest.fixture(autouse=True)
def _quiet_logs(caplog: pytest.LogCaptureFixture) -> None:
    caplog.set_level(logging.INFO)
