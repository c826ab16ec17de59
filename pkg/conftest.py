"""Shared fixtures: sample presentations and small Cayley balls."""

import logging
from pathlib import Path

import pytest

import presentation
from cayley import AbelianOracle, FreeOracle, build_ball
from freeword import Alphabet

DATA = Path(__file__).parent / "data"


@pytest.fixture(autouse=True)
def _quiet_logs(caplog):
    caplog.set_level(logging.WARNING)


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def ab() -> Alphabet:
    return Alphabet(("a", "b"))


@pytest.fixture(scope="session")
def genus2():
    return presentation.load(DATA / "genus2.pres")


@pytest.fixture(scope="session")
def z2():
    return presentation.load(DATA / "z2.pres")


@pytest.fixture(scope="session")
def free_ball(ab):
    """Radius 8 in F(a, b): a tree with 1 + 2(3^8 - 1) vertices."""
    return build_ball(FreeOracle(ab), 8)


@pytest.fixture(scope="session")
def z2_ball(ab):
    """Radius 8 in Z^2: the lattice diamond |x| + |y| <= 8."""
    return build_ball(AbelianOracle(ab), 8)


@pytest.fixture(scope="session")
def z2_small(ab):
    return build_ball(AbelianOracle(ab), 4)
