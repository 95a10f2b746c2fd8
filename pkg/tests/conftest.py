"""Shared fixtures: small symbols and quiet, serial settings."""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import settings  # noqa: E402
from symbols import DoubleBump, Quartic2D, SmoothBump  # noqa: E402


@pytest.fixture(autouse=True)
def quiet_serial(monkeypatch):
    monkeypatch.setattr(settings, 'SHOW_PROGRESS', False)
    monkeypatch.setattr(settings, 'WORKERS', 1)


@pytest.fixture
def double_bump():
    return DoubleBump(E0=1.0, barrier_radius=1.0, half_separation=2.0)


@pytest.fixture
def tilted_bump():
    return DoubleBump(E0=1.0, barrier_radius=1.0, half_separation=2.0, tilt_eps=0.2,
                      tilt_profile=SmoothBump(0.25, 0.5, (0.0, 0.0)))


@pytest.fixture
def quartic():
    return Quartic2D(lam=18.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
