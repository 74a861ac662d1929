"""Shared fixtures.  Expensive spectra are built once per session."""

import math

import numpy as np
import pytest

from pthill import presets
from pthill.bands import build_spectrum
from pthill.bloch import BandTracker, default_t_grid
from pthill.monodromy import IntegratorConfig

FAST = IntegratorConfig(step_count=1024)

_cache: dict = {}


def spectrum(name: str, n_max: int, **params):
    """Spectrum of a preset on the default grid, memoised across tests."""
    key = (name, n_max, tuple(sorted(params.items())))
    if key not in _cache:
        q = presets.make_preset(name, **params)
        tracker = BandTracker(q, n_max)
        spec = build_spectrum(q, n_max, t_grid=default_t_grid(), tracker=tracker)
        _cache[key] = (q, tracker, spec)
    return _cache[key]


@pytest.fixture(scope="session")
def sawtooth16():
    return spectrum("sawtooth", 16)


@pytest.fixture(scope="session")
def cos8():
    return spectrum("cos", 8, amplitude=1.0)


@pytest.fixture(scope="session")
def free4():
    q = presets.zero()
    grid = np.linspace(0.0, math.pi, 9)
    tracker = BandTracker(q, 4, FAST)
    return q, tracker, build_spectrum(q, 4, FAST, t_grid=grid, tracker=tracker)


# acceptance outcomes, printed as one line per criterion after the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
