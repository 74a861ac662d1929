import math

import numpy as np
import pytest

from pthill import presets
from pthill._common import free_level
from pthill.bloch import (
    H_MAX,
    BandTracker,
    LocalizationConfig,
    default_t_grid,
    eigenvalues_in_region,
    matrix_oracle,
    multiplicity_of,
    number_eigenvalues,
)
from pthill.errors import PreconditionError, ValidationError

from conftest import FAST


def test_free_root_in_rectangle():
    lam = (2.5 * math.pi) ** 2
    ev = eigenvalues_in_region(presets.zero(), math.pi / 2, (lam - 5, lam + 5, -5, 5))
    assert len(ev) == 1
    assert ev[0].lam == pytest.approx(61.6850, abs=1e-4)
    assert ev[0].multiplicity == 1


def test_free_double_root_at_periodic_edge():
    lam = 4 * math.pi ** 2
    ev = eigenvalues_in_region(presets.zero(), 0.0, (lam - 5, lam + 5, -5, 5))
    assert len(ev) == 1
    assert ev[0].lam == pytest.approx(lam, abs=1e-8)
    assert ev[0].multiplicity == 2


def test_lowest_cos_root_matches_oracle():
    q = presets.cos(1.0)
    ref = matrix_oracle(q, 0.0, 64)[0]
    ev = eigenvalues_in_region(q, 0.0, (-5, 5, -3, 3))
    assert len(ev) == 1
    assert ev[0].lam == pytest.approx(ref, rel=1e-6, abs=1e-8)


def test_rectangle_validation():
    with pytest.raises(ValidationError):
        eigenvalues_in_region(presets.zero(), 0.0, (5, 1, -1, 1))


def test_free_oracle_is_diagonal():
    t = 1.1
    vals = matrix_oracle(presets.zero(), t, 8)
    ref = np.sort([(2 * math.pi * k + t) ** 2 for k in range(-8, 9)])
    assert np.allclose(vals.real, ref, rtol=0, atol=1e-9)


def test_oracle_self_convergence():
    q = presets.cos(1.0)
    a, b = matrix_oracle(q, math.pi, 32)[:10], matrix_oracle(q, math.pi, 64)[:10]
    assert np.max(np.abs(a - b)) < 1e-8


def test_oracle_needs_size():
    with pytest.raises(ValidationError):
        matrix_oracle(presets.cos(), 0.0, 4)


def _match(values, oracle):
    return max(abs(v - oracle[np.argmin(np.abs(oracle - v))]) / max(1.0, abs(v)) for v in values)


def test_gasymov_matches_oracle_off_symmetric_point():
    q = presets.gasymov((1.0,))
    tr = BandTracker(q, 8)
    t = math.pi / 3
    tr.run([0.0, t, math.pi / 2, math.pi])
    vals = [tr.eigenvalue(n, t) for n in range(-8, 9)]
    assert _match(vals, matrix_oracle(q, t, 48)) < 1e-6


def test_free_numbering_is_exact():
    curves = number_eigenvalues(presets.zero(), np.linspace(0, math.pi, 9), (-4, 4), FAST)
    for n, c in curves.items():
        assert np.max(np.abs(c.lam - (2 * math.pi * n + c.t) ** 2)) < 1e-8


@pytest.mark.parametrize("name", ["cos", "sawtooth", "mathieu"])
def test_curves_are_continuous(name):
    q = presets.make_preset(name)
    grid = default_t_grid()
    curves = number_eigenvalues(q, grid, (-4, 4))
    for n, c in curves.items():
        # the free level moves by at most 2 (2 pi |n| + pi) dt per step
        bound = 2 * (2 * math.pi * abs(n) + math.pi) * np.diff(c.t) + 1e-6
        assert np.all(np.abs(np.diff(c.lam)) <= 2 * bound + 1.0)


def test_sawtooth_asymptotics_at_n4(sawtooth16):
    _, tracker, _ = sawtooth16
    lam = tracker.eigenvalue(4, math.pi / 2)
    assert abs(lam - free_level(4, math.pi / 2)) <= 10 * math.log(4) / 4


def test_multiplicity_of():
    z = presets.zero()
    assert multiplicity_of(z, 4 * math.pi ** 2, 0.0) == 2
    assert multiplicity_of(z, (2.5 * math.pi) ** 2, math.pi / 2) == 1
    q = presets.cos(1.0)
    lam0 = matrix_oracle(q, 0.0, 64)[0].real
    assert multiplicity_of(q, lam0, 0.0) == 1


def test_even_in_quasimomentum():
    q = presets.sawtooth()
    t = 0.7
    rect = (50, 400, -5, 5)
    ev1 = sorted((e.lam for e in eigenvalues_in_region(q, t, rect)), key=lambda z: (z.real, z.imag))
    ev2 = sorted((e.lam for e in eigenvalues_in_region(q, 2 * math.pi - t, rect)), key=lambda z: (z.real, z.imag))
    assert len(ev1) == len(ev2)
    assert np.allclose(ev1, ev2, atol=1e-8)


def test_real_roots_lie_in_the_spectrum(cos8):
    from pthill.monodromy import evaluate

    q, _, spec = cos8
    lams = np.concatenate([b.lam for b in spec.bands])
    F = evaluate(q, lams.real, FAST, 0)[0]
    assert np.all(np.abs(F.real) <= 2 + 1e-6)


def test_conjugation_closure_at_each_t(sawtooth16):
    # the outermost tracked indices are guards whose partners lie beyond the scan
    _, tracker, _ = sawtooth16
    for t, known in tracker._known.items():
        vals = np.array([v[0] for v in known.values()])
        reported = np.array([v[0] for n, v in known.items() if abs(n) <= tracker.n_max])
        for z in reported[np.abs(reported.imag) > 1e-7 * np.maximum(1, np.abs(reported))]:
            assert np.min(np.abs(vals - z.conjugate())) < 1e-7 * max(1.0, abs(z))


def test_completeness_count():
    tr = BandTracker(presets.sawtooth(), 4)
    tr.run(np.linspace(0, math.pi, 5))
    count, found = tr.completeness()
    assert count == found


def test_simple_outside_end_zones(sawtooth16):
    _, tracker, spec = sawtooth16
    h = tracker.loc.h
    for band in spec.bands:
        if abs(band.n) <= tracker.loc.n_cut:
            continue
        inner = (band.t >= h) & (band.t <= math.pi - h)
        assert np.all(band.multiplicity[inner] == 1)


def test_localization_validation():
    with pytest.raises(PreconditionError):
        LocalizationConfig(h=H_MAX)
    with pytest.raises(ValidationError):
        LocalizationConfig(n_cut=-1)


def test_default_grid_shape():
    g = default_t_grid(0.02)
    assert g[0] == 0.0 and g[-1] == math.pi
    assert np.all(np.diff(g) > 0)
    assert np.sum((g > 0) & (g < 0.02)) >= 7
