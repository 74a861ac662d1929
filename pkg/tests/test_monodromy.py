import cmath
import math

import numpy as np
import pytest

from pthill import presets
from pthill.bloch import matrix_oracle
from pthill.errors import IntegrationError, MagnitudeError, ValidationError
from pthill.monodromy import (
    DEFAULT_CONFIG,
    IntegratorConfig,
    discriminant,
    discriminant_derivatives,
    evaluate,
    solution_path,
    solve_basis,
)


def free_F(lam):
    return 2 * cmath.cos(cmath.sqrt(lam))


def test_free_basis_at_pi_squared():
    s = solve_basis(presets.zero(), math.pi ** 2)
    assert s.theta1 == pytest.approx(-1.0, abs=1e-12)
    assert s.phi1 == pytest.approx(0.0, abs=1e-12)
    assert s.F == pytest.approx(-2.0, abs=1e-12)


def test_free_basis_at_zero():
    s = solve_basis(presets.zero(), 0.0)
    assert (s.theta1, s.phi1, s.dphi1, s.F) == pytest.approx((1, 1, 1, 2), abs=1e-12)


def test_free_discriminant_values():
    q = presets.zero()
    assert discriminant(q, 4 * math.pi ** 2) == pytest.approx(2.0, abs=1e-12)
    assert discriminant(q, -1.0) == pytest.approx(2 * math.cosh(1.0), abs=1e-12)
    assert discriminant(q, -1.0) == pytest.approx(3.0862, abs=1e-4)


@pytest.mark.parametrize("lam", [math.pi ** 2, 4 * math.pi ** 2])
def test_free_derivative_vanishes(lam):
    dF, _ = discriminant_derivatives(presets.zero(), lam)
    assert abs(dF) < 1e-12


@pytest.mark.parametrize("order, gain", [(4, 2 ** 3.5), (5, 2 ** 4.5)])
def test_convergence_order_on_free_potential(order, gain):
    # the plain frame integrates the free equation numerically
    q, lam = presets.zero(), 200.0
    errs = [
        abs(discriminant(q, lam, IntegratorConfig(step_count=n, order=order, frame="plain")) - free_F(lam))
        for n in (32, 64, 128)
    ]
    assert errs[0] / errs[1] >= gain and errs[1] / errs[2] >= gain


@pytest.mark.parametrize("name", ["cos", "sawtooth", "mathieu"])
def test_derivatives_match_central_differences(name):
    q = presets.make_preset(name)
    for lam in (3.7, 45.0 + 2.0j, 250.0):
        dF, d2F = discriminant_derivatives(q, lam)
        h = 1e-3 * max(1.0, abs(lam)) ** 0.5
        Fp, F0, Fm = (discriminant(q, lam + s * h) for s in (1, 0, -1))
        assert dF == pytest.approx((Fp - Fm) / (2 * h), rel=1e-5, abs=1e-8)
        assert d2F == pytest.approx((Fp - 2 * F0 + Fm) / h ** 2, rel=1e-3, abs=1e-6)


@pytest.mark.parametrize("name", ["cos", "sawtooth", "mathieu", "gasymov"])
def test_wronskian_residual_small(name):
    q = presets.make_preset(name)
    for lam in np.linspace(-50, 2000, 12):
        assert solve_basis(q, lam).wronskian_residual < 1e-8


@pytest.mark.parametrize("name", ["cos", "sawtooth", "gasymov"])
def test_pt_discriminant_real_on_real_axis(name):
    q = presets.make_preset(name)
    F = evaluate(q, np.linspace(-20, 1500, 41), DEFAULT_CONFIG, 0)[0]
    assert np.max(np.abs(F.imag)) < 1e-9


def test_conjugation_symmetry_of_F():
    q = presets.sawtooth()
    zs = np.array([3 + 4j, 100 - 7j, 500 + 30j, -5 + 1j])
    F = evaluate(q, zs, DEFAULT_CONFIG, 0)[0]
    Fc = evaluate(q, zs.conj(), DEFAULT_CONFIG, 0)[0]
    assert np.max(np.abs(Fc - F.conj())) < 1e-9


def test_deterministic():
    q = presets.sawtooth()
    assert discriminant(q, 123.4 + 5j) == discriminant(q, 123.4 + 5j)


def test_cos_discriminant_against_oracle():
    # lambda_0(0) of 2cos(2 pi x) is the lowest periodic eigenvalue: F = 2 there
    q = presets.cos(1.0)
    lam0 = matrix_oracle(q, 0.0, 64)[0].real
    assert discriminant(q, lam0) == pytest.approx(2.0, abs=1e-8)
    # 0 lies in the spectrum: the oracle at t = arccos(F(0)/2) has eigenvalue 0
    F0 = discriminant(q, 0.0).real
    assert -2.0 <= F0 <= 2.0
    ev = matrix_oracle(q, math.acos(F0 / 2), 64)
    assert np.min(np.abs(ev)) < 1e-8


def test_derivative_brackets_first_band_edge():
    q = presets.cos(1.0)
    # F' changes sign at the critical point inside the first gap
    lo, hi = matrix_oracle(q, math.pi, 64)[:2].real
    grid = np.linspace(lo - 1, hi + 1, 41)
    d1 = evaluate(q, grid, DEFAULT_CONFIG, 1)[1].real
    crossings = np.nonzero(np.diff(np.sign(d1)))[0]
    assert any(lo - 1 <= grid[i] <= hi + 1 for i in crossings)


def test_energy_cap():
    with pytest.raises(MagnitudeError):
        discriminant(presets.cos(), 1e7)


def test_wronskian_guard():
    cfg = IntegratorConfig(step_count=4, tau_w=1e-14, frame="plain")
    with pytest.raises(IntegrationError):
        solve_basis(presets.cos(3.0), 900.0, cfg)


def test_config_validation():
    with pytest.raises(ValidationError):
        IntegratorConfig(order=3)
    with pytest.raises(ValidationError):
        IntegratorConfig(step_count=0)
    with pytest.raises(ValidationError):
        IntegratorConfig(breakpoints=(1.5,))


def test_solution_path_endpoints():
    q = presets.sawtooth()
    x, Y = solution_path(q, 30.0 + 1j)
    s = solve_basis(q, 30.0 + 1j)
    assert x[0] == 0.0 and x[-1] == 1.0
    assert np.allclose(Y[0], np.eye(2))
    assert np.allclose(Y[-1], s.monodromy, atol=1e-10)
