import math

import numpy as np
import pytest
from scipy.integrate import quad

from pthill import presets
from pthill.errors import DomainError, RangeError, RepresentationMissingError, ValidationError
from pthill.potential import (
    Piece,
    PotentialSpec,
    antiderivative_coefficients,
    check_pt_symmetry,
    fourier_coefficient,
    real_imag_split,
    sp_membership,
)
from pthill._common import Verdict


def test_fourier_coefficient_orthogonality():
    assert fourier_coefficient(presets.cos(1.0), 1) == pytest.approx(1.0)
    assert fourier_coefficient(presets.gasymov((1.0,)), -1) == 0


def test_sawtooth_coefficient_matches_quadrature():
    q = presets.sawtooth()
    assert fourier_coefficient(q, 3) == pytest.approx(1 / 3, abs=1e-13)
    # independent check with adaptive quadrature of the closed form
    re = quad(lambda x: (math.pi * (1 - 2 * x) * math.sin(6 * math.pi * x)), 0, 1, limit=200)[0]
    assert fourier_coefficient(q, 3).real == pytest.approx(re, abs=1e-10)


def test_closed_form_beyond_table():
    q = presets.sawtooth(n_q=32)
    val, err = fourier_coefficient(q, 40, return_error=True)
    assert val == pytest.approx(1 / 40, abs=1e-12)
    assert err < 1e-10


def test_missing_representation():
    q = PotentialSpec({1: 1.0, -1: 1.0}, table_is_exact=False)
    with pytest.raises(RepresentationMissingError):
        fourier_coefficient(q, 5)
    with pytest.raises(RepresentationMissingError):
        PotentialSpec()


@pytest.mark.parametrize(
    "coeffs, expected",
    [
        ({1: 1.0, -1: 1.0}, (True, 0.0)),
        ({1: 1.0, -1: -1.0}, (True, 0.0)),
        ({1: 1.0, -1: 1j}, (False, 1.0)),
    ],
)
def test_pt_symmetry(coeffs, expected):
    assert check_pt_symmetry(PotentialSpec(coeffs)) == expected


def test_real_imag_split():
    assert real_imag_split(presets.cos(1.0), 1) == (1.0, 0.0)
    assert real_imag_split(PotentialSpec({1: 1.0, -1: -1.0}), 1) == (0.0, 1.0)
    f, g = real_imag_split(presets.sawtooth(), 2)
    assert f == pytest.approx(0.0, abs=1e-14) and g == pytest.approx(0.5, abs=1e-14)
    with pytest.raises(DomainError):
        real_imag_split(PotentialSpec({1: 1.0, -1: 1j}), 1)


def test_split_reconstructs_coefficients():
    q = presets.sawtooth()
    for n in range(1, 20):
        f, g = real_imag_split(q, n)
        assert f + g == pytest.approx(fourier_coefficient(q, n).real, abs=1e-15)
        assert f - g == pytest.approx(fourier_coefficient(q, -n).real, abs=1e-15)


def test_antiderivative_table():
    tab = antiderivative_coefficients(presets.cos(1.0), 4)
    assert tab.Q_at(1) == pytest.approx(1 / (2j * math.pi))
    assert tab.Q_at(-1) == pytest.approx(-1 / (2j * math.pi))
    zero = antiderivative_coefficients(presets.zero(), 4)
    assert not np.any(zero.Q) and not np.any(zero.S)
    saw = antiderivative_coefficients(presets.sawtooth(), 8)
    assert saw.Q0 == pytest.approx(1j * math.pi / 6, abs=1e-12)
    with pytest.raises(RangeError):
        tab.q_at(200)


def test_antiderivative_needs_zero_mean():
    q = PotentialSpec({0: 1.0, 1: 1.0}, allow_mean=True)
    with pytest.raises(DomainError):
        antiderivative_coefficients(q, 4)
    with pytest.raises(DomainError):
        PotentialSpec({0: 1.0})


def test_sp_membership():
    v = sp_membership(presets.sawtooth(), 0)
    assert v.holds is Verdict.YES and v.s == 0
    assert v.c2 == pytest.approx(1.0) and v.c3 == pytest.approx(1.0)
    assert sp_membership(PotentialSpec({1: 1.0, -1: 1.0}, n_q=64), 0).holds is Verdict.NO
    assert sp_membership(PotentialSpec({}, n_q=64, label="zero"), 0).holds is Verdict.NO


def test_table_matches_closed_form():
    q = presets.sawtooth(n_q=64)
    for n in range(-64, 65):
        if n:
            assert q.coefficient(n) == pytest.approx(1 / n, abs=1e-12)


def test_parseval_bound():
    q = presets.sawtooth(n_q=128)
    energy = sum(abs(v) ** 2 for v in q.coeffs.values())
    exact = quad(lambda x: (math.pi * (1 - 2 * x)) ** 2, 0, 1)[0]
    assert energy <= exact + 1e-10


def test_fourier_sum_and_evaluation_agree():
    q = presets.cos(0.7)
    x = np.linspace(0, 1, 17)
    assert np.allclose(q.evaluate(x), 1.4 * np.cos(2 * math.pi * x))


def test_piece_validation():
    with pytest.raises(ValidationError):
        PotentialSpec(pieces=[Piece(0.5, lambda x: x)])


def test_mathieu_rejects_complex():
    with pytest.raises(ValidationError):
        presets.mathieu(1j, 1.0)


def test_make_preset_validation():
    with pytest.raises(ValidationError):
        presets.make_preset("nope")
    with pytest.raises(ValidationError):
        presets.make_preset("cos", a=1.0)
