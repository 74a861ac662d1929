import math

import numpy as np
import pytest

from pthill import presets
from pthill._common import Verdict
from pthill.errors import DiagnosticUndefinedError, PreconditionError, ValidationError
from pthill.potential import PotentialSpec
from pthill.singularities import (
    BAND_EDGE,
    INTERIOR,
    all_real_and_simple,
    asymptotic_spectrality_verdict,
    mathieu_isospectrality_check,
    mathieu_spectrality,
    projection_norm_diagnostic,
    sets_coincide,
    singularity_scan,
    singularity_sets,
)

from conftest import FAST


@pytest.fixture(scope="module")
def sawtooth_records(sawtooth16):
    q, tr, spec = sawtooth16
    return singularity_scan(q, (-16, 16), bands=spec.bands, tracker=tr)


def test_cos_has_no_interior_multiples(cos8):
    q, tr, _ = cos8
    records = singularity_scan(q, (-8, 8), tracker=tr)
    assert [r for r in records if r.kind == INTERIOR] == []
    assert all(r.kind == BAND_EDGE for r in records)


def test_free_multiples_sit_at_band_edges(free4):
    q, tr, _ = free4
    records = singularity_scan(q, (-4, 4), tracker=tr, cfg=FAST)
    assert records
    for r in records:
        assert r.kind == BAND_EDGE and r.multiplicity == 2
        k = math.sqrt(r.lam.real) / math.pi
        assert k == pytest.approx(round(k), abs=1e-8)


def test_sawtooth_records_are_double_and_real(sawtooth_records):
    interior = [r for r in sawtooth_records if r.kind == INTERIOR]
    assert len(interior) >= 30
    for r in interior:
        assert r.multiplicity == 2
        assert r.lam.imag == 0
        assert 0 < r.t < math.pi
        assert r.is_complexation and r.consistent


def test_sawtooth_sets_coincide(sawtooth16, sawtooth_records):
    _, _, spec = sawtooth16
    comp, mult, ends = singularity_sets(spec.bands, sawtooth_records, n_min=6)
    assert comp
    assert sets_coincide(comp, mult)
    assert sets_coincide(comp, ends)


def test_sets_coincide_rules():
    a = [(3, 0.1), (-3, 0.1)]
    assert sets_coincide(a, [(-3, 0.1 + 5e-6), (3, 0.1)])
    assert not sets_coincide(a, [(3, 0.1), (-3, 0.2)])
    assert not sets_coincide(a, a[:1])


def test_scan_validation():
    with pytest.raises(ValidationError):
        singularity_scan(presets.cos(), (3, -3))


def test_kappa_is_one_for_free_operator():
    lam = (4 * math.pi + 1.0) ** 2
    assert projection_norm_diagnostic(presets.zero(), 2, 1.0, lam=lam, cfg=FAST) == pytest.approx(1.0, abs=1e-10)


def test_kappa_finite_for_cos(cos8):
    q, tr, _ = cos8
    kappa = projection_norm_diagnostic(q, 2, math.pi / 2, tracker=tr)
    assert math.isfinite(kappa)
    # self-adjoint: the adjoint solution is the solution itself
    assert kappa == pytest.approx(1.0, abs=1e-8)


def test_kappa_grows_towards_complexation(sawtooth16):
    q, tr, spec = sawtooth16
    eps = spec.band(4).eps_n
    kappas = [projection_norm_diagnostic(q, 4, eps + d, tracker=tr) for d in (0.05, 0.01, 0.002)]
    assert all(k >= 1.0 - 1e-9 for k in kappas)
    assert kappas[0] < kappas[1] < kappas[2]
    assert kappas[2] > 1.1


def test_kappa_undefined_at_multiple_eigenvalue():
    with pytest.raises(DiagnosticUndefinedError):
        projection_norm_diagnostic(presets.zero(), 1, 0.0, lam=4 * math.pi ** 2, cfg=FAST)


def test_asymptotic_spectrality_verdicts():
    even = PotentialSpec({k: 1 / abs(k) for k in range(-64, 65) if k}, label="even")
    assert asymptotic_spectrality_verdict(even, sp=Verdict.YES).verdict is Verdict.YES
    out = asymptotic_spectrality_verdict(presets.sawtooth(), sp=Verdict.YES)
    assert out.verdict is Verdict.NO
    assert out.failing == tuple(range(6, 17))
    out = asymptotic_spectrality_verdict(presets.mathieu(1.0, 1.0))
    assert out.verdict is Verdict.INCONCLUSIVE


def test_sawtooth_class_membership_drives_verdict():
    out = asymptotic_spectrality_verdict(presets.sawtooth())
    assert out.verdict is Verdict.NO


@pytest.mark.parametrize(
    "a, b, spectral, asym",
    [
        (1.0, 1.0, True, Verdict.YES),
        (1.0, -1.0, False, Verdict.NO),
        (2.0, 0.5, False, Verdict.NO),
        (-1.0, -1.0, True, Verdict.YES),
    ],
)
def test_mathieu_spectrality(a, b, spectral, asym):
    out = mathieu_spectrality(a, b)
    assert out.spectral is spectral
    assert out.asymptotically_spectral is asym


def test_mathieu_alpha():
    assert mathieu_spectrality(1.0, -1.0).case.alpha == 1.0
    assert mathieu_spectrality(1.0, 1.0).case.alpha == 0.0


def test_mathieu_isospectral_pairs():
    grid = np.linspace(-10.0, 500.0, 41)
    assert mathieu_isospectrality_check(1.0, 1.0, 2.0, 0.5, grid) < 1e-8
    assert mathieu_isospectrality_check(1.0, -1.0, -0.5, 2.0, grid) < 1e-8


def test_mathieu_product_mismatch():
    with pytest.raises(PreconditionError):
        mathieu_isospectrality_check(1.0, 1.0, 1.0, -1.0)
    with pytest.raises(ValidationError):
        mathieu_isospectrality_check(1.0, 1j, 1.0, 1.0)


def test_all_real_and_simple(cos8, sawtooth16):
    _, _, cos_spec = cos8
    assert all_real_and_simple([cos_spec.band(n) for n in (-1, 0)])
    _, _, saw = sawtooth16
    assert not all_real_and_simple(saw.bands)
