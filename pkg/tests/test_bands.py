import math

import numpy as np
import pytest

from pthill import presets
from pthill._common import Verdict, scaled
from pthill.bands import (
    PARAM_TOL,
    build_band,
    build_spectrum,
    conjugation_symmetry_check,
    detect_complexation_points,
    half_line_test,
    real_gaps,
    real_spectrum_test,
)
from pthill.bloch import number_eigenvalues
from pthill.monodromy import discriminant_derivatives
from pthill._common import DEFAULT_TOLERANCES as TOL

from conftest import FAST, spectrum


def test_free_band_segments(free4):
    _, _, spec = free4
    for b in spec.bands:
        if b.n > 0:
            assert b.real_segment == pytest.approx(((2 * math.pi * b.n) ** 2, (2 * math.pi * b.n + math.pi) ** 2))
        assert not b.has_left_tail and not b.has_right_tail
        assert detect_complexation_points(b, presets.zero(), FAST) == []
    assert spec.real_gaps == []
    assert conjugation_symmetry_check(spec) == 0.0


def test_cos_band_one_is_real_and_simple(cos8):
    _, _, spec = cos8
    b = spec.band(1)
    assert b.real_segment is not None
    assert not b.has_left_tail and not b.has_right_tail
    assert b.multiplicity[0] == 1 and b.multiplicity[-1] == 1


def test_cos_has_no_complexation_points(cos8):
    _, _, spec = cos8
    assert spec.complexation_points == []


def test_sawtooth_band_three_has_both_tails(sawtooth16):
    q, _, spec = sawtooth16
    b = spec.band(3)
    assert b.has_left_tail and b.has_right_tail
    assert b.eps_n > 0 and b.delta_n > 0
    pts = [p for p in spec.complexation_points if p.n == 3]
    assert len(pts) == 2
    for p in pts:
        dF, _ = discriminant_derivatives(q, p.lam)
        assert abs(dF) < TOL.mult


def test_band_invariants(sawtooth16):
    _, tracker, spec = sawtooth16
    for b in spec.bands:
        assert np.all(np.diff(b.t) > 0)
        real = np.abs(b.lam.imag) < TOL.real * np.maximum(1, np.abs(b.lam))
        if b.real_segment is not None:
            lo = b.eps_n or 0.0
            hi = math.pi - (b.delta_n or 0.0)
            inner = (b.t > lo + PARAM_TOL) & (b.t < hi - PARAM_TOL)
            assert np.all(real[inner])
        for tail in (b.left_tail, b.right_tail):
            if tail:
                closing = {tail[-1][0], tail[0][0]}
                for t, z in tail:
                    if t not in closing:
                        assert abs(z.imag) >= scaled(TOL.real, z)
        # both endpoints real implies the whole band is real
        if real[0] and real[-1]:
            assert np.all(real)


def test_tails_match_endpoint_reality(sawtooth16):
    _, tracker, spec = sawtooth16
    for b in spec.bands:
        if abs(b.n) <= tracker.loc.n_cut:
            continue
        z0, zpi = b.endpoints
        assert b.has_left_tail == (abs(z0.imag) >= scaled(TOL.real, z0))
        assert b.has_right_tail == (abs(zpi.imag) >= scaled(TOL.real, zpi))


def test_eps_decreases(sawtooth16):
    _, _, spec = sawtooth16
    eps = [spec.band(n).eps_n for n in range(4, 17)]
    assert all(e is not None for e in eps)
    assert all(b <= a * (1 + 1e-3) + PARAM_TOL for a, b in zip(eps, eps[1:]))


def test_real_spectrum_test_verdicts():
    assert real_spectrum_test(presets.zero(), 3, FAST).verdict is Verdict.YES
    assert real_spectrum_test(presets.cos(1.0), 3, FAST).verdict is Verdict.YES
    out = real_spectrum_test(presets.sawtooth(), 3)
    assert out.verdict is Verdict.NO
    assert abs(out.witness.imag) > 0.1


def test_half_line_verdicts():
    assert half_line_test(presets.zero(), 4, FAST).verdict is Verdict.YES
    out = half_line_test(presets.cos(1.0), 4)
    assert out.verdict is Verdict.NO
    # the first pair to split is the antiperiodic one near pi^2
    assert out.witness.real == pytest.approx(math.pi ** 2, rel=0.2)
    assert half_line_test(presets.gasymov((1.0,)), 6).verdict is Verdict.YES


def test_real_gaps_merge():
    class B:
        def __init__(self, seg):
            self.real_segment = seg

    bands = [B((0.0, 1.0)), B((1.0 + 5e-7, 2.0)), B((3.0, 4.0)), B(None)]
    assert real_gaps(bands, 1e-6) == [(2.0, 3.0)]


def test_cos_gaps_open(cos8):
    _, _, spec = cos8
    gaps = spec.real_gaps
    assert len(gaps) >= 3
    assert all(a < b for a, b in gaps)
    assert all(g1[1] <= g2[0] for g1, g2 in zip(gaps, gaps[1:]))
    for a, b in gaps:
        for band in spec.bands:
            if band.real_segment is not None:
                lo, hi = band.real_segment
                assert hi <= a + TOL.merge or lo >= b - TOL.merge


def test_sawtooth_gap_count_stabilises(sawtooth16):
    _, _, spec = sawtooth16
    counts = []
    for m in range(8, 17):
        sub = [b for b in spec.bands if abs(b.n) <= m]
        counts.append(len(real_gaps(sub)))
    assert len(set(counts)) == 1


def test_conjugation_symmetry():
    _, _, spec = spectrum("mathieu", 6, a=1.0, b=-1.0)
    assert conjugation_symmetry_check(spec) < 1e-6


def test_sawtooth_conjugation(sawtooth16):
    _, _, spec = sawtooth16
    assert spec.conjugation_asymmetry < 1e-6


def test_build_band_free_curve():
    curves = number_eigenvalues(presets.zero(), np.linspace(0, math.pi, 9), (1, 2), FAST)
    b = build_band(curves[2])
    assert b.real_segment == pytest.approx(((4 * math.pi) ** 2, (5 * math.pi) ** 2))
    assert b.eps_n is None and b.delta_n is None


def test_verdicts_present(sawtooth16):
    _, _, spec = sawtooth16
    assert spec.verdicts["spectrum_real"] is Verdict.NO
    assert spec.verdicts["half_line"] is Verdict.NO
    assert spec.verdicts["finite_gaps"] is Verdict.INCONCLUSIVE
