"""Acceptance suite.  Each test records PASS/FAIL in ``conftest.ACCEPTANCE``.

The summary lines are printed at the end of the pytest run.
"""

import cmath
import math
import time

import numpy as np
import pytest

from pthill import presets
from pthill._common import DEFAULT_TOLERANCES as TOL
from pthill._common import Verdict, scaled
from pthill.asymptotics import band_reality_criterion, d_equation_residual, finite_gap_tests, reality_criterion_D
from pthill.bands import build_spectrum, conjugation_symmetry_check, half_line_test, real_gaps
from pthill.bloch import BandTracker, matrix_oracle
from pthill.monodromy import DEFAULT_CONFIG, discriminant_derivatives, evaluate
from pthill.singularities import (
    all_real_and_simple,
    mathieu_isospectrality_check,
    sets_coincide,
    singularity_scan,
    singularity_sets,
)

import conftest
from conftest import spectrum

pytestmark = pytest.mark.slow


def record(num: int, ok: bool, detail: str) -> None:
    conftest.ACCEPTANCE[num] = (bool(ok), detail)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


PT_PRESETS = {
    "zero": presets.zero(),
    "cos": presets.cos(1.0),
    "mathieu(1,1)": presets.mathieu(1.0, 1.0),
    "mathieu(1,-1)": presets.mathieu(1.0, -1.0),
    "gasymov": presets.gasymov((1.0,)),
    "sawtooth": presets.sawtooth(),
}


def test_criterion_01_free_exactness():
    start = time.perf_counter()
    q = presets.zero()
    grid = np.linspace(0.0, math.pi, 33)
    tracker = BandTracker(q, 8)
    spec = build_spectrum(q, 8, t_grid=grid, tracker=tracker)
    band_err = max(
        float(np.max(np.abs(b.lam - (2 * math.pi * b.n + b.t) ** 2))) for b in spec.bands
    )
    lam = np.linspace(0.0, 1000.0, 101)
    F = evaluate(q, lam, DEFAULT_CONFIG, 0)[0]
    F_err = float(np.max(np.abs(F - 2 * np.cos(np.sqrt(lam)))))
    elapsed = time.perf_counter() - start
    ok = band_err < 1e-8 and F_err < 1e-8 and elapsed < 30
    record(1, ok, f"band error {band_err:.2e}, F error {F_err:.2e}, {elapsed:.1f} s")


def test_criterion_02_oracle_equivalence():
    start = time.perf_counter()
    ts = [0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi]
    cases = {
        "cos": presets.cos(1.0),
        "mathieu(1,-1)": presets.mathieu(1.0, -1.0),
        "gasymov": presets.gasymov((1.0,)),
        "sawtooth": presets.sawtooth(),
    }
    worst, where = 0.0, ""
    for name, q in cases.items():
        tracker = BandTracker(q, 8)
        tracker.run(ts)
        for t in ts:
            oracle = matrix_oracle(q, t, 64)
            for n in range(-8, 9):
                z = tracker.eigenvalue(n, t)
                err = float(np.min(np.abs(oracle - z))) / max(1.0, abs(z))
                if err > worst:
                    worst, where = err, f"{name} n={n} t={t:.4f}"
    elapsed = time.perf_counter() - start
    ok = worst < 1e-6 and elapsed < 300
    record(2, ok, f"max relative deviation {worst:.2e} ({where}), {elapsed:.1f} s")


def test_criterion_03_pt_realness():
    lam = np.linspace(-20.0, 1500.0, 201)
    worst = {name: float(np.max(np.abs(evaluate(q, lam, DEFAULT_CONFIG, 0)[0].imag)))
             for name, q in PT_PRESETS.items()}
    top = max(worst, key=worst.get)
    record(3, worst[top] < 1e-9, f"max |Im F| {worst[top]:.2e} ({top})")


def test_criterion_04_isospectrality():
    grid = np.linspace(-10.0, 500.0, 101)
    first = mathieu_isospectrality_check(2.0, 1.0, math.sqrt(2.0), math.sqrt(2.0), grid)
    second = mathieu_isospectrality_check(1.0, -1.0, -1.0, 1.0, grid)
    record(4, max(first, second) < 1e-8, f"deviations {first:.2e}, {second:.2e}")


def test_criterion_05_real_mathieu_spectrum():
    notes, ok = [], True
    for a, b in ((1.0, 1.0), (2.0, 0.5)):
        _, _, spec = spectrum("mathieu", 8, a=a, b=b)
        real = all(
            abs(z.imag) < TOL.real * max(1.0, abs(z)) for band in spec.bands for z in band.lam
        )
        simple = all_real_and_simple(spec.bands)
        multiple = sorted({band.n for band in spec.bands if np.any(band.multiplicity > 1)}, key=abs)
        gaps = len(spec.real_gaps)
        ok &= real and simple and gaps >= 3
        notes.append(
            f"({a:g},{b:g}): real={real} simple={simple} gaps={gaps}"
            + (f" multiple at n={multiple}" if multiple else "")
        )
    record(5, ok, "; ".join(notes))


def test_criterion_06_one_sided_potential():
    _, tracker, spec = spectrum("gasymov", 8)
    top = (16 * math.pi) ** 2
    segs = sorted(b.real_segment for b in spec.bands if b.real_segment is not None)
    covered = segs[0][0] <= TOL.merge
    reach = segs[0][1]
    for lo, hi in segs[1:]:
        if lo > reach + TOL.merge:
            break
        reach = max(reach, hi)
    covered &= reach >= top
    gaps = [g for g in real_gaps(spec.bands, TOL.merge) if g[0] < top]
    lowest = min(spec.bands, key=lambda b: b.lam[0].real)
    doubles = all(
        m == 2
        for b in spec.bands
        for i, m in ((0, b.multiplicity[0]), (-1, b.multiplicity[-1]))
        if not (b is lowest and i == 0)
    )
    verdict = half_line_test(n_max=8, tracker=tracker).verdict
    ok = covered and not gaps and doubles and verdict is Verdict.YES
    record(6, ok, f"covered={covered} gaps={len(gaps)} double edges={doubles} half_line={verdict.value}")


def test_criterion_07_tails_and_criteria(sawtooth16):
    q, tracker, spec = sawtooth16
    ns = range(6, 13)
    criteria = all(band_reality_criterion(q, n, tracker=tracker) is Verdict.NO for n in ns)
    tails = all(spec.band(n).has_left_tail and spec.band(n).has_right_tail for n in ns)
    points = [p for p in spec.complexation_points if abs(p.n) in ns]
    edge = max(abs(discriminant_derivatives(q, p.lam)[0]) for p in points)
    records = singularity_scan(q, (-16, 16), bands=spec.bands, tracker=tracker)
    comp, mult, ends = (
        [(n, t) for n, t in s if abs(n) in ns] for s in singularity_sets(spec.bands, records)
    )
    sets_ok = bool(comp) and sets_coincide(comp, mult) and sets_coincide(comp, ends)
    trend = True
    for n in ns:
        D = reality_criterion_D(q, n, 0.0, tracker=tracker).D
        ratio = D / (q.coefficient(2 * n) * q.coefficient(-2 * n)).real
        trend &= D < 0 and (n < 8 or abs(ratio - 1) <= 0.5)
    ok = criteria and tails and edge < TOL.mult and sets_ok and trend
    record(
        7, ok,
        f"criterion no={criteria} tails={tails} max|F'|={edge:.1e} sets={sets_ok} D trend={trend}",
    )


def test_criterion_08_finite_gap_verdicts(sawtooth16):
    saw = finite_gap_tests(presets.sawtooth())
    saw_ok = (saw.pn_test, saw.g_test, saw.jump_test) == (Verdict.YES,) * 3
    cos_g = finite_gap_tests(presets.cos(1.0), s=0).g_test
    _, _, spec = sawtooth16
    counts = [len(real_gaps([b for b in spec.bands if abs(b.n) <= m])) for m in range(8, 17)]
    stable = len(set(counts)) == 1
    ok = saw_ok and cos_g is Verdict.NO and stable
    record(8, ok, f"sawtooth all yes={saw_ok}, cos g_decay={cos_g.value}, gap counts {counts}")


def test_criterion_09_eigenvalue_asymptotics(sawtooth16):
    _, tracker, _ = sawtooth16
    t = math.pi / 2
    ns = np.arange(4, 17)
    vals = np.array(
        [abs(tracker.eigenvalue(int(n), t) - (2 * math.pi * n + t) ** 2) * n / math.log(n) for n in ns]
    )
    const = float(vals.max())
    top = ns >= 10
    slope = float(np.polyfit(ns[top], vals[top], 1)[0])
    record(9, const <= 10 and slope <= 0, f"fitted constant {const:.3e}, top-half slope {slope:.2e}")


def test_criterion_10_conjugation_symmetry(sawtooth16, cos8):
    spectra = {
        "zero": spectrum("zero", 8)[2],
        "cos": cos8[2],
        "mathieu(1,1)": spectrum("mathieu", 8, a=1.0, b=1.0)[2],
        "mathieu(1,-1)": spectrum("mathieu", 8, a=1.0, b=-1.0)[2],
        "gasymov": spectrum("gasymov", 8)[2],
        "sawtooth": sawtooth16[2],
    }
    worst = {name: conjugation_symmetry_check(s) for name, s in spectra.items()}
    top = max(worst, key=worst.get)
    record(10, worst[top] < 1e-6, f"largest partner distance {worst[top]:.2e} ({top})")


def test_criterion_11_residual_decrease(sawtooth16, cos8):
    failures = []
    for name, (q, tracker, _) in (("sawtooth", sawtooth16), ("cos", cos8)):
        for n in (8, 12):
            for t in (0.01, 0.02):
                r = [d_equation_residual(q, n, t, k, tracker=tracker) for k in (2, 3, 4)]
                if not (r[0] > r[1] > r[2]):
                    failures.append(f"{name} n={n} t={t}: " + ", ".join(f"{v:.3e}" for v in r))
    detail = "strictly decreasing everywhere" if not failures else "; ".join(failures)
    record(11, not failures, detail)
