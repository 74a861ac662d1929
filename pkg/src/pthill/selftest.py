"""Quick closed-form checks run by ``pt-hill selftest``."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ._common import Verdict
from .asymptotics import series_terms
from .bands import build_spectrum
from .bloch import BandTracker, eigenvalues_in_region, matrix_oracle, multiplicity_of
from .monodromy import IntegratorConfig, discriminant, discriminant_derivatives, solve_basis
from .potential import PotentialSpec, check_pt_symmetry, fourier_coefficient, real_imag_split
from .presets import cos, mathieu, zero
from .singularities import mathieu_isospectrality_check

_CFG = IntegratorConfig(step_count=512)


def _close(a, b, tol=1e-8) -> bool:
    return abs(complex(a) - complex(b)) <= tol * max(1.0, abs(complex(b)))


def _free_monodromy() -> bool:
    s = solve_basis(zero(), math.pi ** 2, _CFG)
    return _close(s.theta1, -1.0) and _close(s.phi1, 0.0) and _close(s.F, -2.0)


def _free_discriminant() -> bool:
    q = zero()
    return (
        _close(discriminant(q, 4 * math.pi ** 2, _CFG), 2.0)
        and _close(discriminant(q, -1.0, _CFG), 2.0 * math.cosh(1.0))
        and abs(discriminant_derivatives(q, math.pi ** 2, _CFG)[0]) < 1e-9
    )


def _coefficients() -> bool:
    q = cos(1.0)
    skew = PotentialSpec({1: 1.0, -1: -1.0})
    return (
        _close(fourier_coefficient(q, 1), 1.0)
        and check_pt_symmetry(q)[0]
        and check_pt_symmetry(skew)[0]
        and real_imag_split(skew, 1) == (0.0, 1.0)
    )


def _free_roots() -> bool:
    lam = (2.5 * math.pi) ** 2
    ev = eigenvalues_in_region(zero(), math.pi / 2, (lam - 5, lam + 5, -5, 5), _CFG)
    ok = len(ev) == 1 and _close(ev[0].lam, lam)
    return ok and multiplicity_of(zero(), 4 * math.pi ** 2, 0.0, _CFG) == 2


def _matrix_oracle() -> bool:
    vals = np.sort(matrix_oracle(zero(), 0.3, 8).real)
    ref = np.sort([(2 * math.pi * k + 0.3) ** 2 for k in range(-8, 9)])
    return np.allclose(vals, ref, rtol=1e-12)


def _free_bands() -> bool:
    spec = build_spectrum(zero(), n_max=2, cfg=_CFG, t_grid=np.linspace(0, math.pi, 9))
    ok = all(
        _close(z, (2 * math.pi * b.n + t) ** 2)
        for b in spec.bands for t, z in zip(b.t, b.lam)
    )
    return ok and not spec.complexation_points and spec.verdicts["spectrum_real"] is Verdict.YES


def _free_series() -> bool:
    sv = series_terms(zero(), (10 * math.pi + 0.01) ** 2, 0.01, 5)
    return sv.A == 0 and sv.C == 0 and _close(sv.D, (4 * math.pi * 5 * 0.01) ** 2)


def _tracker_continuity() -> bool:
    tr = BandTracker(cos(1.0), 2, _CFG)
    grid = np.linspace(0.0, math.pi, 17)
    curves = tr.curves(grid, (-2, 2))
    return all(np.max(np.abs(np.diff(c.lam))) < 40
               for c in curves.values())


def _mathieu_pair() -> bool:
    return mathieu_isospectrality_check(2.0, 0.5, 1.0, 1.0, np.linspace(-10, 100, 12), _CFG) < 1e-6


def _mathieu_samples() -> bool:
    q = mathieu(1.0, 1.0)
    return _close(discriminant(q, 10.0, _CFG), discriminant(cos(1.0), 10.0, _CFG))


CHECKS: list[tuple[str, Callable[[], bool]]] = [
    ("free monodromy at pi^2", _free_monodromy),
    ("free discriminant values", _free_discriminant),
    ("Fourier coefficients and PT test", _coefficients),
    ("free eigenvalues in a rectangle", _free_roots),
    ("matrix oracle, q = 0", _matrix_oracle),
    ("free bands", _free_bands),
    ("series terms, q = 0", _free_series),
    ("band continuity, cosine", _tracker_continuity),
    ("Mathieu pair with equal product", _mathieu_pair),
    ("Mathieu preset equals cosine", _mathieu_samples),
]


def run_selftest(verbose: bool = True) -> bool:
    """Run every check and print one line per check; return overall success."""
    passed = 0
    for name, check in CHECKS:
        try:
            ok = bool(check())
            note = ""
        except Exception as exc:  # a crash counts as a failure
            ok, note = False, f" ({type(exc).__name__}: {exc})"
        passed += ok
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'}  {name}{note}")
    print(f"{passed}/{len(CHECKS)} checks passed")
    return passed == len(CHECKS)
