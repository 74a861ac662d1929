"""Spectral singularities, projection-norm diagnostics and Mathieu facts.

For PT-symmetric potentials every multiple Bloch eigenvalue at an interior
quasimomentum is a real critical point ``c`` of ``F`` with ``|F(c)| < 2``; the
quasimomentum is then ``arccos(F(c)/2)``.  The scan here locates critical
points on its own grid, independently of the band construction, so the two
routes can be compared.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import simpson

from ._common import DEFAULT_TOLERANCES, Tolerances, Verdict, scaled
from .bands import Band
from .bloch import DEFAULT_LOCALIZATION, BandTracker, LocalizationConfig, multiplicity_of
from .errors import DiagnosticUndefinedError, PreconditionError, ValidationError
from .monodromy import DEFAULT_CONFIG, IntegratorConfig, evaluate, solution_path, solve_basis
from .potential import PotentialSpec, sp_membership
from . import presets

INTERIOR = "interior-multiple"
BAND_EDGE = "band-edge-degenerate"
T_MATCH = 1e-5


@dataclass
class SingularityRecord:
    """A multiple Bloch eigenvalue.

    ``kind`` is ``"interior-multiple"`` for ``t`` in ``(0, pi)`` and
    ``"band-edge-degenerate"`` at ``t = 0`` or ``pi``.  ``is_complexation``
    tells whether a band reports a complexation point there, and
    ``consistent`` is False when that cross-check fails for an index beyond
    the localisation cut.
    """

    n: tuple[int, ...]
    t: float
    lam: complex
    kind: str
    multiplicity: int
    projection_kappa: float | None = None
    is_complexation: bool = False
    consistent: bool = True


def _critical_scan(q: PotentialSpec, a: float, b: float, cfg: IntegratorConfig, step: float = math.pi / 24):
    """Real zeros of ``F'`` on ``[a, b]`` from sign changes on a grid uniform in ``sqrt``."""
    pos = np.arange(math.sqrt(max(a, 0.0)), math.sqrt(b) + step, step) ** 2
    neg = np.linspace(a, 0.0, max(2, int((0.0 - a) / 2.0) + 1))[:-1] if a < 0 else np.empty(0)
    grid = np.unique(np.concatenate([neg, pos]))
    grid = grid[(grid >= a) & (grid <= b)]
    _, d1 = evaluate(q, grid, cfg, 1)
    d1 = d1.real
    roots = []
    for i in np.flatnonzero(np.sign(d1[:-1]) * np.sign(d1[1:]) <= 0):
        lo, hi = grid[i], grid[i + 1]
        flo = d1[i]
        if flo == 0.0:
            roots.append(lo)
            continue
        x = lo - flo * (hi - lo) / (d1[i + 1] - flo)
        for _ in range(60):
            _, f1, f2 = (v[0].real for v in evaluate(q, [x], cfg, 2))
            if (f1 > 0) == (flo > 0):
                lo = x
            else:
                hi = x
            xn = x - f1 / f2 if f2 != 0 else 0.5 * (lo + hi)
            if not lo < xn < hi:
                xn = 0.5 * (lo + hi)
            if abs(xn - x) <= 1e-13 * max(1.0, abs(x)):
                x = xn
                break
            x = xn
        roots.append(x)
    crit = np.array(sorted(set(roots)))
    if not crit.size:
        return crit, np.empty(0), np.empty(0)
    Fc, _, F2c = evaluate(q, crit, cfg, 2)
    return crit, Fc.real, F2c.real


def _indices_at(tracker: BandTracker, t: float, lam: complex, n_range) -> tuple[int, ...]:
    tracker.eigenvalue(n_range[0], t)
    tol = 10.0 * scaled(tracker.tol.cluster, lam)
    return tuple(
        n for n in range(n_range[0], n_range[1] + 1)
        if abs(tracker._known[t][n][0] - lam) <= max(tol, 1e-3 * math.sqrt(max(abs(lam), 1.0)))
    )


def singularity_scan(
    q: PotentialSpec,
    n_range: tuple[int, int] = (-8, 8),
    t_grid: Iterable[float] | None = None,
    *,
    bands: Sequence[Band] | None = None,
    tracker: BandTracker | None = None,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    loc: LocalizationConfig = DEFAULT_LOCALIZATION,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[SingularityRecord]:
    """Multiple Bloch eigenvalues of bands ``n_range``.

    For PT-symmetric potentials the real critical points of ``F`` are located
    on a grid of their own; ``|F(c)| < 2`` gives an interior record at
    ``t = arccos(F(c)/2)`` and ``|F(c)| = 2`` a band-edge record.  "Equal"
    means the two roots of ``F = +-2`` next to ``c`` lie closer than the
    cluster tolerance, the same rule the root solver uses.  Otherwise the samples of the tracker on ``t_grid`` with
    multiplicity two or more are reported.  Each record is compared with the
    complexation points of ``bands`` when given.
    """
    lo, hi = int(n_range[0]), int(n_range[1])
    if lo > hi:
        raise ValidationError("n_range must satisfy lo <= hi")
    n_max = max(abs(lo), abs(hi))
    tracker = tracker or BandTracker(q, n_max, cfg, loc, tol)
    if math.pi / 2 not in tracker._known:
        tracker.run(t_grid if t_grid is not None else np.linspace(0.0, math.pi, 9))
    records: list[SingularityRecord] = []
    if tracker.pt:
        # stop half way between the last scanned band and the next one
        top = (2.0 * math.pi * (n_max + 0.75)) ** 2
        crit, Fc, F2c = _critical_scan(q, tracker.a, top, cfg)
        for c, Fv, F2 in zip(crit, Fc, F2c):
            touch = abs(F2) * scaled(tol.cluster, c) ** 2 / 8.0
            if abs(Fv) > 2.0 + touch:
                continue
            if abs(abs(Fv) - 2.0) <= touch:
                t, kind = (0.0 if Fv > 0 else math.pi), BAND_EDGE
            else:
                t, kind = math.acos(Fv / 2.0), INTERIOR
            ns = _indices_at(tracker, t, complex(c), (lo, hi))
            if not ns:
                continue
            mult = multiplicity_of(q, complex(c), t, cfg, tol.mult)
            records.append(SingularityRecord(ns, t, complex(c), kind, max(mult, len(ns))))
    else:
        grid = sorted(tracker._known) if t_grid is None else sorted(float(t) for t in t_grid)
        for t in grid:
            tracker.eigenvalue(lo, t)
            seen = []
            for n in range(lo, hi + 1):
                lam, mult, _, _ = tracker._known[t][n]
                if mult < 2 or any(abs(lam - s) < scaled(tol.cluster, lam) * 10 for s in seen):
                    continue
                seen.append(lam)
                kind = BAND_EDGE if t in (0.0, math.pi) else INTERIOR
                ns = tuple(m for m in range(lo, hi + 1)
                           if abs(tracker._known[t][m][0] - lam) < scaled(tol.cluster, lam) * 10)
                records.append(SingularityRecord(ns, t, complex(lam), kind, int(mult)))
    if bands is not None:
        _cross_check(records, bands, loc.n_cut)
    records.sort(key=lambda r: (r.lam.real, r.t))
    return records


def _cross_check(records: list[SingularityRecord], bands: Sequence[Band], n_cut: int) -> None:
    by_n = {b.n: b for b in bands}
    for r in records:
        if r.kind != INTERIOR:
            continue
        hits = [
            n for n in r.n
            if n in by_n and any(abs(p.t - r.t) <= T_MATCH for p in by_n[n].complexation)
        ]
        r.is_complexation = bool(hits)
        large = [n for n in r.n if abs(n) > n_cut and n in by_n]
        if large and set(large) - set(hits):
            r.consistent = False


def singularity_sets(bands: Sequence[Band], records: Sequence[SingularityRecord], n_min: int = 0):
    """The three sets ``(complexation points, interior multiples, tail ends)`` as ``(n, t)`` pairs."""
    comp = sorted((p.n, p.t) for b in bands if abs(b.n) >= n_min for p in b.complexation)
    mult = sorted(
        (n, r.t) for r in records if r.kind == INTERIOR for n in r.n if abs(n) >= n_min
    )
    ends = []
    for b in bands:
        if abs(b.n) < n_min:
            continue
        if b.left_tail:
            ends.append((b.n, b.left_tail[-1][0]))
        if b.right_tail:
            ends.append((b.n, b.right_tail[0][0]))
    return comp, mult, sorted(ends)


def sets_coincide(first, second, t_tol: float = T_MATCH) -> bool:
    """Do two lists of ``(n, t)`` pairs match one-to-one within ``t_tol``?"""
    if len(first) != len(second):
        return False
    pool = list(second)
    for n, t in first:
        hit = next((i for i, (m, s) in enumerate(pool) if m == n and abs(s - t) <= t_tol), None)
        if hit is None:
            return False
        pool.pop(hit)
    return True


# ---------------------------------------------------------------------------
# projection-norm diagnostic
# ---------------------------------------------------------------------------


def _floquet_vector(M: np.ndarray, mu: complex) -> np.ndarray:
    rows = M - mu * np.eye(2)
    r = rows[0] if np.abs(rows[0]).sum() >= np.abs(rows[1]).sum() else rows[1]
    if not np.any(r):
        return np.array([1.0, 0.0], dtype=complex)
    v = np.array([r[1], -r[0]], dtype=complex)
    return v / np.linalg.norm(v)


def _floquet_function(q: PotentialSpec, lam: complex, t: float, cfg: IntegratorConfig):
    sample = solve_basis(q, lam, cfg)
    v = _floquet_vector(sample.monodromy, cmath.exp(1j * t))
    x, Y = solution_path(q, lam, cfg)
    return x, Y[:, 0, 0] * v[0] + Y[:, 0, 1] * v[1]


def projection_norm_diagnostic(
    q: PotentialSpec,
    n: int,
    t: float,
    *,
    lam: complex | None = None,
    tracker: BandTracker | None = None,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """``kappa = |psi| |psi*| / |<psi, psi*>|`` for the eigenvalue ``lambda_n(t)``.

    ``psi`` is the Floquet solution with multiplier ``exp(i t)``; ``psi*``
    solves the adjoint equation with potential ``conj(q)`` at ``conj(lambda)``
    and the same multiplier.  Norms use Simpson's rule on the integrator's
    step boundaries.  ``kappa`` is 1 for self-adjoint-like eigenvalues and
    blows up near a spectral singularity.

    Raises
    ------
    DiagnosticUndefinedError
        If ``lambda_n(t)`` is a multiple eigenvalue.
    """
    if lam is None:
        if tracker is None:
            tracker = BandTracker(q, abs(n) + 1, cfg, tol=tol)
            tracker.run(np.linspace(0.0, math.pi, 9))
        lam = tracker.eigenvalue(n, t)
    lam = complex(lam)
    if multiplicity_of(q, lam, t, cfg, tol.mult) > 1:
        raise DiagnosticUndefinedError(
            f"lambda_{n}({t:.6g}) = {lam:.10g} is a multiple eigenvalue"
        )
    x, psi = _floquet_function(q, lam, t, cfg)
    _, adj = _floquet_function(q.conjugate(), lam.conjugate(), t, cfg)
    norm = math.sqrt(simpson(np.abs(psi) ** 2, x=x))
    norm_adj = math.sqrt(simpson(np.abs(adj) ** 2, x=x))
    inner = simpson(psi * np.conj(adj), x=x)
    if inner == 0:
        return math.inf
    return float(norm * norm_adj / abs(inner))


# ---------------------------------------------------------------------------
# spectrality verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralityVerdict:
    verdict: Verdict
    reason: str
    failing: tuple[int, ...] = ()


def asymptotic_spectrality_verdict(
    q: PotentialSpec,
    n_range: tuple[int, int] = (6, 16),
    sp: Verdict | None = None,
) -> SpectralityVerdict:
    """Asymptotic spectrality for potentials of the class ``S_p``.

    Inside the class the operator is asymptotically spectral exactly when the
    edge products ``q_{2n} q_{-2n}`` and ``q_{2n+1} q_{-2n-1}`` are positive
    for all large ``n``; the scan checks ``n`` in ``n_range``.
    """
    if sp is None:
        sp = sp_membership(q, max(q.n_q, 0)).holds if q.n_q >= 32 else Verdict.NO
    if sp is not Verdict.YES:
        return SpectralityVerdict(
            Verdict.INCONCLUSIVE,
            "class membership not established; for Mathieu potentials see mathieu_spectrality",
        )
    lo, hi = int(n_range[0]), int(n_range[1])
    coeff = {k: v.real for k, v in q.coeffs.items()}
    failing = []
    for n in range(lo, hi + 1):
        for m in (2 * n, 2 * n + 1):
            if abs(m) > q.n_q:
                return SpectralityVerdict(Verdict.INCONCLUSIVE, f"index {m} beyond the table")
            if coeff.get(m, 0.0) * coeff.get(-m, 0.0) <= 0:
                failing.append(n)
                break
    if failing:
        return SpectralityVerdict(Verdict.NO, "edge product not positive", tuple(failing))
    return SpectralityVerdict(Verdict.YES, f"edge products positive for {lo} <= n <= {hi}")


@dataclass(frozen=True)
class MathieuCase:
    """Real Mathieu pair with ``alpha = arg(ab) / pi``."""

    a: float
    b: float
    alpha: float
    product: float


@dataclass(frozen=True)
class MathieuSpectrality:
    spectral: bool
    asymptotically_spectral: Verdict
    reason: str
    case: MathieuCase = field(default=None)


def _real_param(name: str, v) -> float:
    if isinstance(v, complex):
        if v.imag != 0:
            raise ValidationError(f"Mathieu parameter {name} must be real")
        v = v.real
    v = float(v)
    if not math.isfinite(v):
        raise ValidationError(f"Mathieu parameter {name} must be finite")
    return v


def mathieu_case(a: float, b: float) -> MathieuCase:
    a, b = _real_param("a", a), _real_param("b", b)
    product = a * b
    return MathieuCase(a, b, 1.0 if product < 0 else 0.0, product)


def mathieu_spectrality(a: float, b: float) -> MathieuSpectrality:
    """Spectrality facts for ``q = a exp(-2 pi i x) + b exp(2 pi i x)`` with real ``a, b``."""
    case = mathieu_case(a, b)
    spectral = case.a == case.b
    if abs(case.a) != abs(case.b):
        return MathieuSpectrality(spectral, Verdict.NO, "|a| != |b|: spectral singularity at infinity", case)
    if case.alpha == 0.0:
        return MathieuSpectrality(spectral, Verdict.YES, "|a| = |b| and ab >= 0 (alpha = 0)", case)
    return MathieuSpectrality(spectral, Verdict.NO, "|a| = |b| and ab < 0 (alpha = 1)", case)


def mathieu_isospectrality_check(
    a: float,
    b: float,
    c: float,
    d: float,
    lam_grid: Iterable[float] | None = None,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
) -> float:
    """``max |F_(a,b)(lambda) - F_(c,d)(lambda)|`` over ``lam_grid``.

    Raises
    ------
    PreconditionError
        If ``ab`` and ``cd`` differ by more than ``1e-12``.
    """
    a, b, c, d = (_real_param(k, v) for k, v in zip("abcd", (a, b, c, d)))
    if abs(a * b - c * d) > 1e-12:
        raise PreconditionError(f"ab = {a * b:.17g} differs from cd = {c * d:.17g}")
    grid = np.linspace(-10.0, 500.0, 101) if lam_grid is None else np.asarray(list(lam_grid), float)
    if grid.size == 0:
        raise ValidationError("lam_grid must not be empty")
    F1 = evaluate(presets.mathieu(a, b), grid, cfg, 0)[0]
    F2 = evaluate(presets.mathieu(c, d), grid, cfg, 0)[0]
    return float(np.max(np.abs(F1 - F2)))


def all_real_and_simple(bands: Sequence[Band], tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """All samples of ``bands`` real and simple (``|F'| >= tau_mult``)."""
    for b in bands:
        for z, m, ok in zip(b.lam, b.multiplicity, b.simple):
            if abs(z.imag) >= scaled(tol.real, z) or m != 1 or not ok:
                return False
    return True

