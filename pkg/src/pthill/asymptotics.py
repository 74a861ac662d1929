"""Perturbation series for large-index eigenvalues and coefficient criteria.

Near ``t = 0`` the eigenvalues with indices ``n`` and ``-n`` are close to the
pair of free levels ``(2 pi n +- t)**2``; near ``t = pi`` the pair is
``n, -(n+1)`` around ``(2 pi (n + 1/2) +- (t - pi))**2``.  Writing ``nu`` for
the pair's centre (``|n|`` or ``|n + 1/2|``) and ``s = t`` or ``t - pi``, the
eigenvalue solves

    (lam - (2 pi nu)**2 - s**2 - (A + A')/2)**2 = D(lam, t)

with ``A, A', B, B'`` given by resolvent-type sums over chains of Fourier
indices.  Each series is summed term by term with a transfer vector over the
chain's running index, which makes the cost linear in the number of terms.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from ._common import DEFAULT_TOLERANCES, Tolerances, Verdict
from .bloch import BandTracker
from .errors import RangeError, ResonanceError, ValidationError
from .monodromy import DEFAULT_CONFIG, IntegratorConfig
from .potential import (
    FourierTable,
    PotentialSpec,
    antiderivative_coefficients,
    check_pt_symmetry,
    fourier_coefficient,
    sp_membership,
)

DEFAULT_THRESHOLD = 6
DEFAULT_K_MAX = 4


@dataclass(frozen=True)
class SeriesValue:
    """Truncated series at one ``(lambda, t)`` for the pair centred at ``nu``.

    ``terms`` keeps the individual contributions ``a_k, a'_k, b_k, b'_k``
    for ``k = 1 .. k_max``; ``tail_estimate`` bounds the neglected part of the
    four series by geometric extrapolation of their last nonzero terms.
    """

    A: complex
    Aprime: complex
    B: complex
    Bprime: complex
    C: complex
    D: complex
    k_max: int
    index_bound: int
    tail_estimate: float
    nu: float = 0.0
    shift: float = 0.0
    terms: dict[str, np.ndarray] = field(default_factory=dict, repr=False, compare=False)
    excluded: tuple[int, ...] = ()

    @property
    def d_uncertainty(self) -> float:
        """Rough bound on the error of ``D`` caused by the truncated tails."""
        tail = self.tail_estimate
        if tail == 0.0:
            return 0.0
        scale = (
            8.0 * math.pi * self.nu * abs(self.shift)
            + 2.0 * abs(self.C)
            + abs(self.B)
            + abs(self.Bprime)
            + tail
        )
        return tail * scale


def pair_center(n: int, t: float) -> tuple[float, float]:
    """Centre ``nu`` and shifted quasimomentum of the eigenvalue pair holding index ``n``.

    ``t < pi/2`` pairs ``n`` with ``-n``; otherwise ``n`` pairs with ``-(n+1)``.
    """
    if t < 0.5 * math.pi:
        return float(abs(n)), float(t)
    return abs(n + 0.5), float(t - math.pi)


def _dense(q: PotentialSpec | FourierTable, bound: int = 0) -> tuple[np.ndarray, int]:
    """Coefficients ``q_{-m} .. q_m``; closed forms are extended to ``m = bound``."""
    if isinstance(q, FourierTable):
        return np.asarray(q.q, dtype=complex), q.n_max
    if bound > q.n_q and q.has_closed_form and not q.table_is_exact:
        return _extended(q, int(bound)), int(bound)
    return q.dense_coefficients(), q.n_q


@functools.lru_cache(maxsize=16)
def _extended(q: PotentialSpec, bound: int) -> np.ndarray:
    out = np.array([fourier_coefficient(q, k) for k in range(-bound, bound + 1)], dtype=complex)
    out[bound] = 0.0
    out.setflags(write=False)
    return out


def _geometric_tail(terms: np.ndarray) -> float:
    nz = [abs(v) for v in terms if v != 0]
    if len(nz) < 2:
        return 0.0 if len(nz) == 0 or len(terms) > 1 else math.inf
    r = nz[-1] / nz[-2]
    if r >= 1.0:
        return math.inf
    return nz[-1] * r / (1.0 - r)


def _chain_sums(qd, n_q, lam, levels, skip, close_idx, k_max):
    """Return the arrays ``a_k`` and ``b_k`` (closing at index 0 and ``close_idx``).

    ``levels[j]`` is the free level at running index ``p = j - P``; indices in
    ``skip`` are resonant and excluded.  ``qd`` holds ``q_{-n_q} .. q_{n_q}``.
    """
    P = (levels.size - 1) // 2
    p = np.arange(-P, P + 1)
    den = lam - levels
    mask = np.ones(p.size, dtype=bool)
    for s in skip:
        if -P <= s <= P:
            mask[s + P] = False
    inv = np.zeros(p.size, dtype=complex)
    inv[mask] = 1.0 / den[mask]

    def coef(idx):
        out = np.zeros(idx.shape, dtype=complex)
        ok = np.abs(idx) <= n_q
        out[ok] = qd[idx[ok] + n_q]
        return out

    close_a = coef(-p)
    close_b = coef(close_idx - p)
    a = np.zeros(k_max, dtype=complex)
    b = np.zeros(k_max, dtype=complex)
    v = coef(p) * inv
    for k in range(k_max):
        a[k] = np.dot(close_a, v)
        b[k] = np.dot(close_b, v)
        if k + 1 < k_max:
            # v_{k+1}(p') = d(p') * sum_p v_k(p) q_{p'-p}
            v = np.convolve(v, qd)[n_q : n_q + p.size] * inv
    return a, b


def series_terms(
    q: PotentialSpec | FourierTable,
    lam: complex,
    t: float,
    n: int,
    k_max: int = DEFAULT_K_MAX,
    index_bound: int | None = None,
    tau_denom: float | None = None,
) -> SeriesValue:
    """Evaluate ``A, A', B, B', C, D`` for the eigenvalue pair holding index ``n``.

    Parameters
    ----------
    q : PotentialSpec or FourierTable
    lam : complex
        Spectral parameter, typically the computed ``lambda_n(t)``.
    t : float
        Quasimomentum in ``[0, pi]``; the pair is chosen by :func:`pair_center`.
    n : int
    k_max : int
        Number of terms of each series.
    index_bound : int, optional
        Largest running index ``|n_1 + ... + n_s|``; defaults to ``2 n_q``.
    tau_denom : float, optional
        Smallest admissible denominator, default ``pi**2 max(nu, 1)``.

    Raises
    ------
    ResonanceError
        If a non-excluded free level lies within ``tau_denom`` of ``lam``.
    """
    if k_max < 1:
        raise ValidationError("k_max must be at least 1")
    if not 0.0 <= t <= math.pi:
        raise ValidationError("t must lie in [0, pi]")
    base_nq = q.n_max if isinstance(q, FourierTable) else q.n_q
    if index_bound is None:
        index_bound = 2 * max(base_nq, 1)
    P = int(index_bound)
    if P < 1:
        raise ValidationError("index_bound must be positive")
    qd, n_q = _dense(q, P)
    nu, s = pair_center(n, t)
    two_nu = int(round(2 * nu))
    if tau_denom is None:
        tau_denom = math.pi**2 * max(nu, 1.0)
    lam = complex(lam)
    p = np.arange(-P, P + 1)
    levels = (2.0 * math.pi * (nu - p) + s) ** 2
    levels_p = (2.0 * math.pi * (nu + p) - s) ** 2
    skip, skip_p = {0, two_nu}, {0, -two_nu}
    for lev, excl in ((levels, skip), (levels_p, skip_p)):
        dist = np.abs(lam - lev)
        for e in excl:
            if -P <= e <= P:
                dist[e + P] = np.inf
        j = int(np.argmin(dist))
        if dist[j] < tau_denom:
            raise ResonanceError(
                f"denominator {dist[j]:.3g} at running index {p[j]} is below {tau_denom:.3g}"
            )
    a, b = _chain_sums(qd, n_q, lam, levels, skip, two_nu, k_max)
    ap, bp = _chain_sums(qd, n_q, lam, levels_p, skip_p, -two_nu, k_max)
    A, Ap, B, Bp = a.sum(), ap.sum(), b.sum(), bp.sum()
    C = 0.5 * (A - Ap)

    def q_at(k):
        return complex(qd[k + n_q]) if abs(k) <= n_q else 0j

    q2, qm2 = q_at(two_nu), q_at(-two_nu)
    x = 4.0 * math.pi * nu * s
    D = x * x + q2 * qm2 + 2.0 * x * C + C * C + q2 * Bp + qm2 * B + B * Bp
    tail = max(_geometric_tail(arr) for arr in (a, ap, b, bp)) if k_max > 1 else math.inf
    if not (a.any() or ap.any() or b.any() or bp.any()):
        tail = 0.0
    return SeriesValue(
        A=complex(A),
        Aprime=complex(Ap),
        B=complex(B),
        Bprime=complex(Bp),
        C=complex(C),
        D=complex(D),
        k_max=int(k_max),
        index_bound=P,
        tail_estimate=float(tail),
        nu=nu,
        shift=s,
        terms={"a": a, "a_prime": ap, "b": b, "b_prime": bp},
        excluded=tuple(sorted(skip | skip_p)),
    )


def series_terms_bruteforce(
    q: PotentialSpec | FourierTable, lam: complex, t: float, n: int, k_max: int = 3
) -> SeriesValue:
    """Same quantities by explicit enumeration of index chains (slow; for checks)."""
    qd, n_q = _dense(q)
    nu, s = pair_center(n, t)
    two_nu = int(round(2 * nu))
    support = [k for k in range(-n_q, n_q + 1) if qd[k + n_q] != 0]

    def q_at(k):
        return complex(qd[k + n_q]) if abs(k) <= n_q else 0j

    def series(sign, close):
        excl = {0, sign * two_nu}
        out_a = np.zeros(k_max, dtype=complex)
        out_b = np.zeros(k_max, dtype=complex)

        def level(p):
            return (2.0 * math.pi * (nu - p) + s) ** 2 if sign > 0 else (2.0 * math.pi * (nu + p) - s) ** 2

        def walk(depth, psum, weight):
            out_a[depth - 1] += weight * q_at(-psum)
            out_b[depth - 1] += weight * q_at(close - psum)
            if depth == k_max:
                return
            for m in support:
                nxt = psum + m
                if nxt in excl:
                    continue
                walk(depth + 1, nxt, weight * q_at(m) / (lam - level(nxt)))

        for m in support:
            if m in excl:
                continue
            walk(1, m, q_at(m) / (lam - level(m)))
        return out_a, out_b

    a, b = series(+1, two_nu)
    ap, bp = series(-1, -two_nu)
    A, Ap, B, Bp = a.sum(), ap.sum(), b.sum(), bp.sum()
    C = 0.5 * (A - Ap)
    x = 4.0 * math.pi * nu * s
    q2, qm2 = q_at(two_nu), q_at(-two_nu)
    D = x * x + q2 * qm2 + 2.0 * x * C + C * C + q2 * Bp + qm2 * B + B * Bp
    return SeriesValue(complex(A), complex(Ap), complex(B), complex(Bp), complex(C), complex(D),
                       k_max, n_q, 0.0, nu, s, {"a": a, "a_prime": ap, "b": b, "b_prime": bp})


# ---------------------------------------------------------------------------
# criteria at computed eigenvalues
# ---------------------------------------------------------------------------


def _tracker_for(q: PotentialSpec, n: int, tracker: BandTracker | None, cfg: IntegratorConfig) -> BandTracker:
    if tracker is not None and tracker.n_max >= abs(n):
        return tracker
    tr = BandTracker(q, abs(n) + 1, cfg)
    tr.run(np.linspace(0.0, math.pi, 9))
    return tr


def _eigenvalue(q, n, t, lam, tracker, cfg) -> complex:
    if lam is not None:
        return complex(lam)
    return complex(_tracker_for(q, n, tracker, cfg).eigenvalue(n, t))


@dataclass(frozen=True)
class DCriterion:
    """Sign test of ``D`` at a computed eigenvalue."""

    real: bool
    D: float
    lam: complex
    evaluated_at_real_part: bool
    uncertainty: float


def reality_criterion_D(
    q: PotentialSpec,
    n: int,
    t: float,
    k_max: int = DEFAULT_K_MAX,
    *,
    lam: complex | None = None,
    tracker: BandTracker | None = None,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> DCriterion:
    """Evaluate ``D(lambda_n(t), t)`` and report whether it is non-negative.

    A nonreal eigenvalue is replaced by its real part (flagged); values of
    ``D`` within round-off of zero count as non-negative.
    """
    z = _eigenvalue(q, n, t, lam, tracker, cfg)
    moved = abs(z.imag) >= tol.real * max(1.0, abs(z))
    at = complex(z.real) if moved else z
    sv = series_terms(q, at, t, n, k_max)
    D = sv.D.real
    noise = 1e-12 * max(
        abs(4.0 * math.pi * sv.nu * sv.shift) ** 2,
        abs(sv.B * sv.Bprime),
        abs(sv.C) ** 2,
        1e-300,
    )
    return DCriterion(D >= -noise, D, z, moved, sv.d_uncertainty)


def band_reality_criterion(
    q: PotentialSpec,
    n: int,
    threshold: int = DEFAULT_THRESHOLD,
    k_max: int = DEFAULT_K_MAX,
    *,
    sp: Verdict | None = None,
    tracker: BandTracker | None = None,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Verdict:
    """Is the band with index ``n`` real (no nonreal tails)?

    For potentials of the class ``S_p`` the answer is the sign of the
    coefficient products at both band edges; otherwise ``D`` is evaluated at
    ``lambda_n(0)`` and ``lambda_n(pi)``.  Indices below ``threshold`` are
    inconclusive.
    """
    return criterion_record(
        q, n, threshold, k_max, sp=sp, tracker=tracker, cfg=cfg, tol=tol
    ).verdicts["band_real"]


def _sp_verdict(q: PotentialSpec) -> Verdict:
    if q.n_q < 32:
        return Verdict.NO if q.table_is_exact else Verdict.INCONCLUSIVE
    return sp_membership(q, p=max(0, q.n_q)).holds


@dataclass
class CriterionRecord:
    """Per-index criterion values and the verdicts derived from them."""

    n: int
    D0: float | None
    Dpi: float | None
    qq_prod: tuple[float, float]
    P_n: float | None
    verdicts: dict[str, Verdict]
    D0_uncertainty: float = 0.0
    Dpi_uncertainty: float = 0.0
    sp: Verdict = Verdict.INCONCLUSIVE


def _verdict_from_D(values: list[tuple[float, float]]) -> Verdict:
    if any(D < 0 and abs(D) > unc for D, unc in values):
        return Verdict.NO
    if all(D >= 0 for D, _ in values):
        return Verdict.YES
    return Verdict.INCONCLUSIVE


def criterion_record(
    q: PotentialSpec,
    n: int,
    threshold: int = DEFAULT_THRESHOLD,
    k_max: int = DEFAULT_K_MAX,
    *,
    sp: Verdict | None = None,
    tracker: BandTracker | None = None,
    table: FourierTable | None = None,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CriterionRecord:
    """Collect ``D(lambda_n(0), 0)``, ``D(lambda_n(pi), pi)``, the edge products and ``P_n``."""
    n = int(n)
    nu0 = abs(n)
    nupi = int(round(2 * abs(n + 0.5)))
    qd, n_q = _dense(q)

    def q_at(k):
        return complex(qd[k + n_q]).real if abs(k) <= n_q else 0.0

    prods = (q_at(2 * nu0) * q_at(-2 * nu0), q_at(nupi) * q_at(-nupi))
    if sp is None:
        sp = _sp_verdict(q)
    try:
        P_n = compute_Pn(table if table is not None else q, max(abs(n), 1))
    except RangeError:
        P_n = None
    if abs(n) < threshold:
        return CriterionRecord(n, None, None, prods, P_n, {"band_real": Verdict.INCONCLUSIVE}, sp=sp)
    tracker = _tracker_for(q, n, tracker, cfg)
    d0 = reality_criterion_D(q, n, 0.0, k_max, tracker=tracker, cfg=cfg, tol=tol)
    dpi = reality_criterion_D(q, n, math.pi, k_max, tracker=tracker, cfg=cfg, tol=tol)
    by_D = _verdict_from_D([(d0.D, d0.uncertainty), (dpi.D, dpi.uncertainty)])
    verdicts = {"D_test": by_D}
    if sp is Verdict.YES and all(p != 0.0 for p in prods):
        verdicts["coefficient_test"] = Verdict.from_bool(all(p > 0 for p in prods))
        verdicts["band_real"] = verdicts["coefficient_test"]
    else:
        verdicts["coefficient_test"] = Verdict.INCONCLUSIVE
        verdicts["band_real"] = by_D
    return CriterionRecord(
        n, d0.D, dpi.D, prods, P_n, verdicts, d0.uncertainty, dpi.uncertainty, sp
    )


def d_equation_residual(
    q: PotentialSpec,
    n: int,
    t: float,
    k_max: int = DEFAULT_K_MAX,
    *,
    lam: complex | None = None,
    tracker: BandTracker | None = None,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
) -> float:
    """Defect ``|(lam - (2 pi nu)**2 - s**2 - (A + A')/2)**2 - D|`` at ``lambda_n(t)``."""
    z = _eigenvalue(q, n, t, lam, tracker, cfg)
    sv = series_terms(q, z, t, n, k_max)
    lhs = z - (2.0 * math.pi * sv.nu) ** 2 - sv.shift**2 - 0.5 * (sv.A + sv.Aprime)
    return float(abs(lhs * lhs - sv.D))


# ---------------------------------------------------------------------------
# finite-gap quantities
# ---------------------------------------------------------------------------


def compute_Pn(q: PotentialSpec | FourierTable, n: int) -> float:
    """``P_n = q_n q_-n - q_n (S_-n - 2 Q_0 Q_-n) - q_-n (S_n - 2 Q_0 Q_n)``.

    Raises
    ------
    RangeError
        If the table does not reach index ``n``.
    ArithmeticError
        If the result is not real although ``q`` is PT-symmetric.
    """
    table = q if isinstance(q, FourierTable) else antiderivative_coefficients(q, abs(int(n)))
    n = int(n)
    qp, qm = table.q_at(n), table.q_at(-n)
    Q0 = table.Q0
    P = qp * qm - qp * (table.S_at(-n) - 2 * Q0 * table.Q_at(-n)) - qm * (table.S_at(n) - 2 * Q0 * table.Q_at(n))
    real_coeffs = bool(np.all(np.abs(np.asarray(table.q).imag) <= 1e-10))
    if real_coeffs and abs(P.imag) > 1e-10 * max(1.0, abs(P)):
        raise ArithmeticError(f"P_{n} has imaginary part {P.imag:.3g} for real coefficients")
    return float(P.real)


def _no_decay(n: np.ndarray, values: np.ndarray, slack: float = 0.25) -> bool:
    """True when ``values`` (positive) show no power-law decay over ``n``."""
    if n.size < 2:
        return True
    slope = np.polyfit(np.log(n), np.log(values), 1)[0]
    return bool(slope >= -slack)


@dataclass
class FiniteGapVerdicts:
    """Outcomes of the three finite-gap tests with their fitted constants."""

    pn_test: Verdict
    g_test: Verdict
    jump_test: Verdict
    alpha: float
    beta: float
    delta: float
    c: complex | None = None
    d: complex | None = None
    P: dict[int, float] = field(default_factory=dict)
    detail: dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Verdict]:
        return {"Pn": self.pn_test, "g_decay": self.g_test, "jump": self.jump_test}


def _ternary(ok: np.ndarray) -> Verdict:
    if ok.all():
        return Verdict.YES
    upper = ok[ok.size // 2 :]
    if not upper.any():
        return Verdict.NO
    return Verdict.INCONCLUSIVE


def finite_gap_tests(
    q: PotentialSpec,
    s: int | None = None,
    n_range: tuple[int, int] = (8, 32),
    delta: float = 1.5,
    asymptotic_rtol: float = 0.1,
) -> FiniteGapVerdicts:
    """Coefficient tests implying finitely many gaps in the real spectrum.

    Three sufficient conditions are checked over ``n_range``:

    * ``Pn``: ``P_n < -alpha n**(-2s-2)`` with ``alpha`` fitted.
    * ``g_decay``: ``|g_n| > beta n**(-s-1)`` and ``|g_n| > delta |f_n|``.
    * ``jump``: the ``s``-th derivative of ``q`` jumps, with imaginary jump
      ``c`` and real jump ``d`` satisfying ``|d| < |c|``; the implied decay
      ``|g_n| ~ |c| (2 pi n)**(-s-1)`` is verified.

    A test is ``yes`` when the condition holds on the whole range, ``no``
    when it fails on the entire upper half of the range.
    """
    lo, hi = int(n_range[0]), int(n_range[1])
    if not 1 <= lo <= hi:
        raise ValidationError("n_range must satisfy 1 <= lo <= hi")
    if delta <= 1.0:
        raise ValidationError("delta must exceed 1")
    if s is None:
        s = sp_membership(q, 0).s if q.n_q >= 32 else 0
    s = int(s)
    ok_pt, _ = check_pt_symmetry(q)
    table = antiderivative_coefficients(q, 2 * hi + 1) if hi > 0 else None
    ns = np.arange(lo, hi + 1)
    P = np.array([compute_Pn(table, int(k)) for k in ns])
    f = np.array([table.f_at(int(k)).real for k in ns])
    g = np.array([table.g_at(int(k)).real for k in ns])
    detail: dict[str, str] = {}

    scaled_P = -P * ns ** (2.0 * s + 2.0)
    ok = P < 0
    alpha = float(scaled_P.min()) if ok.all() else 0.0
    pn = _ternary(ok)
    if pn is Verdict.YES and not _no_decay(ns, scaled_P):
        pn = Verdict.INCONCLUSIVE
        detail["Pn"] = "scaled P_n decays over the range"

    scaled_g = np.abs(g) * ns ** (s + 1.0)
    ok = (scaled_g > 0) & (np.abs(g) > delta * np.abs(f))
    beta = float(scaled_g.min()) if ok.all() else 0.0
    gv = _ternary(ok)
    if gv is Verdict.YES and not _no_decay(ns, scaled_g):
        gv = Verdict.INCONCLUSIVE
        detail["g_decay"] = "scaled g_n decays over the range"
    if not ok_pt:
        detail["pt"] = "potential is not PT-symmetric"
        pn = gv = Verdict.INCONCLUSIVE

    jv, c, d = _jump_test(q, s, ns, g, asymptotic_rtol, detail)
    return FiniteGapVerdicts(pn, gv, jv, alpha, beta, float(delta), c, d,
                             {int(k): float(v) for k, v in zip(ns, P)}, detail)


def _jump_test(q, s, ns, g, rtol, detail):
    if not q.has_closed_form:
        detail["jump"] = "no closed form with jump data"
        return Verdict.INCONCLUSIVE, None, None
    if s > 2:
        detail["jump"] = "jumps of derivatives above order 2 are not available"
        return Verdict.INCONCLUSIVE, None, None
    jumps = [(p.start, q.jump(p.start, s)) for p in q.pieces]
    c_pts = [(x, j.imag) for x, j in jumps if abs(j.imag) > 1e-12]
    d_pts = [(x, j.real) for x, j in jumps if abs(j.real) > 1e-12]
    c = max((v for _, v in c_pts), key=abs, default=0.0)
    d = max((v for _, v in d_pts), key=abs, default=0.0)
    if not c_pts:
        detail["jump"] = "the imaginary part has no jump"
        return Verdict.NO, complex(c), complex(d)
    if abs(d) >= abs(c):
        detail["jump"] = f"|d| = {abs(d):.6g} is not below |c| = {abs(c):.6g}"
        return Verdict.NO, complex(c), complex(d)
    points = {x for x, _ in c_pts} | {x for x, _ in d_pts}
    if len(points) > 1:
        detail["jump"] = "several jump points; coefficient asymptotics not checked"
        return Verdict.INCONCLUSIVE, complex(c), complex(d)
    predicted = abs(c) * (2.0 * math.pi * ns) ** (-s - 1.0)
    ratio = np.abs(g) / predicted
    if np.all(np.abs(ratio[ratio.size // 2 :] - 1.0) <= rtol):
        return Verdict.YES, complex(c), complex(d)
    detail["jump"] = f"|g_n| (2 pi n)^(s+1) / |c| ends at {ratio[-1]:.6g}"
    return Verdict.INCONCLUSIVE, complex(c), complex(d)
