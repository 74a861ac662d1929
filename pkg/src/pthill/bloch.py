"""Bloch eigenvalues ``lambda_n(t)``: roots of ``F(lambda) = 2 cos t``.

The module offers three layers:

* :func:`eigenvalues_in_region` isolates roots inside a rectangle with the
  argument principle and recursive subdivision (works for any potential);
* :func:`number_eigenvalues` tracks the numbered curves ``t -> lambda_n(t)``
  over a grid of quasimomenta;
* :func:`matrix_oracle` is an independent Fourier-Galerkin cross-check.

For PT-symmetric potentials ``F`` is real on the real axis.  The real critical
points of ``F`` are located once; afterwards every root at any ``t`` is either a
bracketed crossing on a monotone piece, a double root at an extremum touching
``2 cos t``, or a complex pair near an extremum that fails to reach it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._common import DEFAULT_TOLERANCES, Tolerances, free_level, scaled
from .errors import (
    ContourAccuracyError,
    NumberingError,
    OracleUnavailableError,
    PreconditionError,
    ValidationError,
)
from .monodromy import DEFAULT_CONFIG, IntegratorConfig, evaluate
from .potential import PotentialSpec, fourier_coefficient

H_MAX = 1.0 / (15.0 * math.pi)


@dataclass(frozen=True)
class BlochEigenvalue:
    """One eigenvalue of the quasi-periodic problem at quasimomentum ``t``.

    ``multiplicity`` counts how many indices share this numerical root (roots
    closer than the cluster tolerance are merged).  ``simple`` additionally
    requires ``|F'(lambda)| >= tau_mult``, so a resolved but nearly double root
    is not certified simple.
    """

    n: int | None
    t: float
    lam: complex
    multiplicity: int
    simple: bool
    residual: float
    converged: bool = True


@dataclass(frozen=True)
class LocalizationConfig:
    """Surrogates for the non-constructive localisation constants.

    Parameters
    ----------
    h : float
        Width of the end zones ``[0, h]`` and ``[pi - h, pi]``; must lie in
        ``(0, 1/(15 pi))``.
    n_cut : int
        Indices with ``|n| > n_cut`` are checked against their disks.
    disk_margin : float
        Safety factor on the disk radius ``30 pi |n| h``.
    rect_height : float or None
        Half-height of complex search rectangles; derived from ``sup |Im q|``
        when omitted.
    """

    h: float = 0.02
    n_cut: int = 8
    disk_margin: float = 2.0
    rect_height: float | None = None

    def __post_init__(self):
        if not 0.0 < self.h < H_MAX:
            raise PreconditionError(f"h must lie in (0, 1/(15 pi)) ~ (0, {H_MAX:.5f}); got {self.h}")
        if int(self.n_cut) < 0:
            raise ValidationError("n_cut must be non-negative")
        if self.disk_margin <= 0:
            raise ValidationError("disk_margin must be positive")

    def disk_radius(self, n: int, t: float) -> float:
        return self.disk_margin * max(30.0 * math.pi * abs(n) * self.h, 1.0)


DEFAULT_LOCALIZATION = LocalizationConfig()


def default_t_grid(h: float = DEFAULT_LOCALIZATION.h, interior: int = 65, floor: float = 1e-4) -> np.ndarray:
    """Uniform interior grid on ``[h, pi - h]`` plus geometric end refinement.

    Points ``h/2, h/4, ...`` down to ``floor`` are added next to both ends,
    together with the end points ``0`` and ``pi``.
    """
    pts = list(np.linspace(h, math.pi - h, interior))
    d = h / 2.0
    while d >= floor:
        pts += [d, math.pi - d]
        d /= 2.0
    pts += [0.0, math.pi]
    return np.unique(np.array(pts))


# ---------------------------------------------------------------------------
# root-finding engine
# ---------------------------------------------------------------------------


class _Engine:
    """Discriminant evaluations and root polishing for one potential.

    Searches run on a mesh ``SEARCH_COARSENING`` times coarser than the
    configured one; every reported root then receives a final Newton
    correction with the configured integrator.
    """

    SEARCH_COARSENING = 8
    MIN_SEARCH_STEPS = 256

    def __init__(self, q: PotentialSpec, cfg: IntegratorConfig, tol: Tolerances = DEFAULT_TOLERANCES):
        self.q = q
        self.cfg = cfg
        self.tol = tol
        steps = max(self.MIN_SEARCH_STEPS, cfg.step_count // self.SEARCH_COARSENING)
        self.search_cfg = replace(cfg, step_count=min(steps, cfg.step_count))
        self.evals = 0
        self.fine_evals = 0
        self._crit_cache: dict = {}
        self._warm: dict = {}

    def F(self, lams, nderiv: int = 1):
        """``F`` and derivatives on the search mesh."""
        lams = np.atleast_1d(np.asarray(lams, dtype=complex))
        if lams.size == 0:
            return tuple(np.zeros(0, dtype=complex) for _ in range(nderiv + 1))
        self.evals += lams.size
        return evaluate(self.q, lams, self.search_cfg, nderiv)

    def F_fine(self, lams, nderiv: int = 1):
        """``F`` and derivatives with the configured integrator."""
        lams = np.atleast_1d(np.asarray(lams, dtype=complex))
        if lams.size == 0:
            return tuple(np.zeros(0, dtype=complex) for _ in range(nderiv + 1))
        self.fine_evals += lams.size
        return evaluate(self.q, lams, self.cfg, nderiv)

    def polish(self, lams, w, dF=None, real: bool = False):
        """One Newton correction with the configured integrator.

        ``dF`` may supply ``F'`` from the search mesh, which is accurate far
        beyond what a single correction needs.  Returns ``(roots, |F - w|, F')``;
        the residual is measured before the correction and so bounds the one
        after it.
        """
        lams = np.atleast_1d(np.asarray(lams, dtype=complex))
        if dF is None:
            Fv, F1 = self.F_fine(lams, 1)
        else:
            (Fv,) = self.F_fine(lams, 0)
            F1 = np.asarray(dF, dtype=complex)
        f = Fv - w
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(F1 != 0, f / F1, 0.0)
        limit = 1e-6 * np.maximum(1.0, np.abs(lams))
        step = np.where(np.isfinite(step) & (np.abs(step) < limit), step, 0.0)
        out = lams - step
        if real:
            out = out.real.astype(complex)
        return out, np.abs(f), F1

    # -- Newton variants ----------------------------------------------------
    def newton(self, guesses, w, max_iter: int = 40, deflate=None):
        """Complex Newton on ``F - w`` for a batch of starting points.

        ``deflate`` optionally maps each guess to a root to divide out.
        Returns ``(roots, residuals, dF, converged)``.
        """
        lam = np.array(guesses, dtype=complex)
        active = np.ones(lam.size, dtype=bool)
        res = np.full(lam.size, np.inf)
        dF = np.zeros(lam.size, dtype=complex)
        conv = np.zeros(lam.size, dtype=bool)
        for _ in range(max_iter):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            Fv, F1 = self.F(lam[idx], 1)
            g = Fv - w
            gp = F1
            if deflate is not None:
                r = deflate[idx]
                mask = ~np.isnan(r)
                d = lam[idx] - r
                gp = np.where(mask, F1 / d - g / d**2, F1)
                g = np.where(mask, g / d, g)
            res[idx] = np.abs(Fv - w)
            dF[idx] = F1
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(gp != 0, g / gp, 0.0)
            lam[idx] = lam[idx] - step
            small = np.abs(step) <= 1e-12 * np.maximum(1.0, np.abs(lam[idx]))
            bad = ~np.isfinite(lam[idx])
            conv[idx[small]] = True
            active[idx[small | bad]] = False
        conv = conv & (res < self.tol.root * np.maximum(1.0, np.abs(lam)))
        return lam, res, dF, conv

    def bracketed(self, lo, hi, guess, w, flo, max_iter: int = 80):
        """Safeguarded real Newton for roots bracketed by ``[lo, hi]``.

        ``flo`` holds ``F(lo) - w``.  Returns ``(roots, |F - w|, F')`` where the
        residual and derivative are those of the last evaluated iterate.
        """
        lo = np.array(lo, dtype=float)
        hi = np.array(hi, dtype=float)
        flo = np.array(flo, dtype=float)
        x = np.clip(np.array(guess, dtype=float), lo, hi)
        active = np.ones(x.size, dtype=bool)
        res = np.zeros(x.size)
        der = np.zeros(x.size)
        for _ in range(max_iter):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            Fv, F1 = self.F(x[idx], 1)
            f = Fv.real - w
            d = F1.real
            res[idx] = np.abs(f)
            der[idx] = d
            same = np.sign(f) == np.sign(flo[idx])
            lo[idx] = np.where(same, x[idx], lo[idx])
            flo[idx] = np.where(same, f, flo[idx])
            hi[idx] = np.where(same, hi[idx], x[idx])
            with np.errstate(divide="ignore", invalid="ignore"):
                newton = x[idx] - f / d
            tol = 1e-12 * np.maximum(1.0, np.abs(x[idx]))
            converged = np.isfinite(newton) & (np.abs(newton - x[idx]) <= tol)
            outside = ~np.isfinite(newton) | (newton < lo[idx]) | (newton > hi[idx])
            xn = np.where(outside & ~converged, 0.5 * (lo[idx] + hi[idx]), newton)
            done = converged | (f == 0) | (hi[idx] - lo[idx] <= 1e-15 * np.maximum(1.0, np.abs(x[idx])))
            x[idx] = np.where(f == 0, x[idx], xn)
            active[idx[done]] = False
        return x, res, der

    def critical_point(self, guesses, max_iter: int = 40):
        """Newton on ``F'`` (a simple zero near a double root of ``F - w``)."""
        lam = np.array(guesses, dtype=complex)
        for _ in range(max_iter):
            _, F1, F2 = self.F(lam, 2)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(F2 != 0, F1 / F2, 0.0)
            lam = lam - step
            if np.all(np.abs(step) <= 1e-13 * np.maximum(1.0, np.abs(lam))):
                break
        return self._fine_critical(lam)

    def _fine_critical(self, lam):
        Fv, F1, F2 = self.F_fine(lam, 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(F2 != 0, F1 / F2, 0.0)
        step = np.where(np.abs(step) < 1e-6 * np.maximum(1.0, np.abs(lam)), step, 0.0)
        # F is stationary, so the value barely moves with the correction
        return lam - step, Fv, F1, F2

    # -- real-axis structure (PT-symmetric potentials) -----------------------
    def critical_points(self, a: float, b: float):
        """Real zeros of ``F'`` in ``[a, b]`` with ``F`` and ``F''`` there."""
        key = (float(a), float(b))
        if key in self._crit_cache:
            return self._crit_cache[key]
        neg = np.linspace(a, 0.0, 9)[:-1] if a < 0 else np.zeros(0)
        kmax = math.sqrt(max(b, 0.0))
        ks = np.linspace(0.0, kmax, max(2, int(math.ceil(kmax / (math.pi / 8))) + 1))
        grid = np.concatenate([neg, ks**2])
        grid = grid[(grid >= a) & (grid <= b)]
        _, d1 = self.F(grid, 1)
        d1 = d1.real
        lo, hi = [], []
        for i in range(grid.size - 1):
            if d1[i] == 0.0:
                lo.append(grid[i])
                hi.append(grid[i])
            elif d1[i] * d1[i + 1] < 0:
                lo.append(grid[i])
                hi.append(grid[i + 1])
        if not lo:
            out = (np.zeros(0), np.zeros(0), np.zeros(0))
            self._crit_cache[key] = out
            return out
        lo = np.array(lo)
        hi = np.array(hi)
        x = 0.5 * (lo + hi)
        # safeguarded Newton on F' with F''
        flo = self.F(lo, 1)[1].real
        for _ in range(60):
            _, F1, F2 = self.F(x, 2)
            f = F1.real
            same = np.sign(f) == np.sign(flo)
            lo = np.where(same, x, lo)
            flo = np.where(same, f, flo)
            hi = np.where(same, hi, x)
            with np.errstate(divide="ignore", invalid="ignore"):
                xn = x - f / F2.real
            outside = ~np.isfinite(xn) | (xn < lo) | (xn > hi)
            xn = np.where(outside, 0.5 * (lo + hi), xn)
            step = np.abs(xn - x)
            x = xn
            if np.all((step <= 1e-13 * np.maximum(1.0, np.abs(x))) | (f == 0)):
                break
        x, Fv, _, F2 = self._fine_critical(np.unique(x).astype(complex))
        out = (x.real, Fv.real, F2.real)
        self._crit_cache[key] = out
        return out

    def _end_values(self, a: float, b: float):
        key = ("ends", float(a), float(b))
        if key not in self._crit_cache:
            self._crit_cache[key] = tuple(v.real for v in self.F_fine([a, b], 0)[0])
        return self._crit_cache[key]

    def roots_real_axis(self, w: float, a: float, b: float):
        """All roots of ``F = w`` attached to the real-axis structure on ``[a, b]``.

        Returns a list of ``(lambda, multiplicity, residual, dF)`` tuples; a
        double root appears once with multiplicity 2.  Roots found for earlier
        levels seed the iterations through a tangent predictor.
        """
        crit, Fc, F2c = self.critical_points(a, b)
        Fa, Fb = self._end_values(a, b)
        nodes = np.concatenate([[a], crit, [b]])
        vals = np.concatenate([[Fa], Fc, [Fb]]) - w
        state = np.zeros(nodes.size, dtype=int)  # 1 touch, 2 fail (complex pair)
        for j in range(1, nodes.size - 1):
            c, F2 = nodes[j], F2c[j - 1]
            tol = abs(F2) * scaled(self.tol.cluster, c) ** 2 / 8.0
            if abs(vals[j]) <= tol:
                state[j] = 1
                vals[j] = 0.0
            elif vals[j] * F2 > 0:
                # a minimum above w or a maximum below it
                state[j] = 2
        warm = self._warm.setdefault((float(a), float(b)), {})
        out = []
        pieces = [j for j in range(nodes.size - 1) if vals[j] * vals[j + 1] < 0]
        if pieces:
            lo = nodes[pieces]
            hi = nodes[[j + 1 for j in pieces]]
            guess = []
            for j in pieces:
                prev = warm.get(("piece", j))
                g = None
                if prev is not None and prev[2] != 0:
                    g = prev[1] + (w - prev[0]) / prev[2]
                if g is None or not nodes[j] < g < nodes[j + 1]:
                    g = self._piece_guess(nodes, vals, F2c, j)
                guess.append(g)
            roots, _, der = self.bracketed(lo, hi, guess, w, vals[pieces])
            for j, r, d in zip(pieces, roots, der):
                warm[("piece", j)] = (w, r, d)
            roots, res, der = self.polish(roots, w, der, real=True)
            for r, rr, d in zip(roots, res, der):
                out.append((complex(r), 1, float(rr), complex(d)))
        for j in np.flatnonzero(state == 1):
            out.append((complex(nodes[j]), 2, float(abs(vals[j])), 0j))
        pj = np.flatnonzero(state == 2)
        if pj.size:
            c = nodes[pj]
            delta = np.sqrt(2.0 * vals[pj] / F2c[pj - 1])
            g1 = c + 1j * delta
            g2 = c - 1j * delta
            for k, j in enumerate(pj):
                prev = warm.get(("pair", j))
                if prev is not None and prev[3] != 0 and prev[4] != 0:
                    p1 = prev[1] + (w - prev[0]) / prev[3]
                    p2 = prev[2] + (w - prev[0]) / prev[4]
                    # keep the model when the previous pair was (nearly) real
                    if abs(p1 - g1[k]) < 0.5 * delta[k] and abs(p2 - g2[k]) < 0.5 * delta[k]:
                        g1[k], g2[k] = p1, p2
            roots, res, F1, conv = self.newton(np.concatenate([g1, g2]), w)
            m = pj.size
            for i, j in enumerate(pj):
                r1, r2 = roots[i], roots[i + m]
                if not (conv[i] and conv[i + m]) or abs(r1 - r2) < 0.5 * abs(delta[i]):
                    rr, rres, rF1, _ = self.newton([np.conj(r1)], w, deflate=np.array([r1]))
                    r2, res[i + m], F1[i + m] = rr[0], rres[0], rF1[0]
                warm[("pair", j)] = (w, r1, r2, F1[i], F1[i + m])
                roots[i + m] = r2
            roots, res, F1 = self.polish(roots, w, F1)
            for i in range(2 * m):
                out.append((complex(roots[i]), 1, float(res[i]), complex(F1[i])))
        out.sort(key=lambda r: (r[0].real, r[0].imag))
        return out

    @staticmethod
    def _piece_guess(nodes, vals, F2c, j):
        a, b = nodes[j], nodes[j + 1]
        best = 0.5 * (a + b)
        best_frac = 1.0
        for end, sgn in ((j, 1.0), (j + 1, -1.0)):
            if 1 <= end <= nodes.size - 2:
                F2 = F2c[end - 1]
                ratio = -2.0 * vals[end] / F2 if F2 != 0 else -1.0
                if ratio >= 0:
                    g = nodes[end] + sgn * math.sqrt(ratio)
                    frac = abs(g - nodes[end]) / (b - a)
                    if a < g < b and frac < best_frac:
                        best, best_frac = g, frac
        if best_frac == 1.0 and vals[j] != vals[j + 1]:
            best = a - vals[j] * (b - a) / (vals[j + 1] - vals[j])
        return best

    # -- argument principle -------------------------------------------------
    def winding(self, rect, w: float, scale: float, nodes: int = 16):
        """Winding number of ``F - w`` around ``rect`` and the first two moments.

        ``scale`` bounds panel lengths near the real axis; panels grow
        geometrically with the distance to the axis.
        """
        x0, x1, y0, y1 = rect
        corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
        gl_x, gl_w = np.polynomial.legendre.leggauss(nodes)
        zs, ws = [], []
        for k in range(4):
            za, zb = corners[k], corners[(k + 1) % 4]
            for pa, pb in _panels(za, zb, scale):
                mid, half = 0.5 * (pa + pb), 0.5 * (pb - pa)
                zs.append(mid + half * gl_x)
                ws.append(half * gl_w)
        z = np.concatenate(zs)
        wt = np.concatenate(ws)
        Fv, F1 = self.F(z, 1)
        g = F1 / (Fv - w)
        center = 0.5 * complex(x0 + x1, y0 + y1)
        u = z - center
        m0 = np.sum(wt * g) / (2j * math.pi)
        m1 = np.sum(wt * g * u) / (2j * math.pi)
        m2 = np.sum(wt * g * u * u) / (2j * math.pi)
        fmin = float(np.min(np.abs(Fv - w)))
        return complex(m0), complex(m1), complex(m2), center, fmin

    def count(self, rect, w: float, scale: float):
        """Stabilised root count inside ``rect`` (with moments)."""
        prev = None
        for nodes in (12, 20, 32, 48):
            m0, m1, m2, center, fmin = self.winding(rect, w, scale, nodes)
            n = round(m0.real)
            ok = abs(m0 - n) < 0.05
            if prev is not None and ok and prev == n:
                return int(n), m1, m2, center, fmin
            prev = n if ok else None
            scale *= 0.7
        raise ContourAccuracyError(
            f"winding number on {rect} did not stabilise (last value {m0:.6g})"
        )


def _panels(za: complex, zb: complex, scale: float):
    """Split the segment ``za -> zb`` into panels graded towards the real axis."""
    length = abs(zb - za)
    direction = (zb - za) / length
    out = []
    s = 0.0
    while s < length - 1e-12 * length:
        z = za + s * direction
        step = max(scale, 0.5 * abs(z.imag))
        if abs(direction.imag) > 0.5:
            # do not jump across the axis on vertical sides
            y_next = z.imag + direction.imag * step
            if z.imag * y_next < 0:
                step = abs(z.imag)
        step = min(step, length - s)
        out.append((z, za + (s + step) * direction))
        s += step
    return out


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def _sup_bounds(q: PotentialSpec):
    min_re, max_im, max_abs = q.bounds()
    left = -min(min_re, 0.0) + 1.0
    height = max_im + 1.0
    return left, height


def multiplicity_of(
    q: PotentialSpec,
    lam: complex,
    t: float,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    tau_mult: float = DEFAULT_TOLERANCES.mult,
) -> int:
    """Multiplicity of the root ``lam`` of ``F = 2 cos t`` from derivative tests.

    Returns 1 if ``|F'| >= tau_mult``, 2 if ``|F''| >= tau_mult`` and otherwise
    counts zeros of ``F - 2 cos t`` on a small circle with the argument principle.
    """
    _, d1, d2 = evaluate(q, [lam], cfg, 2)
    if abs(d1[0]) >= tau_mult:
        return 1
    if abs(d2[0]) >= tau_mult:
        return 2
    w = 2.0 * math.cos(t)
    r = 1e-3 * max(1.0, abs(lam)) ** 0.5
    theta = 2 * math.pi * (np.arange(256) + 0.5) / 256
    z = lam + r * np.exp(1j * theta)
    Fv, F1 = evaluate(q, z, cfg, 1)
    integral = np.sum(F1 / (Fv - w) * 1j * r * np.exp(1j * theta)) * (2 * math.pi / 256)
    return max(3, int(round((integral / (2j * math.pi)).real)))


def _cluster(roots: Sequence[tuple[complex, float, complex]], t: float, tau_cluster: float):
    """Merge roots closer than the cluster tolerance into multiple roots."""
    used = [False] * len(roots)
    out = []
    for i, (lam, res, d1) in enumerate(roots):
        if used[i]:
            continue
        group = [i]
        for j in range(i + 1, len(roots)):
            if not used[j] and abs(roots[j][0] - lam) < scaled(tau_cluster, lam):
                group.append(j)
        for j in group:
            used[j] = True
        lam_c = np.mean([roots[j][0] for j in group])
        out.append((complex(lam_c), len(group), max(roots[j][1] for j in group), d1))
    return out


def eigenvalues_in_region(
    q: PotentialSpec,
    t: float,
    rect: tuple[float, float, float, float],
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    max_depth: int = 24,
    tol: Tolerances = DEFAULT_TOLERANCES,
    _engine: _Engine | None = None,
) -> list[BlochEigenvalue]:
    """Eigenvalues at quasimomentum ``t`` inside ``rect = (re0, re1, im0, im1)``.

    The root count comes from the argument principle; rectangles holding more
    than one distinct root are bisected along their longer side.  Roots are
    polished by Newton's method; clusters closer than ``tau_cluster`` are
    reported once with their multiplicity.
    """
    re0, re1, im0, im1 = (float(v) for v in rect)
    if not (re1 > re0 and im1 > im0):
        raise ValidationError("rectangle must have positive width and height")
    eng = _engine or _Engine(q, cfg, tol)
    tol = eng.tol
    w = 2.0 * math.cos(t)
    found: list[tuple[complex, float, complex, bool]] = []

    def boundary_safe(r):
        # nudge the rectangle if a root sits on its boundary
        for attempt in range(6):
            scale = max(min(r[1] - r[0], r[3] - r[2]) / 4.0, 1e-6)
            try:
                n, m1, m2, center, fmin = eng.count(r, w, scale)
            except ContourAccuracyError:
                fmin = 0.0
                n = None
            if n is not None and fmin >= 10 * tol.root:
                return r, n, m1, m2, center
            pad = 1e-3 * (1 + attempt) * max(r[1] - r[0], r[3] - r[2])
            r = (r[0] - pad, r[1] + pad * 0.7, r[2] - pad * 0.6, r[3] + pad * 0.8)
        raise ContourAccuracyError(f"could not find a root-free boundary near {rect}")

    def split(r, axis):
        # a cut through a root would make both halves nudge over it; take the
        # first candidate line whose estimated root distance is comfortable
        lo, hi = (r[0], r[1]) if axis == 0 else (r[2], r[3])
        a, b = (r[2], r[3]) if axis == 0 else (r[0], r[1])
        s = np.linspace(a, b, 17)
        best, best_d = 0.5 * (lo + hi), -1.0
        for frac in (0.5, 0.46, 0.54, 0.42, 0.58, 0.37, 0.63):
            c = lo + frac * (hi - lo)
            pts = c + 1j * s if axis == 0 else s + 1j * c
            Fv, F1 = eng.F(pts, 1)
            d = float(np.min(np.abs(Fv - w) / np.maximum(np.abs(F1), 1e-300)))
            if d > 0.02 * (hi - lo):
                return c
            if d > best_d:
                best, best_d = c, d
        return best

    def solve(r, depth):
        r, n, m1, m2, center = boundary_safe(r)
        if n == 0:
            return
        width, height = r[1] - r[0], r[3] - r[2]
        if n <= 2:
            # roots from the power sums s1 = sum u_i, s2 = sum u_i^2
            if n == 1:
                guesses = [center + m1]
            else:
                s1, s2 = m1, m2
                prod = 0.5 * (s1 * s1 - s2)
                disc = cmath.sqrt(s1 * s1 - 4 * prod)
                guesses = [center + 0.5 * (s1 + disc), center + 0.5 * (s1 - disc)]
            if n == 2 and abs(guesses[0] - guesses[1]) <= 1e-3 * max(width, height):
                # coinciding moments: test for a double root at the critical point
                lc, Fv, F1, F2 = eng.critical_point([0.5 * (guesses[0] + guesses[1])])
                z = complex(lc[0])
                if (r[0] <= z.real <= r[1] and r[2] <= z.imag <= r[3]
                        and abs(Fv[0] - w) < 10 * scaled(tol.root, z)):
                    for _ in range(2):
                        found.append((z, float(abs(Fv[0] - w)), complex(F1[0]), True))
                    return
            if n == 1 or abs(guesses[0] - guesses[1]) > 1e-3 * max(width, height) or depth >= max_depth:
                roots, res, d1, conv = eng.newton(guesses, w)
                inside = [
                    (r[0] <= z.real <= r[1]) and (r[2] <= z.imag <= r[3]) for z in roots
                ]
                distinct = n == 1 or abs(roots[0] - roots[1]) > scaled(tol.cluster, roots[0])
                if all(inside) and all(conv) and (distinct or depth >= max_depth):
                    for z, rr, dd, cc in zip(roots, res, d1, conv):
                        found.append((complex(z), float(rr), complex(dd), bool(cc)))
                    return
                if n == 2 and not distinct:
                    lc, Fv, F1, F2 = eng.critical_point([0.5 * (roots[0] + roots[1])])
                    if abs(Fv[0] - w) < 10 * scaled(tol.root, lc[0]):
                        for _ in range(2):
                            found.append((complex(lc[0]), float(abs(Fv[0] - w)), complex(F1[0]), True))
                        return
        if depth >= max_depth:
            for z in (center,) * n:
                roots, res, d1, conv = eng.newton([z], w)
                found.append((complex(roots[0]), float(res[0]), complex(d1[0]), False))
            return
        if width >= height:
            mid = split(r, 0)
            solve((r[0], mid, r[2], r[3]), depth + 1)
            solve((mid, r[1], r[2], r[3]), depth + 1)
        else:
            mid = split(r, 1)
            solve((r[0], r[1], r[2], mid), depth + 1)
            solve((r[0], r[1], mid, r[3]), depth + 1)

    solve((re0, re1, im0, im1), 0)
    if found:
        zs = np.array([z for z, *_ in found])
        pz, pres, pd = eng.polish(zs, w)
        found = [
            (complex(pz[i]), float(pres[i]), complex(pd[i]), c) if abs(pd[i]) >= tol.mult else f
            for i, (f, c) in enumerate(zip(found, [f[3] for f in found]))
        ]
    out = []
    for lam, mult, res, d1 in _cluster([(z, rr, dd) for z, rr, dd, _ in found], t, tol.cluster):
        conv = all(c for z, _, _, c in found if abs(z - lam) < scaled(tol.cluster, lam) * 2)
        simple = mult == 1 and abs(d1) >= tol.mult
        out.append(BlochEigenvalue(None, float(t), lam, mult, simple, res, conv))
    out.sort(key=lambda e: (e.lam.real, e.lam.imag))
    return out


def matrix_oracle(q: PotentialSpec, t: float, M: int = 64) -> np.ndarray:
    """Eigenvalues of the Fourier-Galerkin truncation of size ``2M + 1``.

    The matrix has diagonal ``(2 pi k + t)**2`` for ``k = -M..M`` and entries
    ``q_{k-l}`` off the diagonal.  Eigenvalues are sorted by real part, then
    imaginary part.
    """
    M = int(M)
    if M < 8:
        raise ValidationError("matrix_oracle needs M >= 8")
    ks = np.arange(-M, M + 1)
    coeff = np.array([fourier_coefficient(q, int(d)) for d in range(-2 * M, 2 * M + 1)])
    diff = ks[:, None] - ks[None, :]
    A = coeff[diff + 2 * M].astype(complex)
    A[np.diag_indices_from(A)] = (2 * math.pi * ks + t) ** 2 + q.mean
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise OracleUnavailableError(str(exc)) from exc
    if not np.all(np.isfinite(ev)):
        raise OracleUnavailableError("eigensolver returned non-finite values")
    order = np.lexsort((ev.imag, ev.real))
    return ev[order]


# ---------------------------------------------------------------------------
# numbering
# ---------------------------------------------------------------------------


def _index_of_order(j: int) -> int:
    """Map the j-th root by real part at ``t = pi/2`` to its index 0, -1, 1, -2, ..."""
    return j // 2 if j % 2 == 0 else -(j + 1) // 2


@dataclass
class BlochCurve:
    """Sampled curve ``t -> lambda_n(t)``."""

    n: int
    t: np.ndarray
    lam: np.ndarray
    multiplicity: np.ndarray
    residual: np.ndarray
    simple: np.ndarray
    tracker: "BandTracker" = field(repr=False, compare=False, default=None)

    def samples(self) -> list[BlochEigenvalue]:
        return [
            BlochEigenvalue(self.n, float(t), complex(l), int(m), bool(s), float(r))
            for t, l, m, s, r in zip(self.t, self.lam, self.multiplicity, self.simple, self.residual)
        ]

    def value_at(self, t: float) -> complex:
        """Eigenvalue at an arbitrary ``t`` (recomputed, not interpolated)."""
        return self.tracker.eigenvalue(self.n, t)


class BandTracker:
    """Computes and numbers all eigenvalues of a potential over quasimomenta.

    Parameters
    ----------
    q : PotentialSpec
    n_max : int
        Indices ``-n_max .. n_max`` are reported; one more index on each side
        is tracked internally so that every reported index keeps its partner.
    cfg : IntegratorConfig
    loc : LocalizationConfig
    tol : Tolerances
    """

    def __init__(
        self,
        q: PotentialSpec,
        n_max: int,
        cfg: IntegratorConfig = DEFAULT_CONFIG,
        loc: LocalizationConfig = DEFAULT_LOCALIZATION,
        tol: Tolerances = DEFAULT_TOLERANCES,
    ):
        self.q = q
        self.cfg = cfg
        self.loc = loc
        self.tol = tol
        self.n_max = int(n_max)
        self.engine = _Engine(q, cfg, tol)
        self.pt = q.pt_symmetric
        left, height = _sup_bounds(q)
        self.height = loc.rect_height if loc.rect_height is not None else height
        self.a = -left - 10.0
        self.tracked = list(range(-(self.n_max + 1), self.n_max + 2))
        self.b = ((2 * self.n_max + 5) * math.pi) ** 2
        if self.b > cfg.energy_cap:
            from .errors import MagnitudeError

            raise MagnitudeError("requested indices exceed the integrator energy cap")
        self._known: dict[float, dict[int, tuple[complex, int, float, bool]]] = {}

    # -- full solves ------------------------------------------------------
    def _all_roots(self, t: float):
        """Every root with real part in ``[a, b]`` at ``t`` as (lam, mult, res, dF)."""
        w = 2.0 * math.cos(t)
        if self.pt:
            return self.engine.roots_real_axis(w, self.a, self.b)
        ev = eigenvalues_in_region(
            self.q, t, (self.a, self.b, -self.height, self.height), self.cfg, tol=self.tol, _engine=self.engine
        )
        return [(e.lam, e.multiplicity, e.residual, 1.0 if e.simple else 0.0) for e in ev]

    def _expand(self, roots):
        lams, mults, res, d1 = [], [], [], []
        for lam, m, r, f1 in roots:
            for _ in range(m):
                lams.append(lam)
                mults.append(m)
                res.append(r)
                d1.append(f1)
        return np.array(lams, dtype=complex), np.array(mults), np.array(res), np.array(d1, dtype=complex)

    def completeness(self, t: float = math.pi / 2) -> tuple[int, int]:
        """Compare the argument-principle count on a large rectangle with the roots found.

        Returns ``(winding count, number of roots counted with multiplicity)``.
        """
        w = 2.0 * math.cos(t)
        span = self.b - self.a
        rect = (self.a, self.b, -max(self.height, span / 8), max(self.height, span / 8))
        n, *_ = self.engine.count(rect, w, scale=4.0)
        roots = self._all_roots(t)
        inside = sum(m for lam, m, _, _ in roots if abs(lam.imag) <= rect[3])
        return n, inside

    def reference(self) -> dict[int, complex]:
        t = math.pi / 2
        if t in self._known:
            return {n: v[0] for n, v in self._known[t].items()}
        roots = self._all_roots(t)
        lams, mults, res, d1 = self._expand(roots)
        if lams.size < len(self.tracked):
            raise NumberingError(
                f"found {lams.size} roots at t=pi/2 but {len(self.tracked)} indices are tracked"
            )
        order = sorted(range(lams.size), key=lambda i: (lams[i].real, lams[i].imag))
        entry = {}
        for j, i in enumerate(order[: len(self.tracked)]):
            m = _index_of_order(j)
            entry[m] = (complex(lams[i]), int(mults[i]), float(res[i]), bool(mults[i] == 1 and abs(d1[i]) >= self.tol.mult))
        missing = set(self.tracked) - set(entry)
        if missing:
            raise NumberingError(f"indices {sorted(missing)} left unassigned at t=pi/2")
        self._known[t] = entry
        return {n: v[0] for n, v in entry.items()}

    def _assign(self, t_new: float, preds: dict[int, complex], prev: dict[int, complex]):
        roots = self._all_roots(t_new)
        lams, mults, res, d1 = self._expand(roots)
        idx = list(preds)
        P = np.array([preds[n] for n in idx])
        if lams.size < len(idx):
            raise NumberingError(f"only {lams.size} roots found at t={t_new:.6g} for {len(idx)} indices")
        cost = np.abs(P[:, None] - lams[None, :])
        rows, cols = linear_sum_assignment(cost)
        entry = {}
        for r_, c_ in zip(rows, cols):
            n = idx[r_]
            entry[n] = [complex(lams[c_]), int(mults[c_]), float(res[c_]), bool(mults[c_] == 1 and abs(d1[c_]) >= self.tol.mult)]
        # tie-break between members of a conjugate pair born from a real pair:
        # the member that was larger on the real side takes the upper root
        for n in idx:
            for m in idx:
                if m <= n:
                    continue
                ln, lm = entry[n][0], entry[m][0]
                if abs(ln - np.conj(lm)) < scaled(self.tol.cluster, ln) * 10 and abs(ln.imag) > 0:
                    pn, pm = prev[n], prev[m]
                    if abs(pn.imag) < scaled(self.tol.real, pn) and abs(pm.imag) < scaled(self.tol.real, pm):
                        upper_to_n = pn.real > pm.real or (pn.real == pm.real and n > m)
                        if (ln.imag > 0) != upper_to_n:
                            entry[n], entry[m] = entry[m], entry[n]
        return entry, cost[rows, cols], cost

    def _step(self, t_from: float, t_to: float, depth: int = 0):
        """Advance all tracked roots from ``t_from`` to ``t_to``."""
        prev = {n: v[0] for n, v in self._known[t_from].items()}
        preds = self._predict(t_from, t_to, prev)
        entry, moved, cost = self._assign(t_to, preds, prev)
        # each assignment must be clearly better than any alternative
        ok = True
        lam_list = np.array([entry[n][0] for n in preds])
        for k, n in enumerate(preds):
            d = np.abs(lam_list - preds[n])
            d_self = d[k]
            others = np.delete(d, k)
            sibling = np.abs(others - d_self) <= scaled(self.tol.cluster, preds[n]) * 10
            # equidistant members of a conjugate pair are resolved by the tie rule
            conj = np.abs(np.delete(lam_list, k) - np.conj(lam_list[k])) <= scaled(1e-6, lam_list[k])
            rivals = others[~(sibling | conj)]
            if rivals.size and d_self > 0.5 * rivals.min():
                ok = False
                break
        if not ok and depth < 12:
            mid = 0.5 * (t_from + t_to)
            self._step(t_from, mid, depth + 1)
            self._step(mid, t_to, depth + 1)
            return
        if not ok:
            raise NumberingError(f"ambiguous continuation between t={t_from:.6g} and t={t_to:.6g}")
        self._known[t_to] = {n: tuple(v) for n, v in entry.items()}

    def _predict(self, t_from, t_to, prev):
        # linear extrapolation from the two closest known samples on the near side
        ts = sorted(self._known)
        side = [s for s in ts if (s < t_from if t_to > t_from else s > t_from)]
        if side:
            s = side[-1] if t_to > t_from else side[0]
            older = {n: v[0] for n, v in self._known[s].items()}
            return {
                n: prev[n] + (prev[n] - older[n]) * (t_to - t_from) / (t_from - s) for n in prev
            }
        return dict(prev)

    def run(self, t_grid: Iterable[float]) -> None:
        t_grid = np.unique(np.asarray(list(t_grid), dtype=float))
        self.reference()
        t0 = math.pi / 2
        for direction in (+1, -1):
            cur = t0
            seq = t_grid[t_grid > t0] if direction > 0 else t_grid[t_grid < t0][::-1]
            for t in seq:
                if t not in self._known:
                    self._step(cur, float(t))
                cur = float(t)
        self._check_disks(t_grid)

    def _check_disks(self, t_grid):
        for t in t_grid:
            for n, v in self._known[float(t)].items():
                if self.loc.n_cut < abs(n) <= self.n_max:
                    if abs(v[0] - free_level(n, t)) > self.loc.disk_radius(n, t):
                        raise NumberingError(
                            f"lambda_{n}({t:.6g}) = {v[0]:.10g} lies outside its localisation disk"
                        )

    def curves(self, t_grid, n_range=None) -> dict[int, BlochCurve]:
        t_grid = np.unique(np.asarray(list(t_grid), dtype=float))
        self.run(t_grid)
        lo, hi = n_range if n_range is not None else (-self.n_max, self.n_max)
        out = {}
        for n in range(lo, hi + 1):
            vals = [self._known[float(t)][n] for t in t_grid]
            out[n] = BlochCurve(
                n=n,
                t=t_grid.copy(),
                lam=np.array([v[0] for v in vals]),
                multiplicity=np.array([v[1] for v in vals]),
                residual=np.array([v[2] for v in vals]),
                simple=np.array([v[3] for v in vals]),
                tracker=self,
            )
        return out

    def eigenvalue(self, n: int, t: float) -> complex:
        """``lambda_n(t)`` at an arbitrary ``t``, continued from the nearest sample."""
        t = float(t)
        if t not in self._known:
            ts = np.array(sorted(self._known))
            # continue from the nearest known sample on the side of pi/2
            if t < math.pi / 2:
                base = ts[ts >= t].min()
            else:
                base = ts[ts <= t].max()
            self._step(float(base), t)
        return self._known[t][n][0]

    def sample(self, n: int, t: float) -> BlochEigenvalue:
        self.eigenvalue(n, t)
        lam, mult, res, simple = self._known[float(t)][n]
        return BlochEigenvalue(n, float(t), lam, mult, simple, res)


def number_eigenvalues(
    q: PotentialSpec,
    t_grid: Iterable[float] | None = None,
    n_range: tuple[int, int] = (-8, 8),
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    loc: LocalizationConfig = DEFAULT_LOCALIZATION,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> dict[int, BlochCurve]:
    """Numbered eigenvalue curves ``n -> lambda_n(t)`` on ``t_grid``.

    Indices are fixed at ``t = pi/2`` by ordering the roots by real part
    (``0, -1, 1, -2, 2, ...``) and then continued in ``t`` by matching every
    new root set to the extrapolated previous one.  Indices with
    ``|n| > n_cut`` are checked against their localisation disks.
    """
    if t_grid is None:
        t_grid = default_t_grid(loc.h)
    t_grid = np.asarray(list(t_grid), dtype=float)
    if t_grid.size == 0 or np.any((t_grid < 0) | (t_grid > math.pi)):
        raise ValidationError("t_grid must be a non-empty subset of [0, pi]")
    lo, hi = int(n_range[0]), int(n_range[1])
    if lo > hi:
        raise ValidationError("n_range must satisfy lo <= hi")
    tracker = BandTracker(q, max(abs(lo), abs(hi)), cfg, loc, tol)
    return tracker.curves(t_grid, (lo, hi))
