"""Periodic potentials: Fourier tables, closed forms and coefficient-level tests.

A potential on ``[0, 1)`` is stored canonically as a finite table of Fourier
coefficients ``q_n`` (``q(x) = sum q_n exp(2 pi i n x)``).  An optional closed
form, given piecewise, is used to generate coefficients beyond the table and to
drive the ODE integrator across jump discontinuities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Mapping, Sequence

import numpy as np

from ._common import TAU_PT, Verdict
from .errors import (
    DomainError,
    RangeError,
    RepresentationMissingError,
    ValidationError,
)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class Piece:
    """One analytic piece of a closed form, valid on ``[start, next start]``.

    ``func`` must accept a numpy array of abscissae and may be evaluated at
    both closed ends of its interval, which yields the one-sided limits.
    """

    start: float
    func: Callable[[np.ndarray], np.ndarray]


class PotentialSpec:
    """A 1-periodic complex potential.

    Parameters
    ----------
    coeffs : mapping of int to complex, optional
        Fourier coefficients ``q_n``.  Missing indices are zero up to ``n_q``.
    pieces : sequence of Piece, optional
        Piecewise closed form on ``[0, 1)``; the first piece must start at 0.
    n_q : int, optional
        Truncation index of the table.  Defaults to the largest stored index,
        or 128 when the table is generated from ``pieces``.
    label : str
        Human readable name, used in reports.
    table_is_exact : bool, optional
        Whether coefficients beyond ``n_q`` are exactly zero.  Defaults to
        True for pure tables and False when a closed form is present.
    pt_symmetric : bool, optional
        Declared PT symmetry.  When omitted it is detected from the table.
    allow_mean : bool
        Accept a nonzero mean ``q_0``.  By default the mean must vanish.

    Notes
    -----
    Instances are immutable after construction and hash by identity, so they
    can key caches of integration meshes.
    """

    def __init__(
        self,
        coeffs: Mapping[int, complex] | None = None,
        pieces: Sequence[Piece] | None = None,
        *,
        n_q: int | None = None,
        label: str = "custom",
        table_is_exact: bool | None = None,
        pt_symmetric: bool | None = None,
        tau_pt: float = TAU_PT,
        allow_mean: bool = False,
    ):
        if coeffs is None and not pieces:
            raise RepresentationMissingError(
                "a potential needs a coefficient table or a closed form"
            )
        self.label = str(label)
        self._pieces: tuple[Piece, ...] = tuple(pieces or ())
        if self._pieces:
            starts = [p.start for p in self._pieces]
            if starts[0] != 0.0 or any(b <= a for a, b in zip(starts, starts[1:])):
                raise ValidationError("pieces must start at 0 with increasing starts")
            if starts[-1] >= 1.0:
                raise ValidationError("piece starts must lie in [0, 1)")

        table: dict[int, complex] = {}
        self.quadrature_error: dict[int, float] = {}
        if coeffs is not None:
            for k, v in coeffs.items():
                if int(k) != k:
                    raise ValidationError(f"non-integer coefficient index {k!r}")
                v = complex(v)
                if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                    raise ValidationError(f"non-finite coefficient at index {k}")
                if v != 0:
                    table[int(k)] = v
            stored_max = max((abs(k) for k in table), default=0)
            self.n_q = int(n_q) if n_q is not None else stored_max
            if self.n_q < stored_max:
                table = {k: v for k, v in table.items() if abs(k) <= self.n_q}
        else:
            self.n_q = int(n_q) if n_q is not None else 128
            for k in range(-self.n_q, self.n_q + 1):
                val, err = _closed_form_coefficient(self._pieces, k)
                self.quadrature_error[k] = err
                if abs(val) > 1e-15:
                    table[k] = val
        if self.n_q < 0:
            raise ValidationError("n_q must be non-negative")

        self.mean = table.pop(0, 0j)
        if abs(self.mean) > 1e-12 and not allow_mean:
            raise DomainError(f"potential has nonzero mean q_0 = {self.mean}")
        if self.mean != 0:
            table[0] = self.mean
        self.coeffs: Mapping[int, complex] = MappingProxyType(dict(sorted(table.items())))
        self.table_is_exact = (
            bool(table_is_exact) if table_is_exact is not None else not self._pieces
        )
        self.tau_pt = float(tau_pt)
        ok, _ = _pt_deviation(self.coeffs, self.n_q, self.tau_pt)
        self.pt_symmetric = ok if pt_symmetric is None else bool(pt_symmetric)

        idx = np.arange(-self.n_q, self.n_q + 1)
        self._dense = np.array([self.coeffs.get(int(k), 0j) for k in idx], dtype=complex)

    # -- basic properties -------------------------------------------------
    @property
    def pieces(self) -> tuple[Piece, ...]:
        return self._pieces

    @property
    def has_closed_form(self) -> bool:
        return bool(self._pieces)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Interior jump locations of the closed form (0 is always implied)."""
        return tuple(p.start for p in self._pieces[1:])

    @property
    def is_zero(self) -> bool:
        return not self.coeffs and (not self._pieces or self.table_is_exact)

    def dense_coefficients(self, n_max: int | None = None) -> np.ndarray:
        """Coefficients ``q_{-n_max} .. q_{n_max}`` as an array (zero padded)."""
        if n_max is None or n_max == self.n_q:
            return self._dense.copy()
        out = np.zeros(2 * n_max + 1, dtype=complex)
        m = min(n_max, self.n_q)
        out[n_max - m : n_max + m + 1] = self._dense[self.n_q - m : self.n_q + m + 1]
        return out

    def coefficient(self, n: int) -> complex:
        return fourier_coefficient(self, n)

    # -- point evaluation -------------------------------------------------
    def evaluate(self, x) -> np.ndarray:
        """Evaluate ``q`` at points of ``[0, 1)`` (arguments are reduced mod 1)."""
        x = np.mod(np.asarray(x, dtype=float), 1.0)
        if self._pieces:
            out = np.empty(x.shape, dtype=complex)
            starts = np.array([p.start for p in self._pieces])
            which = np.searchsorted(starts, x, side="right") - 1
            for i, piece in enumerate(self._pieces):
                mask = which == i
                if np.any(mask):
                    out[mask] = piece.func(x[mask])
            return out
        return self.fourier_sum(x)

    def evaluate_piece(self, index: int, x) -> np.ndarray:
        """Evaluate piece ``index`` of the closed form without wrapping."""
        x = np.asarray(x, dtype=float)
        return np.asarray(self._pieces[index].func(x), dtype=complex) * np.ones_like(x)

    def fourier_sum(self, x) -> np.ndarray:
        """Truncated Fourier series at ``x``."""
        x = np.asarray(x, dtype=float)
        if not self.coeffs:
            return np.zeros(x.shape, dtype=complex)
        ks = np.array(list(self.coeffs.keys()), dtype=float)
        cs = np.array(list(self.coeffs.values()), dtype=complex)
        flat = x.reshape(-1)
        out = np.empty(flat.shape, dtype=complex)
        for lo in range(0, flat.size, 4096):
            chunk = flat[lo : lo + 4096]
            out[lo : lo + 4096] = np.exp(2j * np.pi * np.outer(chunk, ks)) @ cs
        return out.reshape(x.shape)

    def bounds(self, samples: int = 4096) -> tuple[float, float, float]:
        """Sampled ``(min Re q, max |Im q|, max |q|)`` used to size contours."""
        x = (np.arange(samples) + 0.5) / samples
        vals = self.evaluate(x)
        if self._pieces:
            ends = np.concatenate(
                [self.evaluate_piece(i, [p.start, _piece_end(self._pieces, i)])
                 for i, p in enumerate(self._pieces)]
            )
            vals = np.concatenate([vals, ends])
        if vals.size == 0 or not np.any(vals):
            return 0.0, 0.0, 0.0
        return float(vals.real.min()), float(np.abs(vals.imag).max()), float(np.abs(vals).max())

    def jump(self, x: float, order: int = 0) -> complex:
        """Jump ``q^{(order)}(x+) - q^{(order)}(x-)`` of the closed form at ``x``.

        Derivatives are taken by one-sided finite differences inside each piece.
        """
        if not self._pieces:
            raise RepresentationMissingError("jumps need a closed form")
        starts = [p.start for p in self._pieces]
        x = float(x) % 1.0
        if x not in starts:
            return 0j
        right = starts.index(x)
        left = right - 1 if right > 0 else len(starts) - 1
        x_left = x if right > 0 else 1.0
        return _one_sided(self, right, x, +1, order) - _one_sided(self, left, x_left, -1, order)

    def conjugate(self) -> "PotentialSpec":
        """The potential ``conj(q(x))``, whose coefficients are ``conj(q_{-n})``."""
        coeffs = {-k: complex(v).conjugate() for k, v in self.coeffs.items()}
        pieces = [Piece(p.start, _conjugated(p.func)) for p in self._pieces]
        return PotentialSpec(
            coeffs,
            pieces or None,
            n_q=self.n_q,
            label=f"conj({self.label})",
            table_is_exact=self.table_is_exact,
            tau_pt=self.tau_pt,
            allow_mean=True,
        )

    def __repr__(self) -> str:
        return f"PotentialSpec(label={self.label!r}, n_q={self.n_q}, terms={len(self.coeffs)})"


def _conjugated(func):
    def conj_func(x):
        return np.conj(func(x))

    return conj_func


def _piece_end(pieces: Sequence[Piece], i: int) -> float:
    return pieces[i + 1].start if i + 1 < len(pieces) else 1.0


def _one_sided(q: PotentialSpec, piece: int, x: float, side: int, order: int) -> complex:
    if order == 0:
        return complex(q.evaluate_piece(piece, np.array([x]))[0])
    # fifth-order one-sided stencils on an equally spaced grid inside the piece
    h = 1e-3
    pts = x + side * h * np.arange(7)
    vals = q.evaluate_piece(piece, pts)
    coef = {
        1: np.array([-49 / 20, 6, -15 / 2, 20 / 3, -15 / 4, 6 / 5, -1 / 6]),
        2: np.array([469 / 90, -223 / 10, 879 / 20, -949 / 18, 41, -201 / 10, 1019 / 180]),
    }
    if order not in coef:
        raise DomainError("jumps are available for derivative orders 0, 1 and 2")
    return complex(np.dot(coef[order], vals) / (side * h) ** order)


def _closed_form_integral(
    pieces: Sequence[Piece], weight, panels: int = 8
) -> tuple[complex, float]:
    """Composite Gauss-Legendre integral of ``q * weight`` over ``[0, 1]``."""
    prev, err = None, 0.0
    for _ in range(12):
        total = 0j
        for i, piece in enumerate(pieces):
            a, b = piece.start, _piece_end(pieces, i)
            m = max(1, int(math.ceil(panels * (b - a))))
            edges = np.linspace(a, b, m + 1)
            half = 0.5 * np.diff(edges)
            mid = 0.5 * (edges[1:] + edges[:-1])
            x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
            w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
            total += np.sum(w * np.asarray(piece.func(x), dtype=complex) * weight(x))
        if prev is not None and abs(total - prev) <= 1e-14 * max(1.0, abs(total)):
            return total, abs(total - prev)
        if prev is not None:
            err = abs(total - prev)
        prev = total
        panels *= 2
    return prev, err


def _closed_form_coefficient(pieces: Sequence[Piece], n: int) -> tuple[complex, float]:
    def weight(x, n=n):
        return np.exp(-2j * np.pi * n * x)

    # start with enough panels to resolve the oscillation
    return _closed_form_integral(tuple(pieces), weight, panels=max(8, 2 * abs(n)))


def fourier_coefficient(q: PotentialSpec, n: int, return_error: bool = False):
    """Fourier coefficient ``q_n = int_0^1 q(x) exp(-2 pi i n x) dx``.

    Parameters
    ----------
    q : PotentialSpec
    n : int
    return_error : bool
        Also return a quadrature error estimate (0 for stored coefficients).

    Returns
    -------
    complex or (complex, float)
    """
    n = int(n)
    if abs(n) <= q.n_q:
        val, err = q.coeffs.get(n, 0j), q.quadrature_error.get(n, 0.0)
    elif q.table_is_exact:
        val, err = 0j, 0.0
    elif q.has_closed_form:
        val, err = _closed_form_coefficient(q.pieces, n)
    else:
        raise RepresentationMissingError(
            f"index {n} lies beyond the table (n_q={q.n_q}) and no closed form exists"
        )
    return (val, err) if return_error else val


def _pt_deviation(coeffs: Mapping[int, complex], n_q: int, tau: float) -> tuple[bool, float]:
    dev = max((abs(v.imag) for v in coeffs.values()), default=0.0)
    return dev <= tau, dev


def check_pt_symmetry(q: PotentialSpec, tau_pt: float | None = None) -> tuple[bool, float]:
    """Test ``q(-x) = conj(q(x))``, i.e. all coefficients real.

    Returns
    -------
    (bool, float)
        Whether the maximal imaginary part over ``|n| <= n_q`` is at most
        ``tau_pt``, and that maximal deviation.
    """
    tau = q.tau_pt if tau_pt is None else float(tau_pt)
    return _pt_deviation(q.coeffs, q.n_q, tau)


def real_imag_split(q: PotentialSpec, n: int) -> tuple[float, float]:
    """Return ``(f_n, g_n)`` for ``q = f + i g`` with ``f`` even and ``g`` odd.

    ``f_n = (q_n + q_{-n}) / 2`` and ``g_n = (q_n - q_{-n}) / 2``; both are real
    for a PT-symmetric potential.
    """
    ok, dev = check_pt_symmetry(q)
    if not ok:
        raise DomainError(f"potential is not PT-symmetric (max |Im q_n| = {dev:.3g})")
    qp, qm = fourier_coefficient(q, n), fourier_coefficient(q, -n)
    return 0.5 * (qp + qm).real, 0.5 * (qp - qm).real


@dataclass(frozen=True)
class FourierTable:
    """Coefficients of ``q``, its antiderivative ``Q`` and ``S = Q**2``.

    Arrays are indexed from ``-n_max`` to ``n_max``; use the accessor methods.
    ``Q`` is the zero-mean-free antiderivative with ``Q(0) = Q(1) = 0``, so
    ``Q_k = q_k / (2 pi i k)`` for ``k != 0`` and ``Q_0 = int_0^1 (1-x) q dx``.
    """

    n_max: int
    q: np.ndarray
    Q: np.ndarray
    S: np.ndarray
    Q0: complex
    s_truncation_error: float = 0.0

    def q_at(self, k: int) -> complex:
        return self._get(self.q, k)

    def Q_at(self, k: int) -> complex:
        return self._get(self.Q, k)

    def S_at(self, k: int) -> complex:
        return self._get(self.S, k)

    def f_at(self, n: int) -> complex:
        return 0.5 * (self.q_at(n) + self.q_at(-n))

    def g_at(self, n: int) -> complex:
        return 0.5 * (self.q_at(n) - self.q_at(-n))

    def _get(self, arr: np.ndarray, k: int) -> complex:
        if abs(k) > self.n_max:
            raise RangeError(f"index {k} outside the table (n_max={self.n_max})")
        return complex(arr[k + self.n_max])


def antiderivative_coefficients(q: PotentialSpec, n_max: int) -> FourierTable:
    """Build the :class:`FourierTable` of ``q`` up to ``n_max``.

    ``S`` is obtained by discrete convolution of the ``Q`` coefficients over
    every index the table supports; the neglected tail is estimated from the
    last stored coefficient.
    """
    if abs(q.mean) > 1e-12:
        raise DomainError("the periodic antiderivative requires q_0 = 0")
    n_max = int(n_max)
    if n_max < 1:
        raise ValidationError("n_max must be at least 1")
    span = max(n_max, q.n_q)
    ks = np.arange(-span, span + 1)
    qs = np.array([fourier_coefficient(q, int(k)) for k in ks], dtype=complex)
    Qs = np.zeros_like(qs)
    nz = ks != 0
    Qs[nz] = qs[nz] / (2j * np.pi * ks[nz])
    if q.has_closed_form:
        Q0, _ = _closed_form_integral(q.pieces, lambda x: 1.0 - x)
    else:
        Q0 = -np.sum(Qs[nz])
    Qs[span] = Q0
    full = np.convolve(Qs, Qs)  # indices -2 span .. 2 span
    mid = 2 * span
    S = full[mid - n_max : mid + n_max + 1]
    sl = slice(span - n_max, span + n_max + 1)
    last = max(abs(Qs[0]), abs(Qs[-1]))
    tail = last * span * float(np.sum(np.abs(Qs)))
    return FourierTable(n_max, qs[sl].copy(), Qs[sl].copy(), S, complex(Q0), float(tail))


@dataclass(frozen=True)
class SpVerdict:
    """Outcome of the class membership test ``q in S_p``.

    Attributes
    ----------
    p : int
        Requested smoothness order.
    s : int
        Fitted decay order: ``|q_n|`` behaves like ``n**-(s+1)``.
    c1, c2, c3 : float
        Fitted constants of ``|q_n| >= c1 n**-(s+1)`` and
        ``c2 <= |q_{-n}| / |q_n| <= c3`` on the window.
    N : int
        First index of the fitting window.
    holds : Verdict
    residual : float
        RMS residual of the log-log fit.
    """

    p: int
    s: int
    c1: float
    c2: float
    c3: float
    N: int
    holds: Verdict
    residual: float = 0.0
    reason: str = ""


def sp_membership(q: PotentialSpec, p: int, fit_tol: float = 0.1) -> SpVerdict:
    """Decide whether ``q`` belongs to the class ``S_p`` from its coefficient decay.

    A power law ``|q_n| ~ C n**-(s+1)`` is fitted over ``n in [n_q/4, n_q]``.
    The verdict is inconclusive when the fit residual exceeds ``fit_tol`` or
    coefficients drop below the round-off floor.
    """
    if q.n_q < 32:
        raise ValidationError(f"sp_membership needs n_q >= 32 (got {q.n_q})")
    p = int(p)
    lo, hi = q.n_q // 4, q.n_q
    n = np.arange(lo, hi + 1)
    plus = np.array([abs(fourier_coefficient(q, int(k))) for k in n])
    minus = np.array([abs(fourier_coefficient(q, -int(k))) for k in n])
    ok, _ = check_pt_symmetry(q)
    if not ok:
        return SpVerdict(p, 0, 0.0, 0.0, 0.0, lo, Verdict.NO, reason="not PT-symmetric")
    if np.any(plus == 0) or np.any(minus == 0):
        return SpVerdict(p, 0, 0.0, 0.0, 0.0, lo, Verdict.NO, reason="vanishing coefficients")
    floor = 1e-13 * max(1.0, float(np.abs(q.dense_coefficients()).max()))
    if np.any(plus < floor) or np.any(minus < floor):
        return SpVerdict(
            p, 0, 0.0, 0.0, 0.0, lo, Verdict.INCONCLUSIVE, reason="coefficients below noise floor"
        )
    A = np.vstack([np.ones_like(n, dtype=float), np.log(n)]).T
    coef, *_ = np.linalg.lstsq(A, np.log(plus), rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - np.log(plus)) ** 2)))
    s = max(0, int(round(-coef[1] - 1.0)))
    c1 = float(np.min(plus * n ** (s + 1.0)))
    ratio = minus / plus
    c2, c3 = float(ratio.min()), float(ratio.max())
    if resid > fit_tol:
        return SpVerdict(p, s, c1, c2, c3, lo, Verdict.INCONCLUSIVE, resid, "power-law fit failed")
    holds = Verdict.from_bool(s <= p and c1 > 0 and c2 > 0 and np.isfinite(c3))
    return SpVerdict(p, s, c1, c2, c3, lo, holds, resid)
