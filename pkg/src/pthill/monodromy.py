"""Fundamental solutions at ``x = 1`` and the Hill discriminant ``F(lambda)``.

``theta`` and ``phi`` solve ``-y'' + q y = lambda y`` with
``theta(0) = phi'(0) = 1`` and ``theta'(0) = phi(0) = 0``; the discriminant is
``F = theta(1) + phi'(1)``.  Integration uses a fixed-step explicit Runge-Kutta
scheme whose steps never straddle a jump of the potential, so ``F`` is a smooth
and deterministic function of ``lambda`` for a fixed configuration.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import IntegrationError, MagnitudeError, ValidationError
from .potential import PotentialSpec

DEFAULT_ENERGY_CAP = (2.0 * math.pi * 64.0) ** 2


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings of the fixed-step integrator.

    Parameters
    ----------
    step_count : int
        Number of steps per period, distributed over the smooth segments.
    order : int
        4 (classical Runge-Kutta) or 5 (six-stage Butcher scheme).
    breakpoints : tuple of float
        Extra step boundaries in ``(0, 1)``; jumps of the closed form are
        always added.
    tau_w : float
        Bound on the Wronskian drift ``|det M - 1|`` (relative to ``|M|**2``).
    tau_F : float
        Tolerance for ``Im F`` on the real axis of PT-symmetric potentials.
    energy_cap : float
        Largest admissible ``|lambda|``.
    frame : {"auto", "interaction", "plain"}
        ``interaction`` factors the free propagator out of the equation;
        ``plain`` integrates ``(y, y')`` directly.  ``auto`` chooses the
        interaction frame unless ``|Im sqrt(lambda)|`` exceeds ``plain_above``,
        where the free factor itself grows exponentially.
    """

    step_count: int = 4096
    order: int = 5
    breakpoints: tuple[float, ...] = ()
    tau_w: float = 1e-8
    tau_F: float = 1e-9
    energy_cap: float = DEFAULT_ENERGY_CAP
    frame: str = "auto"
    plain_above: float = 6.0

    def __post_init__(self):
        if int(self.step_count) < 1:
            raise ValidationError("step_count must be positive")
        if self.order not in (4, 5):
            raise ValidationError("order must be 4 or 5")
        if self.frame not in ("auto", "interaction", "plain"):
            raise ValidationError(f"unknown frame {self.frame!r}")
        bps = tuple(sorted(float(b) for b in self.breakpoints))
        if any(not 0.0 < b < 1.0 for b in bps):
            raise ValidationError("breakpoints must lie strictly inside (0, 1)")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "step_count", int(self.step_count))


DEFAULT_CONFIG = IntegratorConfig()


@dataclass(frozen=True)
class DiscriminantSample:
    """Fundamental solutions and discriminant at one spectral parameter."""

    lam: complex
    F: complex
    dF: complex
    d2F: complex
    theta1: complex
    dtheta1: complex
    phi1: complex
    dphi1: complex
    wronskian_residual: float
    monodromy: np.ndarray = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class _Mesh:
    xs: np.ndarray
    hs: np.ndarray
    qs: np.ndarray
    edges: np.ndarray


@functools.lru_cache(maxsize=64)
def _mesh(q: PotentialSpec, cfg: IntegratorConfig) -> _Mesh:
    cuts = sorted(set((0.0, 1.0) + tuple(q.breakpoints) + cfg.breakpoints))
    xs, hs, qs, edges = [], [], [], [0.0]
    starts = np.array([p.start for p in q.pieces]) if q.has_closed_form else None
    for a, b in zip(cuts[:-1], cuts[1:]):
        m = max(1, int(round(cfg.step_count * (b - a))))
        grid = np.linspace(a, b, m + 1)
        h = np.diff(grid)
        nodes = grid[:-1, None] + h[:, None] * K.NODE_FRACTIONS[None, :]
        nodes[:, -1] = grid[1:]
        if starts is not None:
            piece = int(np.searchsorted(starts, a, side="right") - 1)
            vals = q.evaluate_piece(piece, nodes)
        else:
            vals = q.fourier_sum(nodes)
        xs.append(nodes)
        hs.append(h)
        qs.append(vals)
        edges.extend(grid[1:])
    mesh = _Mesh(
        np.ascontiguousarray(np.vstack(xs)),
        np.ascontiguousarray(np.concatenate(hs)),
        np.ascontiguousarray(np.vstack(qs).astype(np.complex128)),
        np.asarray(edges),
    )
    return mesh


def free_propagator(lam: complex, x: float = 1.0) -> np.ndarray:
    """``E`` and its first two lambda-derivatives at ``x``, shape ``(3, 2, 2)``.

    ``E(x) = [[c, s], [-lam s, c]]`` maps ``(y, y')`` at 0 to ``x`` for ``q = 0``.
    """
    c, s, cl, sl, cll, sll = K.free_functions(complex(lam), float(x))
    E = np.empty((3, 2, 2), dtype=complex)
    E[0] = [[c, s], [-lam * s, c]]
    E[1] = [[cl, sl], [-s - lam * sl, cl]]
    E[2] = [[cll, sll], [-2.0 * sl - lam * sll, cll]]
    return E


def _use_plain(lam: complex, cfg: IntegratorConfig) -> bool:
    if cfg.frame == "plain":
        return True
    if cfg.frame == "interaction":
        return False
    return abs(cmath.sqrt(lam).imag) > cfg.plain_above


def _check_cap(lams: np.ndarray, cfg: IntegratorConfig) -> None:
    big = np.abs(lams) > cfg.energy_cap
    if np.any(big):
        raise MagnitudeError(
            f"|lambda| = {np.abs(lams[big]).max():.6g} exceeds the energy cap {cfg.energy_cap:.6g}"
        )


def monodromy_matrices(
    q: PotentialSpec, lams, cfg: IntegratorConfig = DEFAULT_CONFIG, nderiv: int = 1
) -> np.ndarray:
    """Monodromy matrices and lambda-derivatives for many ``lambda`` at once.

    Returns
    -------
    ndarray, shape ``(len(lams), 3, 2, 2)``
        ``out[j, d]`` is the d-th derivative of ``[[theta, phi], [theta', phi']]``
        at ``x = 1``; entries beyond ``nderiv`` are zero.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=np.complex128))
    _check_cap(lams, cfg)
    out = np.zeros((lams.size, 3, 2, 2), dtype=np.complex128)
    if q.is_zero and cfg.frame != "plain":
        for j, lam in enumerate(lams):
            out[j, : nderiv + 1] = free_propagator(lam)[: nderiv + 1]
        return out
    mesh = _mesh(q, cfg)
    plain = [_use_plain(lam, cfg) for lam in lams]
    Y = K.integrate_many(lams, mesh.xs, mesh.hs, mesh.qs, cfg.order, nderiv, plain)
    for j, lam in enumerate(lams):
        if plain[j]:
            out[j] = Y[j]
            continue
        E = free_propagator(lam)
        C = Y[j]
        out[j, 0] = E[0] @ C[0]
        if nderiv >= 1:
            out[j, 1] = E[1] @ C[0] + E[0] @ C[1]
        if nderiv >= 2:
            out[j, 2] = E[2] @ C[0] + 2.0 * E[1] @ C[1] + E[0] @ C[2]
    return out


def wronskian_residual(M: np.ndarray) -> float:
    """Drift of ``det M`` from 1, relative to the size of ``M``."""
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    scale = max(1.0, float(np.abs(M).max()) ** 2)
    return float(abs(det - 1.0) / scale)


def evaluate(q: PotentialSpec, lams, cfg: IntegratorConfig = DEFAULT_CONFIG, nderiv: int = 1):
    """Vectorised ``F`` and its derivatives.

    Returns
    -------
    tuple of ndarray
        ``(F,)``, ``(F, dF)`` or ``(F, dF, d2F)`` depending on ``nderiv``.
    """
    M = monodromy_matrices(q, lams, cfg, nderiv)
    tr = M[:, :, 0, 0] + M[:, :, 1, 1]
    return tuple(tr[:, d] for d in range(nderiv + 1))


def solve_basis(
    q: PotentialSpec, lam: complex, cfg: IntegratorConfig = DEFAULT_CONFIG
) -> DiscriminantSample:
    """Integrate both fundamental solutions at ``lam`` and assemble ``F, F', F''``.

    Raises
    ------
    MagnitudeError
        If ``|lam|`` exceeds ``cfg.energy_cap``.
    IntegrationError
        If the Wronskian drifts by more than ``cfg.tau_w``.
    """
    lam = complex(lam)
    M = monodromy_matrices(q, [lam], cfg, nderiv=2)[0]
    res = wronskian_residual(M[0])
    if res > cfg.tau_w:
        raise IntegrationError(
            f"Wronskian drift {res:.3g} at lambda={lam}; increase step_count"
        )
    tr = M[:, 0, 0] + M[:, 1, 1]
    return DiscriminantSample(
        lam=lam,
        F=complex(tr[0]),
        dF=complex(tr[1]),
        d2F=complex(tr[2]),
        theta1=complex(M[0, 0, 0]),
        dtheta1=complex(M[0, 1, 0]),
        phi1=complex(M[0, 0, 1]),
        dphi1=complex(M[0, 1, 1]),
        wronskian_residual=res,
        monodromy=M[0].copy(),
    )


def discriminant(q: PotentialSpec, lam: complex, cfg: IntegratorConfig = DEFAULT_CONFIG) -> complex:
    """Hill discriminant ``F(lam) = theta(1) + phi'(1)``."""
    return complex(evaluate(q, [lam], cfg, nderiv=0)[0][0])


def discriminant_derivatives(
    q: PotentialSpec, lam: complex, cfg: IntegratorConfig = DEFAULT_CONFIG
) -> tuple[complex, complex]:
    """``(F'(lam), F''(lam))`` from the jointly integrated variational systems."""
    _, d1, d2 = evaluate(q, [lam], cfg, nderiv=2)
    return complex(d1[0]), complex(d2[0])


def solution_path(
    q: PotentialSpec, lam: complex, cfg: IntegratorConfig = DEFAULT_CONFIG
) -> tuple[np.ndarray, np.ndarray]:
    """Fundamental matrix at every step boundary.

    Returns
    -------
    x : ndarray, shape (N + 1,)
    Y : ndarray, shape (N + 1, 2, 2)
        ``Y[i] = [[theta, phi], [theta', phi']]`` at ``x[i]``.
    """
    lam = complex(lam)
    _check_cap(np.array([lam]), cfg)
    mesh = _mesh(q, cfg)
    plain = _use_plain(lam, cfg)
    if q.is_zero and not plain:
        path = np.repeat(np.eye(2, dtype=complex)[None], mesh.edges.size, axis=0)
    else:
        _, path = K.integrate(lam, mesh.xs, mesh.hs, mesh.qs, cfg.order, 0, plain, True)
    if plain:
        return mesh.edges.copy(), path
    E = np.array([free_propagator(lam, x)[0] for x in mesh.edges])
    return mesh.edges.copy(), np.einsum("nij,njk->nik", E, path)
