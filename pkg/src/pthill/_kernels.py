"""Compiled Runge-Kutta kernels for the fundamental matrix and its lambda-derivatives.

Two formulations are provided:

* interaction frame: the free propagator ``E(x)`` is factored out, so the
  integrated matrix ``C`` obeys ``C' = q(x) u(x) v(x)^T C`` with
  ``u = (-s, c)``, ``v = (c, s)``, ``c = cos(kx)``, ``s = sin(kx)/k``;
* plain frame: ``Y' = [[0, 1], [q - lam, 0]] Y``.

Each kernel integrates the state together with its first and second
lambda-derivatives (``nderiv`` = 0, 1 or 2).  Stage abscissae are mapped onto
five precomputed nodes per step (``0, 1/4, 1/2, 3/4, 1``), which covers both
supported tableaux.
"""

from __future__ import annotations

import cmath

import numpy as np
from numba import njit

# Butcher's six-stage fifth-order method (nodes 0, 1/4, 1/4, 1/2, 3/4, 1,
# weights 7, 0, 32, 12, 32, 7 over 90) and the classical fourth-order method
# are hard-coded in the kernels below.
NODE_FRACTIONS = np.array([0.0, 0.25, 0.5, 0.75, 1.0])

_FM = {"nnan", "ninf", "nsz", "contract", "afn"}
_SERIES_LIMIT = 4.0
_SERIES_TERMS = 30


@njit(cache=True, fastmath=_FM, error_model="numpy")
def free_functions(lam, x):
    """Return ``c, s, c_l, s_l, c_ll, s_ll`` at ``x`` (subscript l = d/d lambda).

    Entire in ``lam``; a power series is used when ``|lam| x^2`` is small to
    avoid the cancellation in the closed forms.
    """
    z = lam * x * x
    if abs(z) <= _SERIES_LIMIT:
        mz = -z
        c = 0j
        s = 0j
        cl = 0j
        sl = 0j
        cll = 0j
        sll = 0j
        # term_j = (-z)^j / (2j)!  and  (-z)^j / (2j+1)!
        pw = 1.0 + 0j  # (-z)^j
        pw1 = 0j  # (-z)^(j-1)
        pw2 = 0j  # (-z)^(j-2)
        fe = 1.0  # (2j)!
        fo = 1.0  # (2j+1)!
        x2 = x * x
        x4 = x2 * x2
        for j in range(_SERIES_TERMS):
            c += pw / fe
            s += pw / fo
            if j >= 1:
                cl += j * pw1 * (-x2) / fe
                sl += j * pw1 * (-x2) / fo
            if j >= 2:
                cll += j * (j - 1) * pw2 * x4 / fe
                sll += j * (j - 1) * pw2 * x4 / fo
            pw2 = pw1
            pw1 = pw
            pw = pw * mz
            fe = fe * (2 * j + 1) * (2 * j + 2)
            fo = fo * (2 * j + 2) * (2 * j + 3)
        return c, s * x, cl, sl * x, cll, sll * x
    k = cmath.sqrt(lam)
    c = cmath.cos(k * x)
    s = cmath.sin(k * x) / k
    cl = -0.5 * x * s
    sl = (x * c - s) / (2.0 * lam)
    cll = -0.5 * x * sl
    sll = (-0.5 * x * x * s - 3.0 * sl) / (2.0 * lam)
    return c, s, cl, sl, cll, sll


@njit(cache=True, inline="always", fastmath=_FM, error_model="numpy")
def _rhs(qv, lam, F, m, T, K, row, nderiv, plain):
    if plain:
        p = qv - lam
        for j in range(2):
            K[row, j] = T[2 + j]
            K[row, 2 + j] = p * T[j]
            if nderiv >= 1:
                K[row, 4 + j] = T[6 + j]
                K[row, 6 + j] = p * T[4 + j] - T[j]
            if nderiv >= 2:
                K[row, 8 + j] = T[10 + j]
                K[row, 10 + j] = p * T[8 + j] - 2.0 * T[4 + j]
        return
    # u = (-s, c), v = (c, s); state layout d * 4 + r * 2 + j
    c = F[m, 0]
    s = F[m, 1]
    for j in range(2):
        w0 = c * T[j] + s * T[2 + j]
        K[row, j] = -qv * s * w0
        K[row, 2 + j] = qv * c * w0
        if nderiv >= 1:
            cl = F[m, 2]
            sl = F[m, 3]
            a = cl * T[j] + sl * T[2 + j] + c * T[4 + j] + s * T[6 + j]
            K[row, 4 + j] = qv * (-sl * w0 - s * a)
            K[row, 6 + j] = qv * (cl * w0 + c * a)
            if nderiv >= 2:
                cll = F[m, 4]
                sll = F[m, 5]
                b = (
                    cll * T[j] + sll * T[2 + j]
                    + 2.0 * (cl * T[4 + j] + sl * T[6 + j])
                    + c * T[8 + j] + s * T[10 + j]
                )
                K[row, 8 + j] = qv * (-sll * w0 - 2.0 * sl * a - s * b)
                K[row, 10 + j] = qv * (cll * w0 + 2.0 * cl * a + c * b)


def _make_kernel(order: int, nderiv: int, plain: bool):
    """Compile an integrator specialised to one tableau, derivative count and frame.

    The three settings are captured as plain constants, which numba folds
    into the code (removing the branches of ``_rhs``) and uses as part of
    the on-disk cache key.
    """
    width = 4 * (nderiv + 1)
    nst = 6 if order == 5 else 4

    @njit(cache=True, fastmath=_FM, error_model="numpy")
    def integrate(lam, xs, hs, qs, dense):
        nsteps = hs.shape[0]
        Y = np.zeros(12, dtype=np.complex128)
        Y[0] = 1.0
        Y[3] = 1.0
        Kst = np.zeros((nst, 12), dtype=np.complex128)
        T = np.zeros(12, dtype=np.complex128)
        F = np.zeros((5, 6), dtype=np.complex128)
        k = cmath.sqrt(lam)
        if dense:
            path = np.zeros((nsteps + 1, 2, 2), dtype=np.complex128)
            path[0, 0, 0] = 1.0
            path[0, 1, 1] = 1.0
        else:
            path = np.zeros((0, 2, 2), dtype=np.complex128)
        z = 0j
        rho = 0j
        hprev = -1.0
        for i in range(nsteps):
            h = hs[i]
            if not plain:
                # phases are carried across steps and refreshed periodically
                if h != hprev:
                    rho = cmath.exp(1j * k * (0.25 * h))
                    hprev = h
                    z = 0j
                if i % _RESYNC == 0:
                    z = 0j
                z = _node_functions(lam, k, xs[i, 0], h, F, nderiv, z, rho)
            if nst == 6:
                for e in range(width):
                    T[e] = Y[e]
                _rhs(qs[i, 0], lam, F, 0, T, Kst, 0, nderiv, plain)
                for e in range(width):
                    T[e] = Y[e] + h * 0.25 * Kst[0, e]
                _rhs(qs[i, 1], lam, F, 1, T, Kst, 1, nderiv, plain)
                for e in range(width):
                    T[e] = Y[e] + h * 0.125 * (Kst[0, e] + Kst[1, e])
                _rhs(qs[i, 1], lam, F, 1, T, Kst, 2, nderiv, plain)
                for e in range(width):
                    T[e] = Y[e] + h * (Kst[2, e] - 0.5 * Kst[1, e])
                _rhs(qs[i, 2], lam, F, 2, T, Kst, 3, nderiv, plain)
                for e in range(width):
                    T[e] = Y[e] + h * (0.1875 * Kst[0, e] + 0.5625 * Kst[3, e])
                _rhs(qs[i, 3], lam, F, 3, T, Kst, 4, nderiv, plain)
                for e in range(width):
                    T[e] = Y[e] + h * (
                        -3.0 * Kst[0, e] + 2.0 * Kst[1, e] + 12.0 * Kst[2, e]
                        - 12.0 * Kst[3, e] + 8.0 * Kst[4, e]
                    ) * (1.0 / 7.0)
                _rhs(qs[i, 4], lam, F, 4, T, Kst, 5, nderiv, plain)
                for e in range(width):
                    Y[e] += h * (
                        7.0 * (Kst[0, e] + Kst[5, e]) + 32.0 * (Kst[2, e] + Kst[4, e])
                        + 12.0 * Kst[3, e]
                    ) * (1.0 / 90.0)
            else:
                for e in range(width):
                    T[e] = Y[e]
                _rhs(qs[i, 0], lam, F, 0, T, Kst, 0, nderiv, plain)
                for e in range(width):
                    T[e] = Y[e] + h * 0.5 * Kst[0, e]
                _rhs(qs[i, 2], lam, F, 2, T, Kst, 1, nderiv, plain)
                for e in range(width):
                    T[e] = Y[e] + h * 0.5 * Kst[1, e]
                _rhs(qs[i, 2], lam, F, 2, T, Kst, 2, nderiv, plain)
                for e in range(width):
                    T[e] = Y[e] + h * Kst[2, e]
                _rhs(qs[i, 4], lam, F, 4, T, Kst, 3, nderiv, plain)
                for e in range(width):
                    Y[e] += h * (
                        Kst[0, e] + 2.0 * (Kst[1, e] + Kst[2, e]) + Kst[3, e]
                    ) * (1.0 / 6.0)
            if dense:
                path[i + 1, 0, 0] = Y[0]
                path[i + 1, 0, 1] = Y[1]
                path[i + 1, 1, 0] = Y[2]
                path[i + 1, 1, 1] = Y[3]
        out = np.zeros((3, 2, 2), dtype=np.complex128)
        for d in range(nderiv + 1):
            for r in range(2):
                for j in range(2):
                    out[d, r, j] = Y[4 * d + 2 * r + j]
        return out, path

    return integrate


_RESYNC = 16


@njit(cache=True, fastmath=_FM, error_model="numpy")
def _node_functions(lam, k, x0, h, F, nderiv, z, rho):
    """Fill ``F[m] = free_functions(lam, x0 + m h / 4)`` for m = 0..4.

    ``z = exp(i k x0)`` and ``rho = exp(i k h / 4)`` are supplied by the caller
    (pass ``z = 0`` to have them recomputed); returns ``exp(i k (x0 + h))``.
    """
    if abs(lam) * x0 * x0 <= _SERIES_LIMIT or abs(lam) * (x0 + h) ** 2 <= _SERIES_LIMIT:
        for m in range(5):
            c, s, cl, sl, cll, sll = free_functions(lam, x0 + 0.25 * m * h)
            F[m, 0] = c
            F[m, 1] = s
            F[m, 2] = cl
            F[m, 3] = sl
            F[m, 4] = cll
            F[m, 5] = sll
        return 0j
    ik = 1j * k
    if z == 0:
        z = cmath.exp(ik * x0)
    zi = 1.0 / z
    rhoi = 1.0 / rho
    inv2l = 1.0 / (2.0 * lam)
    inv2ik = 1.0 / (2.0 * ik)
    for m in range(5):
        x = x0 + 0.25 * m * h
        c = 0.5 * (z + zi)
        s = (z - zi) * inv2ik
        F[m, 0] = c
        F[m, 1] = s
        if nderiv >= 1:
            sl = (x * c - s) * inv2l
            F[m, 2] = -0.5 * x * s
            F[m, 3] = sl
            if nderiv >= 2:
                F[m, 4] = -0.5 * x * sl
                F[m, 5] = (-0.5 * x * x * s - 3.0 * sl) * inv2l
        if m < 4:
            z = z * rho
            zi = zi * rhoi
    return z


_KERNELS: dict = {}


def _kernel(order: int, nderiv: int, plain: bool):
    key = (int(order), int(nderiv), bool(plain))
    if key not in _KERNELS:
        _KERNELS[key] = _make_kernel(*key)
    return _KERNELS[key]


def integrate(lam, xs, hs, qs, order, nderiv, plain, dense):
    """Integrate from ``x = 0`` to ``x = 1`` over the prepared mesh.

    Parameters
    ----------
    lam : complex
    xs : (N, 5) float array of node abscissae per step
    hs : (N,) float array of step sizes
    qs : (N, 5) complex array of potential values at the nodes
    order : 4 or 5
    nderiv : int, number of lambda-derivatives carried
    plain : bool, integrate in the plain frame instead of the interaction frame
    dense : bool, also return the state at every step boundary

    Returns
    -------
    Y : (3, 2, 2) complex array; ``Y[d]`` is the d-th lambda-derivative of the
        integrated matrix at ``x = 1`` (``C`` or the fundamental matrix).
    path : (N + 1, 2, 2) complex array of ``Y[0]`` at step boundaries (empty
        unless ``dense``).
    """
    return _kernel(order, nderiv, plain)(complex(lam), xs, hs, qs, bool(dense))


def integrate_many(lams, xs, hs, qs, order, nderiv, plain):
    """End states for many ``lambda``; ``plain`` is a per-lambda boolean array."""
    out = np.zeros((len(lams), 3, 2, 2), dtype=np.complex128)
    for j, lam in enumerate(lams):
        out[j], _ = integrate(lam, xs, hs, qs, order, nderiv, plain[j], False)
    return out
