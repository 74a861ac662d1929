"""Named potentials with known spectral behaviour."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError
from .potential import Piece, PotentialSpec


def zero() -> PotentialSpec:
    """The free operator, ``q = 0``."""
    return PotentialSpec({}, label="zero")


def cos(amplitude: float = 1.0) -> PotentialSpec:
    """``q(x) = 2 c cos(2 pi x)`` with ``q_1 = q_{-1} = c``."""
    c = float(amplitude)
    return PotentialSpec({1: c, -1: c}, label="cos")


def mathieu(a: float = 1.0, b: float = 1.0) -> PotentialSpec:
    """``q(x) = a exp(-2 pi i x) + b exp(2 pi i x)``.

    Only real ``a, b`` are accepted, which keeps the potential PT-symmetric.
    """
    for name, v in (("a", a), ("b", b)):
        if isinstance(v, complex) and v.imag != 0:
            raise ValidationError(f"mathieu parameter {name} must be real")
        if not math.isfinite(float(np.real(v))):
            raise ValidationError(f"mathieu parameter {name} must be finite")
    return PotentialSpec({-1: float(np.real(a)), 1: float(np.real(b))}, label="mathieu")


def gasymov(coefficients=(1.0,)) -> PotentialSpec:
    """One-sided potential ``sum_{n>=1} c_n exp(2 pi i n x)``.

    Its discriminant coincides with the free one, ``2 cos sqrt(lambda)``.
    """
    coeffs = {n + 1: complex(c) for n, c in enumerate(coefficients)}
    if not coeffs:
        raise ValidationError("gasymov needs at least one coefficient")
    return PotentialSpec(coeffs, label="gasymov")


def _sawtooth_piece(x: np.ndarray) -> np.ndarray:
    return 1j * np.pi * (1.0 - 2.0 * np.asarray(x, dtype=float))


def sawtooth(n_q: int = 128) -> PotentialSpec:
    """``q(x) = i pi (1 - 2x)`` on ``[0, 1)``, with ``q_n = 1/n`` exactly.

    The potential jumps by ``2 pi i`` at integer points; it is PT-symmetric
    with ``f = 0`` and ``g_n = 1/n``.
    """
    coeffs = {n: 1.0 / n for n in range(-n_q, n_q + 1) if n != 0}
    return PotentialSpec(
        coeffs,
        [Piece(0.0, _sawtooth_piece)],
        n_q=n_q,
        label="sawtooth",
        table_is_exact=False,
    )


@dataclass(frozen=True)
class PresetInfo:
    name: str
    factory: Callable[..., PotentialSpec]
    params: tuple[str, ...]
    description: str


PRESETS: dict[str, PresetInfo] = {
    "zero": PresetInfo("zero", zero, (), "free operator q = 0"),
    "cos": PresetInfo("cos", cos, ("amplitude",), "2 c cos(2 pi x), real self-adjoint"),
    "mathieu": PresetInfo(
        "mathieu", mathieu, ("a", "b"), "a exp(-2 pi i x) + b exp(2 pi i x), real a, b"
    ),
    "gasymov": PresetInfo(
        "gasymov", gasymov, ("coefficients",), "one-sided series, spectrum [0, inf)"
    ),
    "sawtooth": PresetInfo(
        "sawtooth", sawtooth, ("n_q",), "i pi (1 - 2x), PT-symmetric with a jump"
    ),
}


def make_preset(name: str, **params) -> PotentialSpec:
    """Instantiate a preset by name, validating parameter names."""
    try:
        info = PRESETS[name]
    except KeyError:
        raise ValidationError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None
    unknown = set(params) - set(info.params)
    if unknown:
        raise ValidationError(f"preset {name!r} does not take {sorted(unknown)}")
    return info.factory(**params)
