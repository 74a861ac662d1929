"""Small shared types: three-valued verdicts and default tolerances."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Verdict(str, enum.Enum):
    """Outcome of a numerical test that may be unable to decide."""

    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_bool(cls, flag: bool) -> "Verdict":
        return cls.YES if flag else cls.NO


TAU_ROOT = 1e-9
TAU_MULT = 1e-6
TAU_CLUSTER = 1e-6
TAU_CONJ = 1e-7
TAU_REAL = 1e-7
MERGE_TOL = 1e-6
TAU_PT = 1e-10


@dataclass(frozen=True)
class Tolerances:
    """Tolerance set shared by the solvers; ``root``, ``cluster`` and ``real``
    are relative (multiplied by ``max(1, |lambda|)``)."""

    root: float = TAU_ROOT
    mult: float = TAU_MULT
    cluster: float = TAU_CLUSTER
    conj: float = TAU_CONJ
    real: float = TAU_REAL
    merge: float = MERGE_TOL
    pt: float = TAU_PT

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"tolerance {name!r} must be a positive number, got {value!r}")


DEFAULT_TOLERANCES = Tolerances()


def scaled(tol: float, lam: complex) -> float:
    """Return ``tol * max(1, |lam|)``, the relative-absolute mix used everywhere."""
    return tol * max(1.0, abs(lam))


def free_level(n: int, t: float) -> float:
    """Unperturbed eigenvalue ``(2 pi n + t)**2``."""
    return (2.0 * math.pi * n + t) ** 2
