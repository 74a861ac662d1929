"""Run configuration: parsing and validation of the JSON document."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from ._common import Tolerances
from .bloch import H_MAX, LocalizationConfig, default_t_grid
from .errors import ValidationError
from .monodromy import IntegratorConfig
from .potential import PotentialSpec
from .presets import PRESETS, make_preset

TASKS = ("bands", "half_line", "real_test", "criteria", "singularities", "mathieu")

_TOP_KEYS = {
    "potential", "n_max", "t_grid", "integrator", "localization", "tolerances",
    "tasks", "output", "mathieu", "criteria", "real_test", "threads",
}


@dataclass
class CriteriaConfig:
    n_range: tuple[int, int] = (6, 12)
    k_max: int = 4
    threshold: int = 6
    delta: float = 1.5
    s: int | None = None
    gap_n_range: tuple[int, int] = (8, 32)
    residual_t: tuple[float, ...] = (0.01, 0.02)


@dataclass
class MathieuConfig:
    pair: tuple[float, float] | None = None
    lam_grid: np.ndarray = field(default_factory=lambda: np.linspace(-10.0, 500.0, 101))


@dataclass
class RunConfig:
    """Validated run configuration."""

    potential: PotentialSpec
    potential_block: dict
    n_max: int
    t_grid: np.ndarray
    integrator: IntegratorConfig
    localization: LocalizationConfig
    tolerances: Tolerances
    tasks: tuple[str, ...]
    out_dir: Path
    report_name: str = "report.json"
    csv_name: str = "bands.csv"
    criteria: CriteriaConfig = field(default_factory=CriteriaConfig)
    mathieu: MathieuConfig = field(default_factory=MathieuConfig)
    scan_depth: int = 8
    threads: int = 0

    def echo(self) -> dict:
        """Normalised configuration as written into the report."""
        cr = self.criteria
        out = {
            "potential": self.potential_block,
            "n_max": self.n_max,
            "t_grid_points": int(self.t_grid.size),
            "integrator": {"steps": self.integrator.step_count, "order": self.integrator.order},
            "localization": {
                "h": self.localization.h,
                "n_cut": self.localization.n_cut,
                "disk_margin": self.localization.disk_margin,
            },
            "tasks": list(self.tasks),
            "threads": self.threads,
        }
        if "criteria" in self.tasks:
            out["criteria"] = {
                "n_range": list(cr.n_range),
                "k_max": cr.k_max,
                "threshold": cr.threshold,
                "delta": cr.delta,
                "s": cr.s,
                "gap_n_range": list(cr.gap_n_range),
            }
        if "real_test" in self.tasks:
            out["real_test"] = {"scan_depth": self.scan_depth}
        if "mathieu" in self.tasks:
            out["mathieu"] = {
                "pair": list(self.mathieu.pair),
                "lambda_points": int(self.mathieu.lam_grid.size),
            }
        return out


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


def _as_int(value: Any, name: str, minimum: int | None = None) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool), f"{name} must be an integer")
    if minimum is not None:
        _require(value >= minimum, f"{name} must be at least {minimum}")
    return int(value)


def _as_float(value: Any, name: str) -> float:
    _require(
        isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value),
        f"{name} must be a finite number",
    )
    return float(value)


def _check_keys(block: Mapping, allowed: set[str], where: str) -> None:
    _require(isinstance(block, Mapping), f"{where} must be an object")
    unknown = set(block) - allowed
    _require(not unknown, f"unknown keys in {where}: {sorted(unknown)}")


def _pair(value: Any, name: str, cast=int) -> tuple:
    _require(isinstance(value, (list, tuple)) and len(value) == 2, f"{name} must be a pair")
    items = tuple((_as_int if cast is int else _as_float)(v, name) for v in value)
    _require(items[0] <= items[1], f"{name} must be ordered")
    return items


def parse_potential(block: Any) -> PotentialSpec:
    """Build the potential from ``{"preset": ...}`` or ``{"coeffs": [[n, re, im], ...]}``."""
    _require(isinstance(block, Mapping), "potential must be an object")
    if "coeffs" in block:
        _check_keys(block, {"coeffs", "label"}, "potential")
        rows = block["coeffs"]
        _require(isinstance(rows, list) and rows, "potential.coeffs must be a non-empty list")
        table: dict[int, complex] = {}
        for row in rows:
            _require(
                isinstance(row, list) and len(row) == 3,
                "each coefficient must be [n, re, im]",
            )
            n = _as_int(row[0], "coefficient index")
            _require(n not in table, f"duplicate coefficient index {n}")
            table[n] = complex(_as_float(row[1], "coefficient"), _as_float(row[2], "coefficient"))
        label = block.get("label", "custom")
        _require(isinstance(label, str), "potential.label must be a string")
        return PotentialSpec(table, label=label)
    _require("preset" in block, "potential needs either 'preset' or 'coeffs'")
    name = block["preset"]
    _require(isinstance(name, str) and name in PRESETS, f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    params = dict(block.get("params", {}))
    for k, v in block.items():
        if k not in ("preset", "params"):
            params[k] = v
    for k, v in params.items():
        if k == "coefficients":
            _require(isinstance(v, list) and v, "coefficients must be a non-empty list")
            params[k] = tuple(_as_float(c, "coefficient") for c in v)
        elif k == "n_q":
            params[k] = _as_int(v, "n_q", 1)
        else:
            params[k] = _as_float(v, k)
    return make_preset(name, **params)


def _t_grid(block: Any, h: float) -> np.ndarray:
    if block is None:
        return default_t_grid(h)
    if isinstance(block, list):
        grid = np.array([_as_float(t, "t_grid entry") for t in block])
    else:
        _check_keys(block, {"interior", "floor", "points"}, "t_grid")
        if "points" in block:
            _require(isinstance(block["points"], list), "t_grid.points must be a list")
            grid = np.array([_as_float(t, "t_grid entry") for t in block["points"]])
        else:
            interior = _as_int(block.get("interior", 65), "t_grid.interior", 3)
            floor = _as_float(block.get("floor", 1e-4), "t_grid.floor")
            _require(0 < floor < h, "t_grid.floor must lie in (0, h)")
            grid = default_t_grid(h, interior, floor)
    _require(grid.size >= 2, "t_grid needs at least two points")
    _require(bool(np.all((grid >= 0) & (grid <= math.pi))), "t_grid points must lie in [0, pi]")
    grid = np.unique(grid)
    _require(grid[0] == 0.0 and grid[-1] == math.pi, "t_grid must contain 0 and pi")
    return grid


def parse_config(data: Any, base_dir: Path | None = None, out_override: str | None = None) -> RunConfig:
    """Validate a configuration document and return a :class:`RunConfig`."""
    _check_keys(data, _TOP_KEYS, "configuration")
    _require("potential" in data, "configuration needs a 'potential' block")
    q = parse_potential(data["potential"])
    n_max = _as_int(data.get("n_max", 8), "n_max", 1)

    integ = data.get("integrator", {})
    _check_keys(integ, {"steps", "order"}, "integrator")
    cfg = IntegratorConfig(
        step_count=_as_int(integ.get("steps", 4096), "integrator.steps", 16),
        order=_as_int(integ.get("order", 5), "integrator.order"),
    )

    loc_block = data.get("localization", {})
    _check_keys(loc_block, {"h", "n_cut", "disk_margin"}, "localization")
    h = _as_float(loc_block.get("h", 0.02), "localization.h")
    _require(0 < h < H_MAX, f"localization.h must lie in (0, {H_MAX:.6g})")
    loc = LocalizationConfig(
        h=h,
        n_cut=_as_int(loc_block.get("n_cut", 8), "localization.n_cut", 0),
        disk_margin=_as_float(loc_block.get("disk_margin", 2.0), "localization.disk_margin"),
    )

    tol_block = data.get("tolerances", {})
    _check_keys(tol_block, set(Tolerances.__dataclass_fields__), "tolerances")
    try:
        tol = Tolerances(**{k: _as_float(v, f"tolerances.{k}") for k, v in tol_block.items()})
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    tasks = data.get("tasks", ["bands"])
    if tasks == "all" or tasks == ["all"]:
        # the Mathieu comparison only applies to that preset with a partner pair
        pblock = data["potential"]
        with_pair = isinstance(data.get("mathieu"), Mapping) and "pair" in data["mathieu"]
        keep = pblock.get("preset") == "mathieu" and with_pair
        tasks = [t for t in TASKS if t != "mathieu" or keep]
    _require(isinstance(tasks, list) and tasks, "tasks must be a non-empty list")
    for t in tasks:
        _require(t in TASKS, f"unknown task {t!r}; choose from {list(TASKS)}")
    tasks = tuple(t for t in TASKS if t in tasks)

    out = data.get("output", {})
    _check_keys(out, {"dir", "report", "bands_csv"}, "output")
    out_dir = out_override or out.get("dir", ".")
    _require(isinstance(out_dir, str), "output.dir must be a string")
    out_path = Path(out_dir)
    if not out_path.is_absolute() and out_override is None and base_dir is not None:
        out_path = base_dir / out_path
    report_name = out.get("report", "report.json")
    csv_name = out.get("bands_csv", "bands.csv")
    for name in (report_name, csv_name):
        _require(isinstance(name, str) and name and os.sep not in name, "output file names must be plain names")

    crit = CriteriaConfig()
    cblock = data.get("criteria", {})
    _check_keys(cblock, {"n_range", "k_max", "threshold", "delta", "s", "gap_n_range", "residual_t"}, "criteria")
    if "n_range" in cblock:
        crit.n_range = _pair(cblock["n_range"], "criteria.n_range")
    if "gap_n_range" in cblock:
        crit.gap_n_range = _pair(cblock["gap_n_range"], "criteria.gap_n_range")
        _require(crit.gap_n_range[0] >= 1, "criteria.gap_n_range must start at 1 or above")
    crit.k_max = _as_int(cblock.get("k_max", crit.k_max), "criteria.k_max", 1)
    crit.threshold = _as_int(cblock.get("threshold", crit.threshold), "criteria.threshold", 1)
    crit.delta = _as_float(cblock.get("delta", crit.delta), "criteria.delta")
    _require(crit.delta > 1.0, "criteria.delta must exceed 1")
    if cblock.get("s") is not None:
        crit.s = _as_int(cblock["s"], "criteria.s", 0)
    if "residual_t" in cblock:
        _require(isinstance(cblock["residual_t"], list), "criteria.residual_t must be a list")
        crit.residual_t = tuple(_as_float(t, "criteria.residual_t") for t in cblock["residual_t"])
    if "criteria" in tasks:
        _require(max(abs(crit.n_range[0]), abs(crit.n_range[1])) <= n_max,
                 "criteria.n_range must lie within n_max")

    mcfg = MathieuConfig()
    mblock = data.get("mathieu", {})
    _check_keys(mblock, {"pair", "lambda_grid"}, "mathieu")
    if "pair" in mblock:
        p = mblock["pair"]
        _require(isinstance(p, list) and len(p) == 2, "mathieu.pair must be [c, d]")
        mcfg.pair = (_as_float(p[0], "mathieu.pair"), _as_float(p[1], "mathieu.pair"))
    if "lambda_grid" in mblock:
        g = mblock["lambda_grid"]
        _check_keys(g, {"start", "stop", "num"}, "mathieu.lambda_grid")
        mcfg.lam_grid = np.linspace(
            _as_float(g.get("start", -10.0), "lambda_grid.start"),
            _as_float(g.get("stop", 500.0), "lambda_grid.stop"),
            _as_int(g.get("num", 101), "lambda_grid.num", 1),
        )
    if "mathieu" in tasks:
        _require(data["potential"].get("preset") == "mathieu", "the mathieu task needs the mathieu preset")
        _require(mcfg.pair is not None, "the mathieu task needs mathieu.pair")
        ab = q.coefficient(-1).real * q.coefficient(1).real
        _require(abs(ab - mcfg.pair[0] * mcfg.pair[1]) <= 1e-12, "mathieu.pair must satisfy cd = ab")

    rblock = data.get("real_test", {})
    _check_keys(rblock, {"scan_depth"}, "real_test")
    scan_depth = _as_int(rblock.get("scan_depth", n_max), "real_test.scan_depth", 1)

    threads = _as_int(data.get("threads", 0), "threads", 0)
    return RunConfig(
        potential=q,
        potential_block=json.loads(json.dumps(data["potential"])),
        n_max=n_max,
        t_grid=_t_grid(data.get("t_grid"), h),
        integrator=cfg,
        localization=loc,
        tolerances=tol,
        tasks=tasks,
        out_dir=out_path,
        report_name=report_name,
        csv_name=csv_name,
        criteria=crit,
        mathieu=mcfg,
        scan_depth=scan_depth,
        threads=threads,
    )


def load_config(path: str | os.PathLike, out_override: str | None = None) -> RunConfig:
    """Read and validate a configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from None
    return parse_config(data, path.parent, out_override)
