"""Command line entry point ``pt-hill``."""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path
from typing import Any, Callable

import numpy as np

from ._common import Verdict
from .asymptotics import criterion_record, d_equation_residual, finite_gap_tests
from .bands import SpectrumReport, build_spectrum, half_line_test, real_spectrum_test
from .bloch import BandTracker
from .config import RunConfig, load_config
from .errors import PtHillError, ValidationError
from .potential import check_pt_symmetry, sp_membership
from .presets import PRESETS
from .singularities import (
    asymptotic_spectrality_verdict,
    mathieu_isospectrality_check,
    mathieu_spectrality,
    singularity_scan,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


# ---------------------------------------------------------------------------
# deterministic JSON
# ---------------------------------------------------------------------------


def format_float(x: float) -> str:
    """17 significant digits; integral values keep a trailing ``.0``."""
    s = format(float(x), ".17g")
    if all(ch in "-0123456789" for ch in s):
        s += ".0"
    return s


def _plain(obj: Any) -> Any:
    if isinstance(obj, Verdict):
        return obj.value
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, tuple):
        return [_plain(v) for v in obj]
    return obj


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Serialise ``obj`` to JSON with fixed float formatting.

    Complex numbers become ``[re, im]`` and non-finite floats ``null``.
    Dictionary order is preserved, so equal inputs give equal bytes.
    """
    import json

    obj = _plain(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        parts = [dumps(v, indent, _level + 1) for v in obj]
        if all("\n" not in p for p in parts) and sum(len(p) for p in parts) < 100:
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


# ---------------------------------------------------------------------------
# report sections
# ---------------------------------------------------------------------------


def _potential_section(rc: RunConfig) -> dict:
    q = rc.potential
    ok, dev = check_pt_symmetry(q, rc.tolerances.pt)
    return {
        "label": q.label,
        "n_q": q.n_q,
        "pt_symmetric": ok,
        "pt_deviation": dev,
        "has_closed_form": q.has_closed_form,
    }


def _band_section(spec: SpectrumReport) -> list[dict]:
    out = []
    for b in spec.bands:
        lo, hi = b.endpoints
        out.append({
            "n": b.n,
            "samples": int(b.t.size),
            "lambda_0": lo,
            "lambda_pi": hi,
            "real_segment": b.real_segment,
            "eps_n": b.eps_n,
            "delta_n": b.delta_n,
            "left_tail": b.has_left_tail,
            "right_tail": b.has_right_tail,
            "max_multiplicity": int(b.multiplicity.max()),
        })
    return out


def _complexation_section(spec: SpectrumReport) -> list[dict]:
    pts = sorted(spec.complexation_points, key=lambda p: (p.n, p.t))
    return [{"n": p.n, "t": p.t, "lambda": p.lam, "side": p.side} for p in pts]


def _criteria_section(rc: RunConfig, tracker: BandTracker) -> tuple[dict, Verdict]:
    q, cr = rc.potential, rc.criteria
    sp = sp_membership(q, q.n_q) if q.n_q >= 32 else None
    sp_holds = sp.holds if sp is not None else None
    records = []
    for n in range(cr.n_range[0], cr.n_range[1] + 1):
        rec = criterion_record(
            q, n, cr.threshold, cr.k_max, sp=sp_holds, tracker=tracker,
            cfg=rc.integrator, tol=rc.tolerances,
        )
        entry = {
            "n": n,
            "D_0": rec.D0,
            "D_pi": rec.Dpi,
            "D_0_uncertainty": rec.D0_uncertainty,
            "D_pi_uncertainty": rec.Dpi_uncertainty,
            "edge_products": rec.qq_prod,
            "P_n": rec.P_n,
            "verdicts": rec.verdicts,
        }
        if abs(n) >= cr.threshold:
            entry["residuals"] = [
                {"t": t, "residual": d_equation_residual(q, n, t, cr.k_max, tracker=tracker, cfg=rc.integrator)}
                for t in cr.residual_t
            ]
        records.append(entry)
    gaps = finite_gap_tests(q, cr.s, cr.gap_n_range, cr.delta)
    tests = gaps.as_dict()
    finite = Verdict.YES if Verdict.YES in tests.values() else Verdict.INCONCLUSIVE
    spect = asymptotic_spectrality_verdict(q, sp=sp_holds)
    section = {
        "records": records,
        "finite_gap_tests": {
            "verdicts": tests,
            "alpha": gaps.alpha,
            "beta": gaps.beta,
            "delta": gaps.delta,
            "jump_c": gaps.c,
            "jump_d": gaps.d,
            "detail": dict(sorted(gaps.detail.items())),
        },
        "class_membership": None if sp is None else {
            "holds": sp.holds, "s": sp.s, "c1": sp.c1, "c2": sp.c2, "c3": sp.c3,
            "N": sp.N, "residual": sp.residual, "reason": sp.reason,
        },
        "asymptotic_spectrality": {
            "verdict": spect.verdict, "reason": spect.reason, "failing": list(spect.failing),
        },
    }
    return section, finite


def _singularity_section(rc: RunConfig, spec: SpectrumReport, tracker: BandTracker) -> list[dict]:
    recs = singularity_scan(
        rc.potential, (-rc.n_max, rc.n_max), rc.t_grid, bands=spec.bands, tracker=tracker,
        cfg=rc.integrator, loc=rc.localization, tol=rc.tolerances,
    )
    return [
        {
            "n": list(r.n), "t": r.t, "lambda": r.lam, "kind": r.kind,
            "multiplicity": r.multiplicity, "is_complexation": r.is_complexation,
            "consistent": r.consistent,
        }
        for r in recs
    ]


def _mathieu_section(rc: RunConfig) -> dict:
    p = rc.potential_block
    params = dict(p.get("params", {}))
    params.update({k: v for k, v in p.items() if k not in ("preset", "params")})
    a, b = float(params.get("a", 1.0)), float(params.get("b", 1.0))
    c, d = rc.mathieu.pair
    info = mathieu_spectrality(a, b)
    dev = mathieu_isospectrality_check(a, b, c, d, rc.mathieu.lam_grid, rc.integrator)
    return {
        "a": a, "b": b, "pair": [c, d],
        "max_deviation": dev,
        "spectral": info.spectral,
        "asymptotically_spectral": info.asymptotically_spectral,
        "alpha": info.case.alpha,
        "reason": info.reason,
    }


def write_bands_csv(path: Path, spec: SpectrumReport) -> None:
    """One row per band sample, sorted by ``(n, t)``."""
    rows = []
    for b in spec.bands:
        for t, lam, m in zip(b.t, b.lam, b.multiplicity):
            rows.append((b.n, float(t), complex(lam), int(m)))
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "t", "re_lambda", "im_lambda", "multiplicity"])
        for n, t, lam, m in rows:
            w.writerow([n, format_float(t), format_float(lam.real), format_float(lam.imag), m])


def run(rc: RunConfig) -> tuple[dict, SpectrumReport | None]:
    """Execute the configured tasks; numerical failures are recorded, not raised."""
    q = rc.potential
    report: dict[str, Any] = {
        "schema": 1,
        "status": "ok",
        "potential": _potential_section(rc),
        "config": rc.echo(),
        "tolerances": dict(vars(rc.tolerances)),
    }
    errors: list[dict] = []
    verdicts: dict[str, Verdict] = {}
    spec: SpectrumReport | None = None

    def attempt(task: str, fn: Callable[[], Any]) -> Any:
        try:
            return fn()
        except ValidationError:
            raise
        except PtHillError as exc:
            errors.append({"task": task, "error": type(exc).__name__, "message": str(exc)})
            return None

    tracker = attempt("setup", lambda: BandTracker(
        q, rc.n_max, rc.integrator, rc.localization, rc.tolerances
    ))
    if tracker is None:
        report["verdicts"] = {}
        report["status"] = "partial"
        report["errors"] = errors
        return report, None
    needs_bands = "bands" in rc.tasks or "singularities" in rc.tasks
    if needs_bands:
        spec = attempt("bands", lambda: build_spectrum(
            q, rc.n_max, rc.integrator, rc.localization, rc.tolerances, rc.t_grid, tracker
        ))
        if spec is not None:
            verdicts.update(spec.verdicts)
            if "bands" in rc.tasks:
                report["bands"] = _band_section(spec)
                report["real_gaps"] = [list(g) for g in spec.real_gaps]
                report["complexation_points"] = _complexation_section(spec)
                report["conjugation_asymmetry"] = spec.conjugation_asymmetry
                report["diagnostics"] = list(spec.diagnostics)
    if "half_line" in rc.tasks:
        out = attempt("half_line", lambda: half_line_test(
            n_max=rc.n_max, tol=rc.tolerances, tracker=tracker
        ))
        if out is not None:
            verdicts["half_line"] = out.verdict
            report["half_line"] = {"verdict": out.verdict, "witness": out.witness, "detail": out.detail}
    if "real_test" in rc.tasks:
        out = attempt("real_test", lambda: real_spectrum_test(q, rc.scan_depth, rc.integrator, rc.tolerances))
        if out is not None:
            report["real_test"] = {"verdict": out.verdict, "witness": out.witness, "detail": out.detail}
            if out.verdict is not Verdict.INCONCLUSIVE or "spectrum_real" not in verdicts:
                verdicts["spectrum_real"] = out.verdict
    if "criteria" in rc.tasks:
        out = attempt("criteria", lambda: _criteria_section(rc, tracker))
        if out is not None:
            report["criteria"], verdicts["finite_gaps"] = out
    if "singularities" in rc.tasks and spec is not None:
        out = attempt("singularities", lambda: _singularity_section(rc, spec, tracker))
        if out is not None:
            report["singularities"] = out
    if "mathieu" in rc.tasks:
        out = attempt("mathieu", lambda: _mathieu_section(rc))
        if out is not None:
            report["mathieu"] = out
    report["verdicts"] = dict(sorted(verdicts.items()))
    if errors:
        report["status"] = "partial"
        report["errors"] = errors
    return report, spec


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_run(args: argparse.Namespace) -> int:
    try:
        rc = load_config(args.config, args.out)
        rc.out_dir.mkdir(parents=True, exist_ok=True)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        report, spec = run(rc)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    (rc.out_dir / rc.report_name).write_text(dumps(report) + "\n", encoding="utf-8")
    if spec is not None and "bands" in rc.tasks:
        write_bands_csv(rc.out_dir / rc.csv_name, spec)
    for key, value in report["verdicts"].items():
        print(f"{key}: {value}")
    if report["status"] != "ok":
        for err in report["errors"]:
            print(f"error in {err['task']}: {err['error']}: {err['message']}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"report written to {rc.out_dir / rc.report_name}")
    return EXIT_OK


def cmd_presets(args: argparse.Namespace) -> int:
    width = max(len(n) for n in PRESETS)
    for name in sorted(PRESETS):
        info = PRESETS[name]
        params = ", ".join(info.params) or "-"
        print(f"{name:<{width}}  params: {params:<14}  {info.description}")
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest(verbose=not args.quiet) else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pt-hill",
        description="Bloch bands and spectral diagnostics of periodic Hill operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run the tasks of a JSON configuration")
    p.add_argument("config", help="path to the configuration file")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides output.dir)")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("presets", help="list the built-in potentials")
    p.set_defaults(func=cmd_presets)
    p = sub.add_parser("selftest", help="run quick consistency checks")
    p.add_argument("-q", "--quiet", action="store_true", help="print only the summary")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
