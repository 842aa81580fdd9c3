"""Command-line front end: curve sweeps, regime reports, self-validation.

Exit status: 0 success, 1 validation failure, 2 input error, 3 numerical
error (resonance or quadrature convergence).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, config, engine, validation
from .errors import ConvergenceError, DomainError, InputError, PreconditionError, ResonanceError
from .polarizability import Prescription, polarizability_tensor, relative_permittivity
from .quadrature import QuadratureSpec

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

THREADS_ENV = "VDWTAILS_THREADS"
NULL = "null"
COLUMNS = (
    "R",
    "wick_dir",
    "pole_real_dir",
    "width_dir",
    "wick_mix",
    "pole_real_mix",
    "width_mix",
    "total_plus",
    "total_minus",
    "width_total_plus",
)


def _fmt(value) -> str:
    if value is None:
        return NULL
    return f"{float(value):.16e}"


def units_block(c: float) -> dict:
    return {
        "system": "atomic",
        "hbar": 1.0,
        "e": 1.0,
        "four_pi_eps0": 1.0,
        "c": c,
        "energy": "hartree",
        "length": "bohr",
    }


def _quadrature_spec(cfg: config.RunConfig):
    overrides = cfg.quadrature_overrides()
    if not overrides:
        return None
    defaults = {"rel_tol": engine.WICK_REL_TOL, "abs_tol": 1e-14, "max_subdivisions": engine.WICK_MAX_SUBDIVISIONS}
    defaults.update(overrides)
    return QuadratureSpec(**defaults)


def curve_row(pair, R: float, channels, spec=None) -> list:
    """One CSV row; channels that were not requested or do not apply are None."""
    b = engine.total_shift(pair, R, spec)
    wick = "wick" in channels
    pole = "pole" in channels
    width = "width" in channels
    both = wick and pole
    return [
        R,
        b.wick_dir if wick else None,
        b.pole_real_dir if pole else None,
        b.width_dir if width else None,
        b.wick_mix if wick else None,
        b.pole_real_mix if pole else None,
        b.width_mix if width else None,
        b.total_plus if both else None,
        b.total_minus if both else None,
        b.width_total_plus if width else None,
    ]


def compute_curve(cfg: config.RunConfig, threads: int = 1) -> list:
    """Rows in grid order; grid points are evaluated concurrently."""
    pair = cfg.pair()
    spec = _quadrature_spec(cfg)
    grid = [float(R) for R in cfg.grid.values()]
    if threads <= 1:
        return [curve_row(pair, R, cfg.channels, spec) for R in grid]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map yields results in submission order
        return list(pool.map(lambda R: curve_row(pair, R, cfg.channels, spec), grid))


def render_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _metadata(cfg: config.RunConfig, **extra) -> dict:
    meta = {
        "version": __version__,
        "config_sha256": cfg.sha256(),
        "units": units_block(cfg.c),
        "pair": {"ref_a": cfg.ref_a, "ref_b": cfg.ref_b, "identical": cfg.identical, "axis": list(cfg.axis)},
        "prescription": cfg.prescription,
    }
    meta.update(extra)
    return meta


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _json_default(obj):
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (bool, int, float, str)):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n"


def _shift_prescription(args, cfg: config.RunConfig) -> None:
    chosen = args.prescription or cfg.prescription
    if Prescription.parse(chosen) is not Prescription.FEYNMAN:
        raise InputError("the retarded prescription is only available in 'inspect'; shift computations are time-ordered")


def _resolve_threads(value) -> int:
    raw = value if value is not None else os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except (TypeError, ValueError):
        raise InputError(f"thread count must be an integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"thread count must be at least 1, got {n}")
    return n


def cmd_curve(args) -> int:
    cfg = config.load(args.config)
    _shift_prescription(args, cfg)
    threads = _resolve_threads(args.threads)
    rows = compute_curve(cfg, threads)
    out = Path(args.out)
    _write(out / cfg.csv_name, render_csv(rows))
    meta = _metadata(
        cfg,
        csv=cfg.csv_name,
        columns=list(COLUMNS),
        rows=len(rows),
        channels=list(cfg.channels),
        null_marker=NULL,
        grid={"min": cfg.grid.min, "max": cfg.grid.max, "points": cfg.grid.points, "spacing": cfg.grid.spacing},
    )
    _write(out / cfg.json_name, _dump_json(meta))
    print(f"wrote {len(rows)} rows to {out / cfg.csv_name}")
    return EXIT_OK


def regime_dict(report: engine.RegimeReport) -> dict:
    return {
        "C6": report.c6_tensor_sum,
        "C7": report.c7_coefficient,
        "envelopes": [
            {"state": e.state_label, "atom": e.atom, "E_m": e.E_m, "amplitude": e.amplitude, "wavenumber": e.wavenumber}
            for e in report.pole_envelopes
        ],
        "crossover_radius": report.crossover_radius,
        "ratio_slope": report.ratio_slope,
        "wick_slope": report.wick_slope,
        "envelope_slope": report.envelope_slope,
        "rule_of_thumb": [{"R": R, "ratio": r, "R_over_c_pow5": s} for R, r, s in report.rule_of_thumb_ratio_at],
    }


def cmd_regimes(args) -> int:
    cfg = config.load(args.config)
    _shift_prescription(args, cfg)
    report = engine.crossover_report(cfg.pair(), cfg.grid.values())
    data = _metadata(cfg, report=regime_dict(report))
    text = _dump_json(data)
    out = Path(args.out)
    _write(out / "regimes.json", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    results = validation.run_suite()
    data = {
        "version": __version__,
        "passed": all(r.passed for r in results),
        "checks": [r.to_dict() for r in results],
    }
    text = _dump_json(data)
    if args.out is not None:
        _write(Path(args.out) / "validate.json", text)
    sys.stdout.write(text)
    return EXIT_OK if data["passed"] else EXIT_VALIDATION


def _complex_list(matrix) -> list:
    return [[[complex(v).real, complex(v).imag] for v in row] for row in np.asarray(matrix)]


def cmd_inspect(args) -> int:
    cfg = config.load(args.config)
    presc = Prescription.parse(args.prescription or Prescription.FEYNMAN.value)
    if args.atom == "A":
        atom, ref = cfg.atom_a.model, cfg.ref_a
    else:
        atom = (cfg.atom_b or cfg.atom_a).model
        ref = cfg.ref_b
    omega = complex(args.omega_re, args.omega_im)
    tensor = polarizability_tensor(atom, ref, omega, presc, args.epsilon)
    data = _metadata(
        cfg,
        atom=args.atom,
        reference=ref,
        omega=[omega.real, omega.imag],
        epsilon=args.epsilon,
        prescription=presc.value,
        polarizability=_complex_list(tensor.entries),
    )
    if args.density is not None:
        if presc is not Prescription.RETARDED:
            raise InputError("permittivity needs --prescription retarded")
        perm = relative_permittivity(atom, ref, args.density, omega, args.epsilon)
        data["permittivity"] = {
            "value": [perm.value.real, perm.value.imag],
            "number_density": perm.number_density,
            "scalar_polarizability": [perm.polarizability.real, perm.polarizability.imag],
            "epsilon0": perm.epsilon0,
        }
    sys.stdout.write(_dump_json(data))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vdwtails", description="Dispersion shifts of two model atoms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    presc = dict(choices=[p.value for p in Prescription], default=None, help="pole prescription")

    p = sub.add_parser("curve", help="shift components on a distance grid (CSV + JSON)")
    p.add_argument("--config", required=True, help="TOML run configuration")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--threads", type=str, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.add_argument("--prescription", **presc)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("regimes", help="asymptotic coefficients and crossover radius (JSON)")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--threads", type=str, default=None, help="accepted for symmetry; the report is serial")
    p.add_argument("--prescription", **presc)
    p.set_defaults(func=cmd_regimes)

    p = sub.add_parser("validate", help="run the built-in identity and cross-check suite")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("inspect", help="polarizability tensor (and permittivity) at one frequency")
    p.add_argument("--config", required=True)
    p.add_argument("--atom", choices=("A", "B"), default="A")
    p.add_argument("--omega-re", type=float, required=True)
    p.add_argument("--omega-im", type=float, default=0.0)
    p.add_argument("--epsilon", type=float, default=0.0, help="finite pole displacement")
    p.add_argument("--density", type=float, default=None, help="number density for the permittivity (Bohr^-3)")
    p.add_argument("--prescription", **presc)
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except ResonanceError as exc:
        levels = ", ".join(exc.labels) if exc.labels else "unknown"
        print(f"error: resonance ({levels}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
