"""Batch command-line front end for the counting studies.

Subcommands consume a TOML (or JSON) config and emit deterministic CSV or
JSON reports: 17 significant digits, '.' decimal separator, LF line
endings, ordered rows regardless of thread count.  Exit codes: 0 success,
2 precondition violation, 3 acceptance-threshold failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import de_gennes, direct2d, geometry, model_ops, weyl_law

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_ACCEPTANCE = 3


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        import tomllib as toml_mod          # Python >= 3.11
    except ModuleNotFoundError:
        import tomli as toml_mod
    try:
        return toml_mod.loads(raw.decode("utf-8"))
    except Exception:
        return json.loads(raw.decode("utf-8"))


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _emit(rows: list[dict], columns: list[str], fmt: str, out: str | None) -> None:
    """Write the report: CSV with a mandatory header, or a JSON array."""
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt(row[c]) for c in columns) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        payload = [{c: (float(row[c]) if isinstance(row[c], (np.floating, float))
                        else (int(row[c]) if isinstance(row[c], (np.integer, int))
                              and not isinstance(row[c], bool) else row[c]))
                    for c in columns} for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _emit_json(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _map_ordered(fn, items, threads: int):
    """Apply fn to items, optionally on a thread pool, preserving order."""
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _curve_from_config(cfg: dict) -> geometry.BoundaryCurve:
    side = cfg.get("side", geometry.INTERIOR)
    shape = cfg.get("shape", "circle")
    if shape == "circle":
        return geometry.circle(float(cfg.get("R", 1.0)), side=side)
    if shape == "ellipse":
        return geometry.ellipse(float(cfg["a"]), float(cfg["b"]), side=side)
    raise ValueError(f"unknown shape {shape!r}")


def cmd_constants(args, cfg: dict) -> int:
    n_grid = int(cfg.get("n_grid", de_gennes.DEFAULT_N_GRID)) * max(1, args.refine)
    const = de_gennes.find_constants(n_grid=n_grid)
    _emit_json(json.loads(const.to_json()), args.out)
    return EXIT_OK


def cmd_mu(args, cfg: dict) -> int:
    xis = [float(x) for x in cfg.get("xis", [-1.0, -0.76818, 0.0, 1.0])]
    j = int(cfg.get("j", 0))
    vals = de_gennes.mu_batch(np.array(xis), j=j)
    rows = [{"xi": x, "mu": float(v)} for x, v in zip(xis, vals)]
    _emit(rows, ["xi", "mu"], args.format, args.out)
    return EXIT_OK


def cmd_nu(args, cfg: dict) -> int:
    betas = [float(b) for b in cfg.get("betas", [0.6, 0.7, 0.8, 0.9])]
    plus, minus = de_gennes.default_branches()
    rows = []
    for b in betas:
        if not 0.0 <= b < 1.0:
            sys.stderr.write(f"beta={b} outside [0, 1)\n")
            return EXIT_PRECONDITION
        rows.append({"beta": b, "nu_minus": float(de_gennes.nu(minus, b)),
                     "nu_plus": float(de_gennes.nu(plus, b))})
    _emit(rows, ["beta", "nu_minus", "nu_plus"], args.format, args.out)
    return EXIT_OK


def _halfcyl_row(case: dict) -> dict:
    h, S, B = float(case["h"]), float(case["S"]), float(case["B"])
    lam = float(case["lam"]) if "lam" in case else h * B * float(case["b0"])
    spec = model_ops.HalfCylinderSpec(S=S, B=B, h=h)
    if lam >= h * B:
        raise ValueError(f"lam={lam} >= h*B={h * B}: count is infinite")
    n_exact = model_ops.count_half_cylinder_exact(spec, lam)
    n_oracle = model_ops.count_half_cylinder_oracle(spec, lam)
    gap = model_ops.half_cylinder_estimate_gap(spec, lam / h)
    return {"h": h, "S": S, "B": B, "lam": lam, "N_exact": n_exact,
            "N_oracle": n_oracle, "estimate_lhs": gap,
            "estimate_rhs": math.sqrt(h)}


def cmd_halfcyl(args, cfg: dict) -> int:
    cases = cfg.get("cases")
    if not cases:
        sys.stderr.write("config must provide [[cases]] with h, S, B, lam/b0\n")
        return EXIT_PRECONDITION
    try:
        rows = _map_ordered(_halfcyl_row, list(cases), args.threads)
    except ValueError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_PRECONDITION
    _emit(rows, ["h", "S", "B", "lam", "N_exact", "N_oracle",
                 "estimate_lhs", "estimate_rhs"], args.format, args.out)
    return EXIT_OK


def _strip_row(case_refine) -> dict:
    case, refine = case_refine
    spec = model_ops.StripSpec(
        S=float(case["S"]), T=float(case["T"]), B=float(case["B"]),
        h=float(case["h"]), kappa=float(case.get("kappa", 0.0)),
        bc_s=case.get("bc_s", "dirichlet"))
    lam = float(case["lam"]) if "lam" in case \
        else spec.h * spec.B * float(case["b0"])
    n = model_ops.count_strip(spec, lam, refine=refine)
    return {"h": spec.h, "S": spec.S, "T": spec.T, "B": spec.B,
            "kappa": spec.kappa, "bc_s": spec.bc_s, "lam": lam, "N": n}


def cmd_strip(args, cfg: dict) -> int:
    cases = cfg.get("cases")
    if not cases:
        sys.stderr.write("config must provide [[cases]] with h, S, T, B, lam/b0\n")
        return EXIT_PRECONDITION
    try:
        rows = _map_ordered(_strip_row,
                            [(c, max(1, args.refine)) for c in cases],
                            args.threads)
    except ValueError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_PRECONDITION
    _emit(rows, ["h", "S", "T", "B", "kappa", "bc_s", "lam", "N"],
          args.format, args.out)
    return EXIT_OK


def cmd_weyl(args, cfg: dict) -> int:
    try:
        curve = _curve_from_config(cfg)
        B = float(cfg.get("B", 1.0))
        field = geometry.BoundaryField.constant(curve, B)
        report: dict = {"length": curve.length, "side": curve.side, "B": B}
        if "b0" in cfg:
            pred = weyl_law.edge_weyl_term(curve, field, float(cfg["b0"]))
            report["edge_term"] = {"b0": float(cfg["b0"]),
                                   "main_term": pred.main_term,
                                   "h_power": str(pred.h_power)}
        if "kappa0" in cfg:
            pred = weyl_law.curvature_term(curve, float(cfg["kappa0"]), B)
            report["curvature_term"] = {"kappa0": float(cfg["kappa0"]),
                                        "main_term": pred.main_term,
                                        "h_power": str(pred.h_power)}
        if "b0" in cfg and "area" in cfg:
            report["bulk_term"] = weyl_law.bulk_weyl_term(
                float(cfg["area"]), float(cfg["b0"]), B)
    except ValueError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_PRECONDITION
    _emit_json(report, args.out)
    return EXIT_OK


def _radial_problem(cfg: dict) -> direct2d.RadialProblem:
    return direct2d.RadialProblem(
        side=cfg.get("side", geometry.INTERIOR),
        R=float(cfg.get("R", 1.0)), h=float(cfg.get("h", 1e-3)),
        B=float(cfg.get("B", 1.0)),
        points_per_length=float(cfg.get("points_per_length",
                                        direct2d.POINTS_PER_MAGNETIC_LENGTH)))


def cmd_verify_disk(args, cfg: dict) -> int:
    try:
        p = _radial_problem(cfg)
        b0 = float(cfg.get("b0", 0.8))
        h_list = [float(h) for h in cfg.get("h_list", [4e-3, 2e-3, 1e-3])]
        rows = direct2d.convergence_study(p, b0, h_list)
    except (ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_PRECONDITION
    _emit(rows, ["h", "N", "scaled", "prediction", "rel_err",
                 "rel_err_nonincreasing"], args.format, args.out)
    max_rel = cfg.get("max_rel_err")
    if max_rel is not None and rows[-1]["rel_err"] > float(max_rel):
        return EXIT_ACCEPTANCE
    if cfg.get("require_nonincreasing", False) \
            and not rows[0]["rel_err_nonincreasing"]:
        return EXIT_ACCEPTANCE
    return EXIT_OK


def cmd_theorem2(args, cfg: dict) -> int:
    try:
        p = _radial_problem(cfg)
        kappa0 = float(cfg.get("kappa0", 0.0))
        h_list = [float(h) for h in cfg.get("h_list", [1e-3, 3e-4, 1e-4])]
        rows = direct2d.theorem2_study(p, kappa0, h_list)
    except (ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_PRECONDITION
    _emit(rows, ["h", "N", "scaled", "prediction", "deviation"],
          args.format, args.out)
    band = cfg.get("max_deviation")
    if band is not None and any(abs(r["deviation"]) > float(band) for r in rows):
        return EXIT_ACCEPTANCE
    return EXIT_OK


_COMMANDS = {
    "constants": cmd_constants,
    "mu": cmd_mu,
    "nu": cmd_nu,
    "halfcyl": cmd_halfcyl,
    "strip": cmd_strip,
    "weyl": cmd_weyl,
    "verify-disk": cmd_verify_disk,
    "theorem2": cmd_theorem2,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgecount",
        description="Eigenvalue counting studies for magnetic edge states.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None,
                        help="TOML (or JSON) parameter file")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--refine", type=int, default=1,
                        help="grid refinement multiplier")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"cannot read config: {exc}\n")
        return EXIT_PRECONDITION
    try:
        return _COMMANDS[args.command](args, cfg)
    except ValueError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
