"""Command-line front end: ``finslab {eval,geodesic,sweep,verify,report}``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import berwald as bw
from . import finsler as fs
from .acceptance import CRITERIA, verify
from .errors import FinslerError, InvalidParams
from .experiments import (CSV_HEADER, DEFAULT_SEED, EXPERIMENTS, ExperimentSpec, IotaGrid, emit_report,
                          funk_norm, parse_space, report_lines, run)
from .finsler import minkowski_space
from .funk import FunkSpace
from .minkowski import MinkowskiNorm

PRIMARY_TOL = {
    "hardy": "slope", "uncertainty": "decay", "ckn": "ckn_window", "sobolev": "exact",
    "quartic": "quartic_oracle", "geodesic": "geodesic", "funk_exact": "exact", "model5": "decay",
}


def _vec(text: str | None) -> np.ndarray | None:
    if text is None:
        return None
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise InvalidParams(f"expected comma-separated numbers, got {text!r}") from exc


def _space_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--space", help="berwald | euclidean | funk[:kind[:numbers]] | model[:k,C]")
    p.add_argument("--n", type=int, help="dimension")
    p.add_argument("--seed", type=int, help=f"random seed (default {DEFAULT_SEED})")


def _sweep_flags(p: argparse.ArgumentParser) -> None:
    _space_flags(p)
    for name in ("p", "s", "m", "mu", "k", "C"):
        p.add_argument(f"--{name}", type=float, dest=name)
    p.add_argument("--iota", type=float, help="single iota (shorthand for min = max, count = 1)")
    p.add_argument("--iota-min", type=float)
    p.add_argument("--iota-max", type=float)
    p.add_argument("--iota-count", type=int)
    p.add_argument("--out", help="CSV path; a .gp plot script and a report land next to it")
    p.add_argument("--tol", action="append", default=[],
                   help="tolerance override, KEY=VALUE or a bare number for the main threshold")
    p.add_argument("--samples", type=int, help="sample count for curvature/quartic")
    p.add_argument("--functional", choices=("hardy", "uncertainty", "ckn"), help="model5 CSV rows")
    p.add_argument("--workers", type=int, help="parallel processes for sweep grid points")
    p.add_argument("--config", help="JSON config; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="finslab", description="Numerical Finsler geometry experiments.")
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="pointwise metric, co-metric and curvature queries")
    _space_flags(ev)
    ev.add_argument("--x", required=True, help="base point, comma separated")
    ev.add_argument("--y", help="tangent vector")
    ev.add_argument("--xi", help="covector")
    ev.add_argument("--v", help="transverse edge for the flag curvature")

    geo = sub.add_parser("geodesic", help="integrate a geodesic from (x0, y0)")
    _space_flags(geo)
    geo.add_argument("--x0", required=True)
    geo.add_argument("--y0", required=True)
    geo.add_argument("--T", type=float, default=1.0)
    geo.add_argument("--steps", type=int, default=1000)
    geo.add_argument("--every", type=int, default=100, help="print every k-th step")

    sw = sub.add_parser("sweep", help="run one named experiment")
    sw.add_argument("experiment", choices=EXPERIMENTS)
    _sweep_flags(sw)

    ve = sub.add_parser("verify", help="run the acceptance suite")
    ve.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ve.add_argument("--only", help="comma-separated criterion numbers")
    ve.add_argument("--out", help="write the report here")

    rp = sub.add_parser("report", help="run several experiments and write one report")
    rp.add_argument("--config", help="JSON list of experiment configs (default: one per experiment)")
    rp.add_argument("--out", required=True, help="report path")
    rp.add_argument("--seed", type=int)
    return ap


# eval / geodesic -----------------------------------------------------------------------

def _finsler(space: str, n: int) -> tuple[fs.FinslerSpace, str]:
    kind, extra = parse_space(space)
    if kind == "berwald":
        return bw.berwald_space(n), kind
    if kind == "funk":
        return FunkSpace(funk_norm(ExperimentSpec("curvature", space=space, n=n))).finsler, kind
    if kind == "euclidean":
        return minkowski_space(MinkowskiNorm.euclidean(n)), kind
    raise InvalidParams("eval/geodesic need berwald, euclidean or funk spaces")


def cmd_eval(args) -> dict[str, Any]:
    x = _vec(args.x)
    n = args.n or x.size
    space, kind = _finsler(args.space or "berwald", n)
    out: dict[str, Any] = {"space": space.name, "x": x.tolist()}
    if kind == "berwald":
        out["distance_from_origin"] = bw.dist_from_origin(x)
        out["distance_to_origin"] = bw.dist_to_origin(x)
    y = _vec(args.y)
    if y is not None:
        out["F"] = float(space.metric(x, y))
        out["F_reverse"] = float(space.metric(x, -y))
        out["g"] = fs.fundamental_tensor(space, x, y).tolist()
        out["legendre"] = fs.legendre(space, x, y).components.tolist()
        out["geodesic_coeffs"] = np.asarray(fs.geodesic_coeffs(space, x, y)).tolist()
        if space.density is not None:
            out["S"] = fs.s_curvature(space, x, y)
        if n >= 2:
            out["ricci"] = fs.ricci(space, x, y)
        v = _vec(args.v)
        if v is not None:
            out["flag_curvature"] = fs.flag_curvature(space, x, y, v)
    xi = _vec(args.xi)
    if xi is not None:
        out["F_star"] = fs.cometric(space, x, xi)
        out["F_star_oracle"] = fs.cometric_oracle(space, x, xi)
        if kind == "berwald" and np.any(x):
            sol = bw.solve_cometric_quartic(x, xi)
            out["quartic"] = {"value": sol.value, "candidates": sol.candidates.tolist(),
                              "admissible": sol.admissible.tolist(), "residual": sol.residual,
                              "used_oracle": sol.used_oracle}
    return out


def cmd_geodesic(args) -> list[str]:
    x0, y0 = _vec(args.x0), _vec(args.y0)
    space, _ = _finsler(args.space or "berwald", args.n or x0.size)
    path = fs.geodesic_integrate(space, x0, y0, args.T, args.steps)
    dt = args.T / args.steps
    lines = ["t," + ",".join(f"x{i}" for i in range(x0.size)) + "," + ",".join(f"y{i}" for i in range(x0.size))
             + ",F"]
    for i, (x, y) in enumerate(path):
        if i % max(args.every, 1) == 0 or i == len(path) - 1:
            vals = [i * dt, *x, *y, float(space.metric(x, y))]
            lines.append(",".join(repr(float(v)) for v in vals))
    return lines


# sweep / report -------------------------------------------------------------------------

def spec_from_args(args, experiment: str | None = None) -> ExperimentSpec:
    cfg: dict[str, Any] = {}
    if getattr(args, "config", None):
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    experiment = experiment or cfg.get("experiment")
    tol = dict(cfg.get("tol", {}))
    for item in args.tol:
        if "=" in item:
            key, val = item.split("=", 1)
            tol[key.strip()] = float(val)
        else:
            key = PRIMARY_TOL.get(experiment)
            if experiment == "curvature":
                key = "curv_berwald" if (args.space or cfg.get("space", "berwald")).startswith("berwald") \
                    else "curv_funk"
            tol[key] = float(item)
    iota_min, iota_max, iota_count = args.iota_min, args.iota_max, args.iota_count
    if args.iota is not None:
        iota_min = iota_max = args.iota
        iota_count = 1
    cfg = {**cfg, "tol": tol, "experiment": experiment}
    return ExperimentSpec.from_config(
        cfg, space=args.space, n=args.n, p=args.p, s=args.s, m=args.m, mu=args.mu, k=args.k,
        C=args.C, out=args.out, seed=args.seed, samples=args.samples, functional=args.functional,
        workers=args.workers, iota_min=iota_min, iota_max=iota_max, iota_count=iota_count)


def cmd_sweep(args) -> list[str]:
    spec = spec_from_args(args, args.experiment)
    res = run(spec)
    lines = report_lines([res])
    if spec.out:
        emit_report([res], Path(spec.out).with_suffix(".report.txt"))
    if res.rows and not spec.out:
        lines = [CSV_HEADER] + [",".join(repr(v) for v in r) for r in res.rows] + lines
    return lines


def default_report_specs(seed: int | None) -> list[ExperimentSpec]:
    s = {} if seed is None else {"seed": seed}
    return [
        ExperimentSpec("geodesic", **s),
        ExperimentSpec("quartic", n=2, **s),
        ExperimentSpec("curvature", n=3, **s),
        ExperimentSpec("curvature", space="funk", n=3, **s),
        ExperimentSpec("funk_exact", n=2, p=2, iota=IotaGrid(0.5, 0.5, 1)),
        ExperimentSpec("hardy", n=3, p=2),
        ExperimentSpec("uncertainty", n=3, p=2, s=1),
        ExperimentSpec("ckn", n=3, p=2, m=3, s=1.5),
        ExperimentSpec("ckn", space="funk", n=3, p=2, m=3, s=1),
        ExperimentSpec("sobolev", n=2, p=2),
        ExperimentSpec("model5", space="model:1,2", n=3, p=2, s=0.0, m=3),
    ]


def cmd_report(args) -> list[str]:
    if args.config:
        cfgs = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if isinstance(cfgs, dict):
            cfgs = [cfgs]
        specs = [ExperimentSpec.from_config(c, seed=args.seed) for c in cfgs]
    else:
        specs = default_report_specs(args.seed)
    results = [run(s) for s in specs]
    emit_report(results, args.out)
    return report_lines(results)


def cmd_verify(args) -> tuple[list[str], bool]:
    only = {int(v) for v in args.only.split(",")} if args.only else None
    unknown = (only or set()) - {c.number for c in CRITERIA}
    if unknown:
        raise InvalidParams(f"no acceptance criteria numbered {sorted(unknown)}")
    checks = verify(args.seed, only, progress=lambda c: print(c.line(), flush=True))
    if args.out:
        emit_report(checks, args.out)
    failed = sum(not c.passed for c in checks)
    return [f"{len(checks)} checks, {failed} failed"], failed == 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "eval":
            print(json.dumps(cmd_eval(args), indent=2))
            return 0
        if args.command == "geodesic":
            print("\n".join(cmd_geodesic(args)))
            return 0
        if args.command == "sweep":
            print("\n".join(cmd_sweep(args)))
            return 0
        if args.command == "report":
            print("\n".join(cmd_report(args)))
            return 0
        lines, ok = cmd_verify(args)
        print("\n".join(lines))
        return 0 if ok else 1
    except (FinslerError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
