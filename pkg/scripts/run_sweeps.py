#!/usr/bin/env python3
"""Run every named experiment and collect CSVs, gnuplot scripts and one report.

    python3 scripts/run_sweeps.py --out results/ [--workers 4] [--seed 7]
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field, replace
from pathlib import Path

from finslab.experiments import DEFAULT_SEED, ExperimentSpec, IotaGrid, emit_report, run


@dataclass(frozen=True)
class SweepPlan:
    out: Path = Path("results")
    seed: int = DEFAULT_SEED
    workers: int = 1
    specs: tuple[tuple[str, ExperimentSpec], ...] = field(default_factory=lambda: (
        ("hardy_berwald", ExperimentSpec("hardy", n=3, p=2, iota=IotaGrid(1e-3, 1e-1, 13))),
        ("uncertainty_berwald", ExperimentSpec("uncertainty", n=3, p=2, s=1)),
        ("ckn_berwald_s1.5", ExperimentSpec("ckn", n=3, p=2, m=3, s=1.5, mu=1.5)),
        ("ckn_berwald_s2", ExperimentSpec("ckn", n=3, p=2, m=3, s=2.0, mu=1.5)),
        ("ckn_berwald_s2.5", ExperimentSpec("ckn", n=3, p=2, m=3, s=2.5, mu=1.5)),
        ("ckn_funk", ExperimentSpec("ckn", space="funk", n=3, p=2, m=3, s=1)),
        ("uncertainty_funk", ExperimentSpec("uncertainty", space="funk", n=3, p=2, s=1)),
        ("sobolev_berwald", ExperimentSpec("sobolev", n=2, p=2)),
        ("funk_exact", ExperimentSpec("funk_exact", n=2, p=2, iota=IotaGrid(0.5, 0.5, 1))),
        ("model5_k1_C2", ExperimentSpec("model5", space="model:1,2", n=3, p=2, s=0.0, m=3)),
        ("model5_k0_C3", ExperimentSpec("model5", space="model:0,3", n=3, p=2, s=0.0, m=3)),
        ("curvature_berwald", ExperimentSpec("curvature", n=3)),
        ("curvature_funk", ExperimentSpec("curvature", space="funk", n=3)),
        ("quartic", ExperimentSpec("quartic", n=2, samples=500)),
        ("geodesic_berwald", ExperimentSpec("geodesic", n=3)),
    ))


def execute(plan: SweepPlan) -> list:
    plan.out.mkdir(parents=True, exist_ok=True)
    results = []
    for name, spec in plan.specs:
        spec = replace(spec, out=str(plan.out / f"{name}.csv"), seed=plan.seed, workers=plan.workers)
        res = run(spec)
        status = "PASS" if res.passed else "FAIL"
        slope = f"  slope {res.slope_fit.slope:.4f}" if res.slope_fit else ""
        print(f"{status}  {name}{slope}", flush=True)
        results.append(res)
    emit_report(results, plan.out / "report.txt")
    return results


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=SweepPlan.out)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args()
    execute(SweepPlan(out=a.out, seed=a.seed, workers=a.workers))


if __name__ == "__main__":
    main()
