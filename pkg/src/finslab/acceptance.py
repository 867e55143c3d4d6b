"""The twelve acceptance checks, shared by ``finslab verify`` and the test suite."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

from . import bruteforce as bf
from . import functionals as fn
from .experiments import DEFAULT_SEED, Check, ExperimentSpec, IotaGrid, run, s_curvature_ratios
from .funk import exact_forward_seminorm, exact_lp_norm, radial_integral

HARDY_GRID = IotaGrid(1e-3, 1e-1, 13)


def _combine(name: str, tag: str, parts: list[Check]) -> Check:
    return Check(name, tag, all(c.passed for c in parts), "; ".join(
        f"{c.name}: {'ok' if c.passed else 'FAILED'} ({c.detail})" for c in parts))


def berwald_distance(seed: int = DEFAULT_SEED) -> Check:
    res = run(ExperimentSpec("geodesic", space="berwald", n=3, seed=seed))
    return _combine("berwald distance", "distance functions", res.checks)


def quartic_cometric(seed: int = DEFAULT_SEED) -> Check:
    parts = [run(ExperimentSpec("quartic", n=n, samples=500, seed=seed + n)).checks[0] for n in (2, 3)]
    return _combine("quartic co-metric", "co-metric solves the quartic", parts)


def curvature_constants(seed: int = DEFAULT_SEED) -> Check:
    parts = [run(ExperimentSpec("curvature", space=sp, n=n, samples=200, seed=seed)).checks[0]
             for sp in ("berwald", "funk") for n in (2, 3)]
    return _combine("flag curvature constants", "K = 0 Berwald, K = -1/4 Funk", parts)


def s_curvature(seed: int = DEFAULT_SEED) -> Check:
    worst = {n: s_curvature_ratios(n, seed) for n in (2, 3)}
    dev = max(max(d.values()) for d in worst.values())
    detail = ", ".join(f"n={n}: Funk {d['funk']:.1e}, Berwald {d['berwald']:.1e}" for n, d in worst.items())
    return Check("S-curvature", "S = (n+1)F/2 Funk, (n+1)/(1+r) Berwald", dev <= 1e-4,
                 f"max deviation {dev:.2e} ({detail})")


def funk_exact(seed: int = DEFAULT_SEED) -> Check:
    worst = 0.0
    for n in (1, 2, 3):
        view = fn.funk_view(n)
        for p in (1.5, 2.0, 3.0):
            for iota in (0.25, 0.5, 1.0):
                lp = radial_integral(lambda t: (1.0 - t) ** (iota * p), n, "t")
                fwd = fn.gradient_integral(view, fn.exp_decay(iota), p)
                worst = max(worst, abs(lp / exact_lp_norm(n, p, iota) - 1),
                            abs(fwd / exact_forward_seminorm(n, p, iota) - 1))
    a = radial_integral(lambda t: (1.0 - t), 2, "t")
    b = fn.gradient_integral(fn.funk_view(2), fn.exp_decay(0.5), 2.0)
    spot = max(abs(a / (math.pi / 3) - 1), abs(b / (math.pi / 12) - 1))
    return Check("Funk exact Sobolev integrals", "closed-form Funk integrals",
                 worst <= 1e-10 and spot <= 1e-10,
                 f"max rel. error {worst:.1e} on the 3x3x3 grid; (2,2,0.5): {a:.12f} vs pi/3, "
                 f"{b:.12f} vs pi/12")


def hardy_failure(seed: int = DEFAULT_SEED) -> Check:
    res = run(ExperimentSpec("hardy", n=3, p=2, iota=HARDY_GRID))
    c = res.checks[0]
    return Check("Hardy slope", "Hardy inequality fails", c.passed, c.detail)


def uncertainty_failure(seed: int = DEFAULT_SEED) -> Check:
    res = run(ExperimentSpec("uncertainty", n=3, p=2, s=1))
    c = res.checks[0]
    return Check("uncertainty decay", "uncertainty principle fails", c.passed, c.detail)


def ckn_threshold(seed: int = DEFAULT_SEED) -> Check:
    below = run(ExperimentSpec("ckn", n=3, p=2, m=3, s=1.5, mu=1.5))
    slope = below.slope_fit.slope
    ok_below = below.summary["decreasing"] and 0.2 <= slope <= 0.37
    at = run(ExperimentSpec("ckn", n=3, p=2, m=3, s=2.0, mu=1.5)).checks[0]
    params = fn.FunctionalParams(3, 2, 2.5, 3)
    worst, worst_tag = math.inf, ""
    for tf in shipped_profiles(params):
        q, bound, _ = fn.ckn_lower_bound_check(tf, params)
        if q < worst:
            worst, worst_tag = q, f"{tf.tag}{tf.params}"
    bound = fn.ckn_lower_bound(params)
    div = max(_identity_gap(fn.bump(), 2), _identity_gap(fn.gaussian(), 3))
    ok_above = worst >= bound - 1e-9 and div <= 1e-6
    parts = [
        Check("s=1.5", "", ok_below, f"slope {slope:.4f} in [0.2, 0.37], decreasing={below.summary['decreasing']}"),
        at,
        Check("s=2.5", "", ok_above, f"min quotient {worst:.4f} ({worst_tag}) vs 1/24, "
                                     f"divergence identity residual {div:.1e}"),
    ]
    return _combine("CKN threshold", "CKN holds iff s > 2", parts)


def _identity_gap(tf: fn.RadialTestFunction, n: int) -> float:
    lhs, _, gap = fn.divergence_identity_residual(tf, n, 3, 2.5)
    return gap / max(abs(lhs), 1.0)


def shipped_profiles(params: fn.FunctionalParams) -> list[fn.RadialTestFunction]:
    """Profiles with finite CKN denominator at the given parameters."""
    out = [fn.bump(), fn.bump(2.0, 3.0), fn.gaussian()]
    for iota in (1.0, 0.1, 1e-2, 1e-3, 1e-4):
        out += [fn.exp_decay(iota), fn.stretched(iota, 1.5, params.p),
                fn.model_power(iota, params.s, params.p, params.m)]
    return out


def funk_ckn_failure(seed: int = DEFAULT_SEED) -> Check:
    c = run(ExperimentSpec("ckn", space="funk", n=3, p=2, m=3, s=1)).checks[0]
    return Check("Funk CKN decay", "CKN fails on Funk space", c.passed, c.detail)


def sobolev_nonlinearity(seed: int = DEFAULT_SEED) -> Check:
    parts = run(ExperimentSpec("sobolev", space="berwald", n=2, p=2)).checks
    parts += run(ExperimentSpec("sobolev", space="funk", n=3, p=2, iota=IotaGrid(0.1, 0.1, 1))).checks
    return _combine("Sobolev one-sidedness", "W^{1,p} is not a vector space", parts)


def model_bounds(seed: int = DEFAULT_SEED) -> Check:
    parts = []
    for space in ("model:1,2", "model:0,3"):
        res = run(ExperimentSpec("model5", space=space, n=3, p=2, s=0.0, m=3))
        parts += [Check(f"{space} {c.name}", c.tag, c.passed, c.detail) for c in res.checks]
    return _combine("weighted model bounds", "small-ball bound", parts)


ORACLE_CASES = (
    ("berwald", "exp_decay", {"iota": 0.5}),
    ("berwald", "stretched", {"iota": 0.3, "mu": 1.5, "p": 1.5}),
    ("funk", "exp_decay", {"iota": 0.5}),
)
ORACLE_PARAMS = fn.FunctionalParams(2, 1.5, 0.5, 3)


def oracle_equivalence(seed: int = DEFAULT_SEED) -> Check:
    worst, rows = 0.0, []
    views = {"berwald": fn.berwald_view(2), "funk": fn.funk_view(2)}
    for space, family, kw in ORACLE_CASES:
        tf = getattr(fn, family)(**kw)
        grid = bf.grid_quotients(space, tf, ORACLE_PARAMS)
        for kind, parts in fn.PARTS.items():
            radial = parts(views[space], tf, ORACLE_PARAMS).value
            worst = max(worst, abs(grid[kind] / radial - 1))
        rows.append(f"{space}/{family}")
    return Check("brute-force oracle", "radial reduction vs 2-D grid", worst <= 1e-3,
                 f"max rel. difference {worst:.1e} over {', '.join(rows)}")


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    fn: Callable[[int], Check]


CRITERIA = (
    Criterion(1, "berwald_distance", berwald_distance),
    Criterion(2, "quartic_cometric", quartic_cometric),
    Criterion(3, "curvature_constants", curvature_constants),
    Criterion(4, "s_curvature", s_curvature),
    Criterion(5, "funk_exact", funk_exact),
    Criterion(6, "hardy_failure", hardy_failure),
    Criterion(7, "uncertainty_failure", uncertainty_failure),
    Criterion(8, "ckn_threshold", ckn_threshold),
    Criterion(9, "funk_ckn_failure", funk_ckn_failure),
    Criterion(10, "sobolev_nonlinearity", sobolev_nonlinearity),
    Criterion(11, "model_bounds", model_bounds),
    Criterion(12, "oracle_equivalence", oracle_equivalence),
)


def evaluate(criterion: Criterion, seed: int = DEFAULT_SEED) -> Check:
    """Run one criterion; unexpected errors count as a failure, not a crash."""
    t0 = time.perf_counter()
    try:
        c = criterion.fn(seed)
    except Exception as exc:  # noqa: BLE001
        c = Check(criterion.name, "error", False, f"{type(exc).__name__}: {exc}")
    return Check(f"{criterion.number:2d}. {c.name}", c.tag, c.passed,
                 f"{c.detail} [{time.perf_counter() - t0:.1f}s]")


def verify(seed: int = DEFAULT_SEED, only: set[int] | None = None,
           progress: Callable[[Check], None] | None = None) -> list[Check]:
    out = []
    for crit in CRITERIA:
        if only and crit.number not in only:
            continue
        c = evaluate(crit, seed)
        out.append(c)
        if progress:
            progress(c)
    return out
