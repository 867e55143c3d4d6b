"""Radial quadrature, special functions, polar densities and synthetic measure models."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import DomainError, InvalidParams, QuadratureFailure

Scalar = Callable[[float], float]


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.max_subdivisions < 1:
            raise InvalidParams("quadrature tolerances must be positive")


DEFAULT_SPEC = QuadratureSpec()
# estimated error may exceed the requested tolerance by this factor before we give up;
# QUADPACK estimates are typically pessimistic by orders of magnitude
ERROR_SLACK = 100.0
MAX_PANEL_EXPONENT = 48


def _quad(g: Scalar, a: float, b: float, spec: QuadratureSpec) -> tuple[float, float]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(g, a, b, epsabs=spec.abs_tol * 1e-2, epsrel=spec.rel_tol,
                        limit=spec.max_subdivisions)
    if not (math.isfinite(val) and math.isfinite(err)):
        raise QuadratureFailure(f"non-finite quadrature on [{a}, {b}]")
    return val, err


def _panels(a: float, b: float) -> list[tuple[float, float]]:
    """Split [a, b] at powers of two so each panel sees one length scale."""
    if b <= 2.0 * max(a, 1.0) and a >= 0:
        return [(a, b)]
    cuts = [a]
    edge = 1.0 if a < 1.0 else 2.0 ** math.ceil(math.log2(a) + 1e-12)
    while edge < b:
        if edge > cuts[-1]:
            cuts.append(edge)
        edge *= 2.0
    cuts.append(b)
    return list(zip(cuts[:-1], cuts[1:]))


def _tail(g: Scalar, start: float, spec: QuadratureSpec) -> tuple[float, float]:
    """Integral over [start, inf) after the compactifying substitution r = start/u."""
    def h(u):
        if u <= 0.0:
            return 0.0
        r = start / u
        v = g(r)
        return v * start / (u * u) if v != 0.0 else 0.0

    return _quad(h, 0.0, 1.0, spec)


def _finish(total: float, err: float, spec: QuadratureSpec, where: str) -> float:
    if err > ERROR_SLACK * max(spec.rel_tol * abs(total), spec.abs_tol):
        raise QuadratureFailure(f"{where}: error estimate {err:.3e} for value {total:.6e}")
    return total


def integrate_radial(f: Scalar, weight: Scalar | None = None,
                     domain: tuple[float, float] = (0.0, math.inf),
                     spec: QuadratureSpec | None = None) -> float:
    """Adaptive quadrature of f * weight over a radial domain.

    Finite domains are split into dyadic panels; ``[a, inf)`` adds dyadic
    panels until three in a row are negligible and closes with the
    compactified tail ``r = R/u``, u in (0, 1].
    """
    spec = spec or DEFAULT_SPEC
    g = f if weight is None else (lambda r: f(r) * weight(r))
    a, b = float(domain[0]), float(domain[1])
    if b < a:
        raise InvalidParams("domain must be increasing")
    total = err = 0.0
    if math.isfinite(b):
        for lo, hi in _panels(a, b):
            v, e = _quad(g, lo, hi, spec)
            total += v
            err += e
        return _finish(total, err, spec, f"integral over [{a}, {b}]")
    quiet = 0
    lo = a
    hi = 1.0 if a < 1.0 else 2.0 * a
    for _ in range(MAX_PANEL_EXPONENT):
        v, e = _quad(g, lo, hi, spec)
        total += v
        err += e
        quiet = quiet + 1 if abs(v) <= 1e-3 * spec.rel_tol * abs(total) else 0
        lo, hi = hi, 2.0 * hi
        if quiet >= 3:
            break
    v, e = _tail(g, lo, spec)
    total += v
    err += e
    return _finish(total, err, spec, f"integral over [{a}, inf)")


def truncation_ladder(f: Scalar, radii: Iterable[float], spec: QuadratureSpec | None = None,
                      start: float = 0.0) -> list[float]:
    """Cumulative integrals of f over [start, R_k] for increasing R_k.

    Stops early (and pads with inf) once the running value overflows.
    """
    spec = spec or DEFAULT_SPEC
    radii = list(radii)
    out: list[float] = []
    total, lo = 0.0, start
    for R in radii:
        try:
            for a, b in _panels(lo, R):
                v, _ = _quad(f, a, b, spec)
                total += v
        except (QuadratureFailure, OverflowError):
            total = math.inf
        out.append(total)
        lo = R
        if not math.isfinite(total):
            out.extend([math.inf] * (len(radii) - len(out)))
            break
    return out


def is_divergent(values: list[float], factor: float = 1.5) -> bool:
    """True if the last value is at least ``factor`` times the third-to-last (or overflowed)."""
    if len(values) < 3:
        return False
    first, last = values[-3], values[-1]
    if not math.isfinite(last):
        return True
    return first > 0 and last >= factor * first


# special functions ---------------------------------------------------------

def gamma_fn(z: float) -> float:
    if z <= 0:
        raise DomainError("gamma_fn is restricted to positive arguments")
    return math.gamma(z)


def beta_fn(a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        raise DomainError("beta_fn is restricted to positive arguments")
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sk(t, k: float):
    """sin(sqrt(k) t)/sqrt(k), t, or sinh(sqrt(-k) t)/sqrt(-k)."""
    t = np.asarray(t, float)
    if k > 0:
        q = math.sqrt(k)
        out = np.sin(q * t) / q
    elif k < 0:
        q = math.sqrt(-k)
        out = np.sinh(q * t) / q
    else:
        out = t * 1.0
    return out if np.ndim(out) else float(out)


# polar densities (total over the unit sphere) --------------------------------

def polar_density_berwald(n: int, r):
    r = np.asarray(r, float)
    out = n * unit_ball_volume(n) * r ** (n - 1) / (1.0 + r) ** (n + 1)
    return out if np.ndim(out) else float(out)


def polar_density_funk(n: int, r):
    r = np.asarray(r, float)
    e = np.exp(-r)
    out = n * unit_ball_volume(n) * e * (-np.expm1(-r)) ** (n - 1)
    return out if np.ndim(out) else float(out)


def polar_density_euclidean(n: int, r):
    r = np.asarray(r, float)
    out = n * unit_ball_volume(n) * r ** (n - 1)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class RadialMeasureModel:
    """Density angular_mass * e^{-(n-1)kr} * s_{-k^2}(r)^{n-1} * (1+r)^{-C}."""

    n: int
    k: float
    C: float
    angular_mass: float | None = None

    def __post_init__(self):
        if self.n < 2 or self.k < 0:
            raise InvalidParams("model needs n >= 2 and k >= 0")
        if self.angular_mass is None:
            object.__setattr__(self, "angular_mass", self.n * unit_ball_volume(self.n))
        if self.angular_mass <= 0:
            raise InvalidParams("angular mass must be positive")

    def density(self, r):
        r = np.asarray(r, float)
        n, k = self.n, self.k
        if k > 0:
            # e^{-kr} sinh(kr)/k = (1 - e^{-2kr})/(2k), stable for large r
            core = (-np.expm1(-2 * k * r) / (2 * k)) ** (n - 1)
        else:
            core = r ** (n - 1)
        out = self.angular_mass * core * (1.0 + r) ** (-self.C)
        return out if np.ndim(out) else float(out)

    def distortion(self, r):
        """tau along a ray for which the comparison ratio is constant."""
        r = np.asarray(r, float)
        return (self.n - 1) * self.k * r + self.C * np.log1p(r)

    def s_curvature_along_ray(self, r):
        return (self.n - 1) * self.k + self.C / (1.0 + np.asarray(r, float))

    def mu_interval(self) -> tuple[float, float]:
        if self.k > 0:
            return self.C - 1.0, self.C
        return self.C - self.n, self.C - self.n + 1.0

    def default_mu(self) -> float:
        lo, hi = self.mu_interval()
        return 0.5 * (lo + hi)

    def satisfies_hypotheses(self) -> bool:
        return self.C > 1 if self.k > 0 else self.C >= self.n


def comparison_ratio(density: Callable, tau: Callable, r, n: int, k: float = 0.0):
    """H(r) = density(r) / (e^{-tau(r)} s_{-k^2}(r)^{n-1})."""
    r = np.asarray(r, float)
    return np.asarray(density(r)) / (np.exp(-np.asarray(tau(r))) * np.asarray(sk(r, -k * k)) ** (n - 1))


def model_comparison_ratio(model: RadialMeasureModel, r):
    return comparison_ratio(model.density, model.distortion, r, model.n, model.k)


def berwald_ray_distortion(r, n: int, direction=None):
    """tau = ln sqrt(det g(x, grad r)) at distance r along ``direction`` (Lebesgue measure)."""
    from .berwald import _fundamental_tensor, grad_r, radius_of
    u = np.zeros(n) if direction is None else np.asarray(direction, float)
    if direction is None:
        u[0] = 1.0
    u = u / np.linalg.norm(u)
    out = []
    for rr in np.atleast_1d(np.asarray(r, float)):
        x = radius_of(rr) * u
        out.append(0.5 * math.log(np.linalg.det(_fundamental_tensor(x, grad_r(x)))))
    out = np.array(out)
    return out if np.ndim(r) else float(out[0])
