"""Funk metrics over the strongly convex body Omega = {phi < 1}."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import OutsideDomain
from .finsler import FinslerSpace
from .minkowski import MinkowskiNorm, dual_eval, norm_eval, norm_grad, reversibility
from .quadrature import integrate_radial, unit_ball_volume

IMPLICIT_RTOL = 4e-16
IMPLICIT_MAXITER = 100


def bh_volume(norm: MinkowskiNorm) -> float:
    """vol(Omega) = (1/n) * integral over the unit sphere of phi^{-n}."""
    n = norm.dim
    if n == 1:
        return float(1.0 / norm_eval(norm, [1.0]) + 1.0 / norm_eval(norm, [-1.0]))
    if n == 2:
        # periodic trapezoid rule converges geometrically for smooth norms
        m = 4096
        th = 2 * np.pi * np.arange(m) / m
        u = np.column_stack([np.cos(th), np.sin(th)])
        return float(np.mean(norm_eval(norm, u) ** -2.0) * 2 * np.pi / 2)
    if n == 3:
        nodes, weights = np.polynomial.legendre.leggauss(256)
        m = 512
        ph = 2 * np.pi * np.arange(m) / m
        z = np.broadcast_to(nodes[:, None], (len(nodes), m))
        rho = np.sqrt(1 - z * z)
        u = np.stack([rho * np.cos(ph), rho * np.sin(ph), z], axis=-1)
        vals = norm_eval(norm, u) ** -3.0
        return float((weights @ vals.mean(axis=1)) * 2 * np.pi / 3)
    raise NotImplementedError("angular quadrature implemented for dim <= 3")


@dataclass(frozen=True, eq=False)
class FunkSpace:
    norm: MinkowskiNorm

    @property
    def dim(self) -> int:
        return self.norm.dim

    @cached_property
    def bh_sigma(self) -> float:
        return unit_ball_volume(self.dim) / bh_volume(self.norm)

    def contains(self, x) -> bool:
        return bool(norm_eval(self.norm, np.asarray(x, float)) < 1.0)

    def _check(self, x):
        x = np.asarray(x, float)
        if np.any(np.asarray(norm_eval(self.norm, x)) >= 1.0):
            raise OutsideDomain("point lies outside the Funk body")
        return x

    def metric(self, x, y):
        """F(x, y) solving F = phi(y + x F); broadcasts over leading axes."""
        x, y = np.asarray(x, float), np.asarray(y, float)
        if self.norm.kind == "euclidean":
            a = 1.0 - np.sum(x * x, axis=-1)
            xy = np.sum(x * y, axis=-1)
            out = (np.sqrt(a * np.sum(y * y, axis=-1) + xy * xy) + xy) / a
            return out if np.ndim(out) else float(out)
        return self.f_fixed_point(x, y)

    def f_fixed_point(self, x, y):
        """Solve F = phi(y + x F) by Newton's method.

        h(F) = phi(y + xF) - F is convex with h -> -inf, hence decreasing, and
        h(phi(y)/(1 + phi(-x))) >= 0.  Newton started there climbs monotonically
        to the root.  (Plain iteration of F -> phi(y + xF) can cycle once
        <dphi, x> < -1.)
        """
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        py = np.asarray(norm_eval(self.norm, y), float)
        f = py / (1.0 + np.asarray(norm_eval(self.norm, -x), float))
        live = py > 0
        if not np.all(live):
            f = np.where(live, f, 0.0)
        safe_y = np.where(live[..., None], y, 1.0)
        for _ in range(IMPLICIT_MAXITER):
            z = safe_y + x * f[..., None]
            h = np.asarray(norm_eval(self.norm, z), float) - f
            dh = np.sum(norm_grad(self.norm, z) * x, axis=-1) - 1.0
            step = np.where(live, h / dh, 0.0)
            f = f - step
            if np.all(np.abs(step) <= IMPLICIT_RTOL * np.maximum(np.abs(f), 1e-300)):
                break
        return f if np.ndim(f) else float(f)

    def f_eval(self, x, y):
        return self.metric(self._check(x), y)

    def implicit_residual(self, x, y) -> float:
        f = self.f_eval(x, y)
        return float(abs(norm_eval(self.norm, np.asarray(y) + np.asarray(x) * f) - f))

    def cometric(self, x, eta) -> float:
        """F*(x, eta) = phi*(eta) - <eta, x>."""
        x = self._check(x)
        eta = np.asarray(eta, float)
        return dual_eval(self.norm, eta) - float(eta @ x)

    def dist_from_origin(self, x) -> float:
        return -math.log1p(-float(norm_eval(self.norm, self._check(x))))

    def dr(self, x) -> np.ndarray:
        """dr = dphi / (1 - phi) as a covector."""
        x = self._check(x)
        return norm_grad(self.norm, x) / (1.0 - norm_eval(self.norm, x))

    def reversibility_interval(self, x) -> tuple[float, float]:
        ph = float(norm_eval(self.norm, self._check(x)))
        lam = reversibility(self.norm)
        return (1 + ph) / (1 - ph), (lam + ph) / (1 - ph)

    def spray(self, x, y):
        return 0.5 * np.asarray(self.metric(x, y))[..., None] * np.asarray(y, float)

    @property
    def finsler(self) -> FinslerSpace:
        sigma = self.bh_sigma
        return FinslerSpace(
            dim=self.dim,
            metric=self.metric,
            contains=self.contains,
            geodesic_coeffs_fn=self.spray,
            cometric_fn=self.cometric,
            density=lambda x: np.full(np.shape(x)[:-1], sigma),
            name=f"funk-{self.norm.kind}",
        )


def radial_integral(fn: Callable[[float], float], n: int, variant: str = "t", spec=None) -> float:
    """Integral of f(phi) against the BH measure, reduced to one dimension."""
    c = n * unit_ball_volume(n)
    if variant == "t":
        return c * integrate_radial(lambda t: fn(t) * t ** (n - 1), domain=(0.0, 1.0), spec=spec)
    if variant == "r":
        def g(r):
            e = math.exp(-r)
            return fn(-math.expm1(-r)) * e * (-math.expm1(-r)) ** (n - 1)
        return c * integrate_radial(g, domain=(0.0, math.inf), spec=spec)
    raise ValueError("variant must be 't' or 'r'")


def exact_lp_norm(n: int, p: float, iota: float) -> float:
    """Integral of |u|^p for u = -(1 - phi)^iota: n! w_n / prod (iota p + k)."""
    return math.factorial(n) * unit_ball_volume(n) / math.prod(iota * p + k for k in range(1, n + 1))


def exact_forward_seminorm(n: int, p: float, iota: float) -> float:
    return iota ** p * exact_lp_norm(n, p, iota)


def backward_lower_bound_integral(n: int, p: float, iota: float, delta: float) -> float:
    """n w_n iota^p * integral over t < 1-delta of t^{p+n-1} (1-t)^{p(iota-1)}."""
    c = n * unit_ball_volume(n) * iota ** p
    e = p * (iota - 1)
    # substitute u = 1 - t to resolve the endpoint singularity
    return c * integrate_radial(lambda u: (1 - u) ** (p + n - 1) * u ** e, domain=(delta, 1.0))
