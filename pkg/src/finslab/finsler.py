"""Generic Finsler machinery with finite-difference fallbacks.

A :class:`FinslerSpace` bundles a metric ``F(x, y)`` that broadcasts over
leading axes with optional closed-form hooks.  Every quantity below is
computable from the metric alone; hooks only make it faster or exact.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import (DegenerateFlag, LeftDomain, MissingDensity, NoConvergence,
                     OutsideDomain, ZeroVector)
from .minkowski import MinkowskiNorm, dual_eval, norm_eval, norm_grad, norm_hessian_energy
from .numerics import hessian, jacobian, maximize_on_sphere

Array = np.ndarray

# relative step sizes; see the decisions ledger for the choice
H_FIRST = 1e-5
H_SECOND = 1e-3


@dataclass(frozen=True, eq=False)
class FinslerSpace:
    dim: int
    metric: Callable[[Array, Array], Array]
    contains: Callable[[Array], bool]
    fundamental_tensor_fn: Optional[Callable[[Array, Array], Array]] = None
    geodesic_coeffs_fn: Optional[Callable[[Array, Array], Array]] = None
    cometric_fn: Optional[Callable[[Array, Array], float]] = None
    density: Optional[Callable[[Array], Array]] = None
    name: str = "finsler"

    def __call__(self, x, y):
        return self.metric(np.asarray(x, float), np.asarray(y, float))

    def without_hooks(self, *names: str) -> "FinslerSpace":
        """Copy with the named hooks removed (all hooks but the density if none given)."""
        names = names or ("fundamental_tensor_fn", "geodesic_coeffs_fn", "cometric_fn")
        return replace(self, **{k: None for k in names})


@dataclass(frozen=True)
class TangentVec:
    base: Array
    components: Array


@dataclass(frozen=True)
class Covec:
    base: Array
    components: Array


def minkowski_space(norm: MinkowskiNorm) -> FinslerSpace:
    """The flat space (R^n, phi) with Lebesgue density 1."""
    def metric(x, y):
        return norm_eval(norm, y)

    def g(x, y):
        return norm_hessian_energy(norm, y)

    def spray(x, y):
        return np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y)))

    return FinslerSpace(norm.dim, metric, lambda x: True, fundamental_tensor_fn=g,
                        geodesic_coeffs_fn=spray, cometric_fn=lambda x, xi: dual_eval(norm, xi),
                        density=lambda x: np.ones(np.shape(x)[:-1]), name=f"minkowski-{norm.kind}")


def _check(space: FinslerSpace, x, y=None, allow_zero=False):
    x = np.asarray(x, float)
    if not space.contains(x):
        raise OutsideDomain(f"point {x} is outside the domain")
    if y is None:
        return x
    y = np.asarray(y, float)
    if not allow_zero and not np.any(y):
        raise ZeroVector("tangent vector must be nonzero")
    return x, y


def _scale(v) -> float:
    return max(1.0, float(np.linalg.norm(v)))


def _energy(space: FinslerSpace, x: Array):
    return lambda ys: 0.5 * np.asarray(space.metric(x, ys)) ** 2


def fundamental_tensor(space: FinslerSpace, x, y) -> Array:
    x, y = _check(space, x, y)
    if space.fundamental_tensor_fn is not None:
        return np.asarray(space.fundamental_tensor_fn(x, y), float)
    g = hessian(_energy(space, x), y, H_SECOND * np.linalg.norm(y))
    return 0.5 * (g + g.T)


def legendre(space: FinslerSpace, x, y) -> Covec:
    x, y = _check(space, x, y, allow_zero=True)
    if not np.any(y):
        return Covec(x, np.zeros(space.dim))
    if space.fundamental_tensor_fn is not None:
        return Covec(x, fundamental_tensor(space, x, y) @ y)
    return Covec(x, jacobian(_energy(space, x), y, H_FIRST * np.linalg.norm(y)))


def cometric_oracle(space: FinslerSpace, x, xi, tol: float = 1e-12) -> float:
    x = _check(space, x)
    xi = np.asarray(xi, float)
    if not np.any(xi):
        raise ZeroVector("covector must be nonzero")
    val, _ = maximize_on_sphere(lambda u: (u @ xi) / space.metric(x, u), space.dim, tol)
    return val


def cometric(space: FinslerSpace, x, xi) -> float:
    if space.cometric_fn is not None:
        _check(space, x)
        return float(space.cometric_fn(np.asarray(x, float), np.asarray(xi, float)))
    return cometric_oracle(space, x, xi)


def legendre_inverse(space: FinslerSpace, x, xi, max_iter: int = 100) -> TangentVec:
    """Damped Newton on y -> L(y) = xi, seeded by the oracle's maximizing direction."""
    x = _check(space, x)
    xi = np.asarray(xi, float)
    if not np.any(xi):
        raise ZeroVector("covector must be nonzero")
    val, u = maximize_on_sphere(lambda v: (v @ xi) / space.metric(x, v), space.dim)
    y = val * u / space.metric(x, u)
    target = np.linalg.norm(xi)

    def resid(v):
        return legendre(space, x, v).components - xi

    r = resid(y)
    for _ in range(max_iter):
        err = np.linalg.norm(r)
        if err <= 1e-11 * target:
            return TangentVec(x, y)
        step = np.linalg.solve(fundamental_tensor(space, x, y), r)
        lam = 1.0
        while lam > 1e-6:
            cand = y - lam * step
            if np.any(cand):
                rc = resid(cand)
                if np.linalg.norm(rc) < err:
                    y, r = cand, rc
                    break
            lam /= 2
        else:
            break
    if np.linalg.norm(r) <= 1e-9 * target:
        return TangentVec(x, y)
    raise NoConvergence("Legendre inverse did not converge")


def _spray_fd(space: FinslerSpace, x: Array, y: Array) -> Array:
    """G^i = (1/4) g^{il} ( [F^2]_{x^k y^l} y^k - [F^2]_{x^l} )."""
    n = space.dim

    def f2(z):
        return np.asarray(space.metric(z[:, :n], z[:, n:])) ** 2

    z = np.concatenate([x, y])
    hx = H_SECOND * min(1.0, _dist_hint(space, x))
    steps = np.concatenate([np.full(n, hx), np.full(n, H_SECOND * np.linalg.norm(y))])
    hes = hessian(f2, z, steps)
    grad = jacobian(f2, z, np.concatenate([np.full(n, H_FIRST * min(1.0, _dist_hint(space, x))),
                                           np.full(n, H_FIRST * np.linalg.norm(y))]))
    mixed = hes[n:, :n] @ y          # [F^2]_{y^l x^k} y^k
    rhs = mixed - grad[:n]
    g = fundamental_tensor(space, x, y)
    return 0.25 * np.linalg.solve(g, rhs)


def _dist_hint(space: FinslerSpace, x: Array) -> float:
    """Rough distance to the domain boundary for step-size control."""
    for scale in (1.0, 0.1, 0.01, 1e-3):
        probe = x + scale * np.eye(space.dim)
        if all(space.contains(p) for p in np.concatenate([probe, x - scale * np.eye(space.dim)])):
            return scale
    return 1e-3


def geodesic_coeffs(space: FinslerSpace, x, y) -> Array:
    x, y = _check(space, x, y)
    if space.geodesic_coeffs_fn is not None:
        return np.asarray(space.geodesic_coeffs_fn(x, y), float)
    return _spray_fd(space, x, y)


def _spray_batch(space: FinslerSpace):
    n = space.dim
    if space.geodesic_coeffs_fn is not None:
        return lambda z: space.geodesic_coeffs_fn(z[:, :n], z[:, n:])
    return lambda z: np.array([_spray_fd(space, p[:n], p[n:]) for p in z])


def geodesic_integrate(space: FinslerSpace, x0, y0, T: float, steps: int = 1000):
    """Classical RK4 for x'' + 2 G(x, x') = 0; returns a list of (point, tangent)."""
    x = _check(space, x0)
    v = np.asarray(y0, float)
    n = space.dim
    spray = _spray_batch(space)
    dt = T / steps

    def rhs(state):
        p, q = state[:n], state[n:]
        if not space.contains(p):
            raise LeftDomain(f"trajectory left the domain at {p}")
        acc = -2.0 * np.asarray(spray(state[None, :]))[0] if np.any(q) else np.zeros(n)
        return np.concatenate([q, acc])

    state = np.concatenate([x, v])
    out = [(state[:n].copy(), state[n:].copy())]
    for _ in range(steps):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * dt * k1)
        k3 = rhs(state + 0.5 * dt * k2)
        k4 = rhs(state + dt * k3)
        state = state + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not space.contains(state[:n]):
            raise LeftDomain(f"trajectory left the domain at {state[:n]}")
        out.append((state[:n].copy(), state[n:].copy()))
    return out


def riemann_transform(space: FinslerSpace, x, y) -> Array:
    """R^i_k = 2 G^i_{x^k} - y^j G^i_{x^j y^k} + 2 G^j G^i_{y^j y^k} - G^i_{y^j} G^j_{y^k}."""
    x, y = _check(space, x, y)
    n = space.dim
    spray = _spray_batch(space)
    z = np.concatenate([x, y])
    hx = min(1.0, _dist_hint(space, x))
    hy = np.linalg.norm(y)
    jac = jacobian(spray, z, np.concatenate([np.full(n, H_FIRST * hx), np.full(n, H_FIRST * hy)]))
    hes = hessian(spray, z, np.concatenate([np.full(n, H_SECOND * hx), np.full(n, H_SECOND * hy)]))
    g_val = np.asarray(spray(z[None, :]))[0]
    g_x = jac[:, :n]
    g_y = jac[:, n:]
    g_xy = hes[:, :n, n:]            # [i, j, k] = d^2 G^i / dx^j dy^k
    g_yy = hes[:, n:, n:]
    return (2.0 * g_x
            - np.einsum("j,ijk->ik", y, g_xy)
            + 2.0 * np.einsum("j,ijk->ik", g_val, g_yy)
            - g_y @ g_y)


def flag_curvature(space: FinslerSpace, x, y, v) -> float:
    x, y = _check(space, x, y)
    v = np.asarray(v, float)
    g = fundamental_tensor(space, x, y)
    den = (y @ g @ y) * (v @ g @ v) - (y @ g @ v) ** 2
    if den < 1e-12 * (y @ g @ y) * (v @ g @ v) or den < 1e-300:
        raise DegenerateFlag("flagpole and transverse edge are (nearly) parallel")
    # K depends only on the plane; dropping the y-component of v keeps the
    # finite-difference error in R y from being amplified by thin flags
    w = v - (y @ g @ v) / (y @ g @ y) * y
    rk = riemann_transform(space, x, y)
    return float(w @ g @ (rk @ w) / ((y @ g @ y) * (w @ g @ w)))


def g_orthonormal_completion(g: Array, y: Array) -> Array:
    """Gram-Schmidt in g starting from y, then the canonical basis."""
    basis = []
    for c in [y] + list(np.eye(len(y))):
        w = np.array(c, float)
        for e in basis:
            w = w - (e @ g @ w) * e
        nrm2 = w @ g @ w
        if nrm2 > 1e-20 * (c @ g @ c):
            basis.append(w / np.sqrt(nrm2))
        if len(basis) == len(y):
            break
    return np.array(basis)


def ricci(space: FinslerSpace, x, y) -> float:
    """Sum of g_y(R_y e_i, e_i) over a g_y-orthonormal completion of y/F.

    This is the 2-homogeneous Ricci scalar F^2 * sum K(y, e_i), which equals
    the trace of R_y.
    """
    x, y = _check(space, x, y)
    g = fundamental_tensor(space, x, y)
    e = g_orthonormal_completion(g, y)
    rk = riemann_transform(space, x, y)
    return float(sum(w @ g @ (rk @ w) for w in e[1:]))


def s_curvature(space: FinslerSpace, x, y) -> float:
    """S = dG^i/dy^i - y^i d_i ln sigma."""
    if space.density is None:
        raise MissingDensity("S-curvature needs a measure density")
    x, y = _check(space, x, y)
    hy = np.linalg.norm(y)
    div = np.trace(jacobian(lambda ys: space.geodesic_coeffs_fn(x, ys) if space.geodesic_coeffs_fn
                            else np.array([_spray_fd(space, x, w) for w in ys]),
                            y, H_FIRST * hy))
    hx = H_FIRST * min(1.0, _dist_hint(space, x))
    dlog = jacobian(lambda xs: np.log(np.asarray(space.density(xs), float)), x, hx)
    return float(div - y @ dlog)


def reversibility_at(space: FinslerSpace, x) -> float:
    x = _check(space, x)
    val, _ = maximize_on_sphere(lambda u: space.metric(x, -u) / space.metric(x, u), space.dim)
    return val


__all__ = [
    "FinslerSpace", "TangentVec", "Covec", "minkowski_space", "fundamental_tensor",
    "legendre", "legendre_inverse", "cometric", "cometric_oracle", "geodesic_coeffs",
    "geodesic_integrate", "riemann_transform", "flag_curvature", "ricci", "s_curvature",
    "reversibility_at", "g_orthonormal_completion", "norm_grad",
]
