"""Sphere grids, a sup-oracle over unit directions, and finite-difference kernels.

Every function here takes batched callables: ``fn(points)`` receives an
``(m, d)`` array and returns ``(m,)`` or ``(m, k)``.  Batching keeps the
stencils to one Python call per derivative.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import minimize

Batched = Callable[[np.ndarray], np.ndarray]


@lru_cache(maxsize=None)
def sphere_directions(dim: int) -> np.ndarray:
    """Deterministic unit directions: 1024 angles in 2-D, a 4096-point Fibonacci sphere in 3-D."""
    if dim == 1:
        u = np.array([[1.0], [-1.0]])
    elif dim == 2:
        th = 2.0 * np.pi * np.arange(1024) / 1024
        u = np.column_stack([np.cos(th), np.sin(th)])
    elif dim == 3:
        m = 4096
        k = np.arange(m) + 0.5
        z = 1.0 - 2.0 * k / m
        rho = np.sqrt(1.0 - z * z)
        ang = np.pi * (1.0 + np.sqrt(5.0)) * k
        u = np.column_stack([rho * np.cos(ang), rho * np.sin(ang), z])
    else:
        rng = np.random.default_rng(0)
        u = rng.standard_normal((8192, dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
    u.setflags(write=False)
    return u


def _grid_spacing(dim: int) -> float:
    if dim == 2:
        return 2.0 * np.pi / 1024
    if dim == 3:
        return float(np.sqrt(4.0 * np.pi / 4096))
    return 0.2


def maximize_on_sphere(ratio: Batched, dim: int, tol: float = 1e-12,
                       directions: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """Maximize a 0-homogeneous ``ratio`` over nonzero vectors.

    A coarse sweep over ``directions`` picks a seed; Nelder-Mead then refines in
    the tangent plane at the seed (0-homogeneity makes that chart global near
    the maximizer).  The returned value was actually attained, so it is a lower
    bound for the true supremum.
    """
    u = sphere_directions(dim) if directions is None else np.asarray(directions, float)
    vals = np.asarray(ratio(u), float)
    i = int(np.argmax(vals))
    best, u0 = float(vals[i]), u[i].copy()
    if dim == 1:
        return best, u0
    q, _ = np.linalg.qr(np.column_stack([u0, np.eye(dim)]))
    tangent = q[:, 1:dim]
    scale = abs(best) if best != 0.0 else 1.0

    def neg(z):
        return -float(ratio((u0 + tangent @ z)[None, :])[0]) / scale

    step = _grid_spacing(dim)
    simplex = np.vstack([np.zeros(dim - 1), step * np.eye(dim - 1)])
    res = minimize(neg, np.zeros(dim - 1), method="Nelder-Mead",
                   options={"xatol": 1e-11, "fatol": tol, "initial_simplex": simplex,
                            "maxiter": 4000, "maxfev": 8000})
    val = -float(res.fun) * scale
    if val > best:
        y = u0 + tangent @ res.x
        best, u0 = val, y / np.linalg.norm(y)
    return best, u0


def _as_steps(z: np.ndarray, h) -> np.ndarray:
    return np.broadcast_to(np.asarray(h, float), z.shape).copy()


def jacobian(fn: Batched, z, h) -> np.ndarray:
    """Central differences with one Richardson level; returns ``(k, d)`` or ``(d,)``."""
    z = np.asarray(z, float)
    d = z.size
    step = _as_steps(z, h)
    e = np.diag(step)
    pts = np.concatenate([z + e, z - e, z + e / 2, z - e / 2])
    f = np.asarray(fn(pts), float)
    scalar = f.ndim == 1
    f = f.reshape(4, d, -1)
    coarse = (f[0] - f[1]) / (2.0 * step[:, None])
    fine = (f[2] - f[3]) / step[:, None]
    jac = ((4.0 * fine - coarse) / 3.0).T
    return jac[0] if scalar else jac


def _hessian_points(z: np.ndarray, step: np.ndarray) -> tuple[np.ndarray, list]:
    d = z.size
    pts = [z]
    plan = []
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = step[i]
        plan.append(("d", i, len(pts)))
        pts.extend([z + ei, z - ei])
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = step[j]
            plan.append(("o", (i, j), len(pts)))
            pts.extend([z + ei + ej, z + ei - ej, z - ei + ej, z - ei - ej])
    return np.array(pts), plan


def _hessian_level(f: np.ndarray, plan: list, step: np.ndarray, d: int) -> np.ndarray:
    k = f.shape[1]
    hes = np.empty((k, d, d))
    for kind, idx, at in plan:
        if kind == "d":
            i = idx
            hes[:, i, i] = (f[at] - 2.0 * f[0] + f[at + 1]) / step[i] ** 2
        else:
            i, j = idx
            v = (f[at] - f[at + 1] - f[at + 2] + f[at + 3]) / (4.0 * step[i] * step[j])
            hes[:, i, j] = v
            hes[:, j, i] = v
    return hes


def hessian(fn: Batched, z, h) -> np.ndarray:
    """Second differences with one Richardson level; returns ``(k, d, d)`` or ``(d, d)``."""
    z = np.asarray(z, float)
    d = z.size
    step = _as_steps(z, h)
    p1, plan = _hessian_points(z, step)
    p2, _ = _hessian_points(z, step / 2)
    f = np.asarray(fn(np.concatenate([p1, p2])), float)
    scalar = f.ndim == 1
    f = f.reshape(2, len(p1), -1)
    coarse = _hessian_level(f[0], plan, step, d)
    fine = _hessian_level(f[1], plan, step / 2, d)
    hes = (4.0 * fine - coarse) / 3.0
    return hes[0] if scalar else hes
