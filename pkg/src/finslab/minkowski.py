"""Minkowski norms: euclidean, ellipsoidal and Randers families."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InvalidParams, ZeroVector
from .numerics import maximize_on_sphere

KINDS = ("euclidean", "ellipsoid", "randers")


@dataclass(frozen=True, eq=False)
class MinkowskiNorm:
    """A strongly convex, positively 1-homogeneous norm on R^dim.

    Build instances through :meth:`euclidean`, :meth:`ellipsoid`,
    :meth:`randers` or :meth:`from_config`.
    """

    dim: int
    kind: str = "euclidean"
    shape: np.ndarray | None = field(default=None, repr=False)
    drift: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidParams("dimension must be positive")
        if self.kind not in KINDS:
            raise InvalidParams(f"unknown norm kind {self.kind!r}")
        if self.kind == "ellipsoid":
            a = np.asarray(self.shape, float)
            if a.shape != (self.dim, self.dim) or not np.allclose(a, a.T, atol=1e-14):
                raise InvalidParams("ellipsoid shape must be a symmetric dim x dim array")
            if np.linalg.eigvalsh(a).min() <= 0.0:
                raise InvalidParams("ellipsoid shape must be positive definite")
            a = a.copy()
            a.setflags(write=False)
            object.__setattr__(self, "shape", a)
            inv = np.linalg.inv(a)
            inv.setflags(write=False)
            object.__setattr__(self, "_inv_shape", inv)
        if self.kind == "randers":
            b = np.asarray(self.drift, float).reshape(-1)
            if b.shape != (self.dim,):
                raise InvalidParams("randers drift must have length dim")
            if np.linalg.norm(b) >= 1.0:
                raise InvalidParams("randers drift must satisfy |b| < 1")
            b = b.copy()
            b.setflags(write=False)
            object.__setattr__(self, "drift", b)

    # constructors
    @classmethod
    def euclidean(cls, dim: int) -> "MinkowskiNorm":
        return cls(dim, "euclidean")

    @classmethod
    def ellipsoid(cls, shape) -> "MinkowskiNorm":
        a = np.atleast_2d(np.asarray(shape, float))
        return cls(a.shape[0], "ellipsoid", shape=a)

    @classmethod
    def randers(cls, b) -> "MinkowskiNorm":
        b = np.asarray(b, float).reshape(-1)
        return cls(b.size, "randers", drift=b)

    @classmethod
    def from_config(cls, cfg: dict[str, Any], dim: int | None = None) -> "MinkowskiNorm":
        """Parse ``{"kind": ..., "shape": ..., "b": ...}``."""
        kind = cfg.get("kind", "euclidean")
        if kind == "euclidean":
            n = cfg.get("dim", dim)
            if n is None:
                raise InvalidParams("euclidean norm needs a dimension")
            return cls.euclidean(int(n))
        if kind == "ellipsoid":
            if "shape" not in cfg:
                raise InvalidParams("ellipsoid norm needs 'shape'")
            a = np.asarray(cfg["shape"], float)
            if a.ndim == 1:
                a = np.diag(a)
            return cls.ellipsoid(a)
        if kind == "randers":
            if "b" not in cfg:
                raise InvalidParams("randers norm needs 'b'")
            return cls.randers(cfg["b"])
        raise InvalidParams(f"unknown norm kind {kind!r}")

    def to_config(self) -> dict[str, Any]:
        if self.kind == "ellipsoid":
            return {"kind": "ellipsoid", "shape": self.shape.tolist()}
        if self.kind == "randers":
            return {"kind": "randers", "b": self.drift.tolist()}
        return {"kind": "euclidean", "dim": self.dim}

    # evaluation; all methods broadcast over leading axes of y
    def __call__(self, y) -> np.ndarray:
        return norm_eval(self, y)


def norm_eval(norm: MinkowskiNorm, y):
    y = np.asarray(y, float)
    if norm.kind == "euclidean":
        out = np.linalg.norm(y, axis=-1)
    elif norm.kind == "ellipsoid":
        out = np.sqrt(np.maximum(np.einsum("...i,ij,...j->...", y, norm.shape, y), 0.0))
    else:
        out = np.linalg.norm(y, axis=-1) + y @ norm.drift
    return out if np.ndim(out) else float(out)


def norm_grad(norm: MinkowskiNorm, y) -> np.ndarray:
    y = np.asarray(y, float)
    if np.any(np.linalg.norm(y, axis=-1) == 0.0):
        raise ZeroVector("gradient of a norm is undefined at 0")
    if norm.kind == "euclidean":
        return y / np.linalg.norm(y, axis=-1, keepdims=True)
    if norm.kind == "ellipsoid":
        ay = y @ norm.shape
        return ay / np.asarray(norm_eval(norm, y))[..., None]
    return y / np.linalg.norm(y, axis=-1, keepdims=True) + norm.drift


def norm_hessian_energy(norm: MinkowskiNorm, y) -> np.ndarray:
    """Hessian of phi^2/2 at a single y != 0."""
    y = np.asarray(y, float)
    if norm.kind == "euclidean":
        if not np.any(y):
            raise ZeroVector("y must be nonzero")
        return np.eye(norm.dim)
    if norm.kind == "ellipsoid":
        if not np.any(y):
            raise ZeroVector("y must be nonzero")
        return np.array(norm.shape)
    r = np.linalg.norm(y)
    if r == 0.0:
        raise ZeroVector("y must be nonzero")
    g = norm_grad(norm, y)
    u = y / r
    hess_phi = (np.eye(norm.dim) - np.outer(u, u)) / r
    return np.outer(g, g) + norm_eval(norm, y) * hess_phi


def dual_eval(norm: MinkowskiNorm, eta, tol: float = 1e-12) -> float:
    """sup over y != 0 of <eta, y>/phi(y); closed form except for Randers."""
    eta = np.asarray(eta, float)
    if not np.any(eta):
        return 0.0
    if norm.kind == "euclidean":
        return float(np.linalg.norm(eta))
    if norm.kind == "ellipsoid":
        return float(np.sqrt(eta @ norm._inv_shape @ eta))
    val, _ = maximize_on_sphere(lambda u: (u @ eta) / norm_eval(norm, u), norm.dim, tol)
    return val


def dual_maximizer(norm: MinkowskiNorm, eta) -> np.ndarray:
    """Unit direction attaining the supremum in :func:`dual_eval`."""
    eta = np.asarray(eta, float)
    _, u = maximize_on_sphere(lambda v: (v @ eta) / norm_eval(norm, v), norm.dim)
    return u


def reversibility(norm: MinkowskiNorm) -> float:
    if norm.kind in ("euclidean", "ellipsoid"):
        return 1.0
    val, _ = maximize_on_sphere(lambda u: norm_eval(norm, -u) / norm_eval(norm, u), norm.dim)
    return val
