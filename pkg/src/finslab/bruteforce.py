"""Brute-force planar integration of the three quotients.

Independent of the radial reduction: points live on a polar tensor grid over
the disc, u(x) = f(r(x)) is differentiated in cartesian coordinates, and the
co-metric is evaluated pointwise (quartic root selection on Berwald space,
phi*(eta) - <eta, x> on the Funk disc).  Only used as a cross-check.
"""
from __future__ import annotations

import numpy as np

from .berwald import cometric_quartic_batch
from .functionals import FunctionalParams, RadialTestFunction

GRADING = 4   # |x| = tau^GRADING clusters nodes near the origin


def _distance(kind: str, t: np.ndarray) -> np.ndarray:
    if kind == "berwald":
        return t / (1.0 - t)
    if kind == "funk":
        return -np.log1p(-t)
    if kind == "euclidean":
        return t
    raise ValueError(f"unknown space {kind!r}")


def _cometric(kind: str, X: np.ndarray, du: np.ndarray) -> np.ndarray:
    if kind == "berwald":
        return cometric_quartic_batch(X, du)
    if kind == "funk":
        return np.linalg.norm(du, axis=1) - np.sum(du * X, axis=1)
    return np.linalg.norm(du, axis=1)


def grid_integrals(kind: str, tf: RadialTestFunction, params: FunctionalParams,
                   n_r: int = 2000, n_theta: int = 64, radius: float = 1.0) -> dict[str, float]:
    """All integrals entering the three quotients, by midpoint rule on the disc."""
    tau = (np.arange(n_r) + 0.5) / n_r
    t = radius * tau ** GRADING
    dt = radius * GRADING * tau ** (GRADING - 1) / n_r
    th = 2 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    T, TH = np.meshgrid(t, th, indexing="ij")
    W = (np.meshgrid(dt, th, indexing="ij")[0] * T * (2 * np.pi / n_theta)).ravel()
    X = np.column_stack([(T * np.cos(TH)).ravel(), (T * np.sin(TH)).ravel()])

    prof = np.vectorize(tf.profile, otypes=[float])

    def u(points):
        return prof(_distance(kind, np.linalg.norm(points, axis=1) / radius * radius))

    tt = T.ravel()
    h = 1e-6 * np.minimum(tt, radius - tt)[:, None] if kind != "euclidean" else 1e-6 * tt[:, None]
    du = np.empty_like(X)
    for i in range(2):
        e = np.zeros(2)
        e[i] = 1.0
        du[:, i] = (u(X + h * e) - u(X - h * e)) / (2 * h[:, 0])
    fstar = _cometric(kind, X, du)
    uval = np.abs(u(X))
    r = _distance(kind, tt)
    p, s, m = params.p, params.s, params.m
    q = params.p_conj

    def integral(vals):
        return float(np.sum(vals * W))

    return {
        "grad_p": integral(fstar ** p),
        "hardy_den": integral(uval ** p * r ** -p),
        "unc_second": integral(uval ** p * r ** (q * s)),
        "unc_den": integral(uval ** p * r ** (s - 1)),
        "ckn_second": integral(uval ** (q * (m - 1)) * r ** (q * s)),
        "ckn_den": integral(uval ** m * r ** (s - 1)),
    }


def grid_quotients(kind: str, tf: RadialTestFunction, params: FunctionalParams,
                   n_r: int = 2000, n_theta: int = 64, radius: float = 1.0) -> dict[str, float]:
    I = grid_integrals(kind, tf, params, n_r, n_theta, radius)
    p, q = params.p, params.p_conj
    g = I["grad_p"] ** (1 / p)
    return {
        "hardy": I["grad_p"] / I["hardy_den"],
        "uncertainty": g * I["unc_second"] ** (1 / q) / I["unc_den"],
        "ckn": g * I["ckn_second"] ** (1 / q) / I["ckn_den"],
    }
