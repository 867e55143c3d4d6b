"""Berwald's metric on the open unit ball, with Lebesgue measure.

B(x, y) = (A + <x,y>)^2 / ((1-|x|^2)^2 A),   A = sqrt((1-|x|^2)|y|^2 + <x,y>^2).

The co-metric is obtained as a root of a quartic in B*.  We work with the
dimensionless unknown ``w = alpha*/B*`` in which the quartic is monic:

    w^4 - 12 bh w^3 - d2 w^2 - d3 w - d4 = 0,   bh = beta*/alpha*,

and a positive root is admissible iff the elimination system

    t^4 - 2 t^3 - 2 bh w t + w^2 = 0
    t^3 - 3 t^2 + 2 (1 - b^2) t + bh w = 0

has a common real solution t = 1 + beta/alpha in [1 - b, 1 + b], b = |x|.

Selection: every positive root seeds a Newton solve of the (w, t) system;
the limits with t in range are the admissible solutions.  One distinct
solution is returned as is.  Otherwise (clusters near the boundary with xi
almost radial) the maximization oracle decides, and the result is flagged.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AtOrigin, NoAdmissibleRoot, OutsideBall, ZeroVector
from .finsler import FinslerSpace, cometric_oracle
from .numerics import maximize_on_sphere

BOUNDARY_GUARD = 1e-12
NEAR_REAL = 1e-4
SYSTEM_TOL = 1e-12


def _check_x(x):
    x = np.asarray(x, float)
    if np.any(np.sum(x * x, axis=-1) >= (1.0 - BOUNDARY_GUARD) ** 2):
        raise OutsideBall("Berwald space lives in the open unit ball")
    return x


def _parts(x, y):
    a = 1.0 - np.sum(x * x, axis=-1)
    xy = np.sum(x * y, axis=-1)
    root = np.sqrt(np.maximum(a * np.sum(y * y, axis=-1) + xy * xy, 0.0))
    return a, xy, root


def _metric(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    a, xy, root = _parts(x, y)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = np.where(root > 0, (root + xy) ** 2 / np.where(root > 0, a * a * root, 1.0), 0.0)
    return val if np.ndim(val) else float(val)


def b_eval(x, y):
    return _metric(_check_x(x), y)


def alpha_beta(x, y) -> tuple[float, float]:
    """The Riemannian part alpha and 1-form beta with B = alpha (1 + beta/alpha)^2."""
    x, y = _check_x(x), np.asarray(y, float)
    a, xy, root = _parts(x, y)
    return root / a ** 2, xy / a ** 2


def projective_factor(x, y):
    """P with G^i = P y^i."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    a, xy, root = _parts(x, y)
    return (root + xy) / a


def _spray(x, y):
    return projective_factor(x, y)[..., None] * np.asarray(y, float)


def dist_from_origin(x) -> float:
    b = float(np.linalg.norm(_check_x(x)))
    return b / (1.0 - b)


def dist_to_origin(x) -> float:
    b = float(np.linalg.norm(_check_x(x)))
    return b / (1.0 + b)


def radius_of(r):
    """Euclidean radius |x| at Berwald distance r from the origin."""
    return np.asarray(r, float) / (1.0 + np.asarray(r, float))


def grad_r(x) -> np.ndarray:
    x = _check_x(x)
    b = np.linalg.norm(x)
    if b == 0.0:
        raise AtOrigin("distance function is not differentiable at the origin")
    return (1.0 - b) ** 2 / b * x


def dr(x) -> np.ndarray:
    """Differential of r = d(0, .) as a covector."""
    x = _check_x(x)
    b = np.linalg.norm(x)
    if b == 0.0:
        raise AtOrigin("distance function is not differentiable at the origin")
    return x / ((1.0 - b) ** 2 * b)


def laplacian_r(x, n: int | None = None) -> float:
    """Delta r = (n-1)/|x| + (n+1)|x| - 2n."""
    x = _check_x(x)
    n = x.size if n is None else n
    b = float(np.linalg.norm(x))
    if b == 0.0:
        raise AtOrigin("Laplacian of r is singular at the origin")
    return (n - 1) / b + (n + 1) * b - 2 * n


def laplacian_r_of_r(r, n: int):
    """Same quantity expressed through r: (n-1)/r - (n+1)/(1+r)."""
    r = np.asarray(r, float)
    return (n - 1) / r - (n + 1) / (1.0 + r)


def s_curvature_radial(r, n: int):
    """S(x, grad r) = (n+1)/(1+r)."""
    return (n + 1) / (1.0 + np.asarray(r, float))


def reversibility(x) -> float:
    b = float(np.linalg.norm(_check_x(x)))
    return ((1.0 + b) / (1.0 - b)) ** 2


def cometric_neg_radial(r):
    """B*(x, -dr) = (1 + 2r)^2."""
    return (1.0 + 2.0 * np.asarray(r, float)) ** 2


def dual_alpha_beta(x, xi):
    """alpha*^2 = a^{ij} xi_i xi_j and beta* = b^i xi_i (batched)."""
    x, xi = np.asarray(x, float), np.asarray(xi, float)
    a = 1.0 - np.sum(x * x, axis=-1)
    xx = np.sum(x * xi, axis=-1)
    alpha2 = a ** 3 * (np.sum(xi * xi, axis=-1) - xx * xx)
    beta = a ** 2 * xx
    return alpha2, beta


def quartic_coefficients(x, xi) -> np.ndarray:
    """Raw coefficients [c4, c3, c2, c1, c0] of the quartic in B*."""
    x = np.asarray(x, float)
    b2 = float(x @ x)
    a = 1.0 - b2
    al2, be = dual_alpha_beta(x, xi)
    return np.array([
        16 * b2 * a ** 2 * (a * al2 + be ** 2),
        8 * ((10 * b2 - 1) * a * al2 * be + (9 * b2 - 1) * be ** 3),
        (1 - 20 * b2 - 8 * b2 ** 2) * al2 ** 2 + 6 * (6 * b2 - 5) * al2 * be ** 2 - 27 * be ** 4,
        12 * al2 ** 2 * be,
        -al2 ** 3,
    ])


def quartic_residual(x, xi, value: float) -> float:
    """|p(B*)| / sum |c_k B*^k| for the raw quartic."""
    c = quartic_coefficients(x, xi)
    terms = c * value ** np.arange(4, -1, -1)
    scale = np.abs(terms).sum()
    return float(abs(terms.sum()) / scale) if scale > 0 else 0.0


def _normalized_w_coeffs(b2, bh):
    """Monic quartic in w = alpha*/B*, batched over b2 and bh."""
    a = 1.0 - b2
    d4 = 16 * b2 * a ** 2 * (a + bh ** 2)
    d3 = 8 * ((10 * b2 - 1) * a * bh + (9 * b2 - 1) * bh ** 3)
    d2 = (1 - 20 * b2 - 8 * b2 ** 2) + 6 * (6 * b2 - 5) * bh ** 2 - 27 * bh ** 4
    d1 = 12 * bh
    one = np.ones_like(np.asarray(b2, float))
    return np.stack([one, -d1, -d2, -d3, -d4], axis=-1)


def _companion_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of monic polynomials given as rows [1, c1, ..., ck]."""
    m, k = coeffs.shape[0], coeffs.shape[1] - 1
    comp = np.zeros((m, k, k))
    comp[:, 0, :] = -coeffs[:, 1:]
    comp[:, np.arange(1, k), np.arange(k - 1)] = 1.0
    return np.linalg.eigvals(comp)


def _polish(coeffs: np.ndarray, roots: np.ndarray, sweeps: int = 3) -> np.ndarray:
    k = coeffs.shape[1] - 1
    z = roots.copy()
    for _ in range(sweeps):
        p = np.zeros_like(z)
        dp = np.zeros_like(z)
        for j in range(k + 1):
            dp = dp * z + p
            p = p * z + coeffs[:, j:j + 1]
        ok = np.abs(dp) > 1e-300
        z = np.where(ok, z - p / np.where(ok, dp, 1.0), z)
    return z


class QuarticSolution(NamedTuple):
    value: float
    candidates: np.ndarray        # positive real roots B*
    admissible: np.ndarray        # boolean mask over candidates
    residual: float
    used_oracle: bool


def _candidate_roots(b2: np.ndarray, bh: np.ndarray) -> np.ndarray:
    """Positive (near-)real roots w; clustered roots may surface as tight complex pairs."""
    coeffs = _normalized_w_coeffs(b2, bh)
    w = _companion_roots(coeffs)
    near_real = np.abs(w.imag) <= NEAR_REAL * (1.0 + np.abs(w.real))
    w = _polish(coeffs, np.where(near_real, w.real, w).astype(complex)).real
    return np.where(near_real & (w > 0), w, np.nan)


def _system_refine(b2: np.ndarray, bh: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Newton on the (w, t) system seeded by quartic candidates.

    The elimination quartic is badly conditioned when the true root merges
    with spurious ones (xi almost radial near the boundary), but the genuine
    solution is a simple zero of the 2x2 system.  Returns refined w where the
    iteration lands on a solution with t in [1-b, 1+b], nan elsewhere.
    """
    shape = w.shape
    b2 = np.broadcast_to(b2[:, None], shape).ravel()
    bh = np.broadcast_to(bh[:, None], shape).ravel()
    w = w.ravel().copy()
    b = np.sqrt(b2)
    live = np.isfinite(w)
    w0 = np.where(live, w, 1.0)
    cubic = np.stack([np.ones_like(w0), -3.0 * np.ones_like(w0), 2 * (1 - b2), bh * w0], axis=-1)
    ts = _companion_roots(cubic)
    near = (np.abs(ts.imag) <= 1e-3 * (1 + np.abs(ts.real))) & (np.abs(ts.real - 1) <= b[:, None] + 0.05)
    tr = ts.real
    r1 = np.abs(tr ** 4 - 2 * tr ** 3 - 2 * bh[:, None] * w0[:, None] * tr + w0[:, None] ** 2)
    pick = np.argmin(np.where(near, r1, np.inf), axis=1)
    live &= near.any(axis=1)
    t = tr[np.arange(len(w0)), pick]
    w = w0
    for _ in range(40):
        f1 = t ** 4 - 2 * t ** 3 - 2 * bh * w * t + w * w
        f2 = t ** 3 - 3 * t ** 2 + 2 * (1 - b2) * t + bh * w
        a11, a12 = 2 * w - 2 * bh * t, 4 * t ** 3 - 6 * t ** 2 - 2 * bh * w
        a21, a22 = bh, 3 * t ** 2 - 6 * t + 2 * (1 - b2)
        det = a11 * a22 - a12 * a21
        with np.errstate(divide="ignore", invalid="ignore"):
            dw = (a22 * f1 - a12 * f2) / det
            dt = (a11 * f2 - a21 * f1) / det
        step = np.isfinite(dw) & np.isfinite(dt)
        w = np.where(step, w - dw, w)
        t = np.where(step, t - dt, t)
    f1 = t ** 4 - 2 * t ** 3 - 2 * bh * w * t + w * w
    f2 = t ** 3 - 3 * t ** 2 + 2 * (1 - b2) * t + bh * w
    s1 = t ** 4 + 2 * np.abs(t) ** 3 + 2 * np.abs(bh * w * t) + w * w
    s2 = np.abs(t) ** 3 + 3 * t ** 2 + 2 * np.abs(t) + np.abs(bh * w)
    ok = (live & (w > 0) & (np.abs(f1) <= SYSTEM_TOL * s1) & (np.abs(f2) <= SYSTEM_TOL * s2)
          & (t >= 1 - b - 1e-9) & (t <= 1 + b + 1e-9))
    return np.where(ok, w, np.nan).reshape(shape)


def _distinct(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per row: number of distinct finite entries (relative 1e-7) and their mean."""
    ws = np.sort(np.where(np.isfinite(w), w, np.inf), axis=1)
    fin = np.isfinite(ws)
    new = fin.copy()
    with np.errstate(invalid="ignore"):
        same = np.abs(ws[:, 1:] - ws[:, :-1]) <= 1e-7 * np.abs(ws[:, 1:])
    new[:, 1:] &= ~same
    count = new.sum(axis=1)
    with np.errstate(invalid="ignore"):
        first = np.where(fin[:, 0], ws[:, 0], np.nan)
    return count, first


def solve_cometric_quartic(x, xi) -> QuarticSolution:
    """Root selection for B*(x, xi); see the module docstring."""
    x = _check_x(x)
    xi = np.asarray(xi, float)
    if not np.any(xi):
        raise ZeroVector("covector must be nonzero")
    al2, be = dual_alpha_beta(x, xi)
    al = np.sqrt(al2)
    b2 = np.array([x @ x])
    bh = np.array([be / al])
    raw = _candidate_roots(b2, bh)
    refined = _system_refine(b2, bh, raw)
    count, first = _distinct(refined)
    keep = np.isfinite(raw[0])
    values = al / raw[0][keep]
    adm = np.isfinite(refined[0][keep])
    used_oracle = False
    if count[0] == 1:
        value = float(al / first[0])
    else:
        used_oracle = True
        ref = cometric_oracle(berwald_space(x.size), x, xi)
        pool = al / refined[0][np.isfinite(refined[0])] if count[0] else values
        if pool.size == 0:
            raise NoAdmissibleRoot(f"no positive real root at x={x}, xi={xi}")
        nearest = float(pool[np.argmin(np.abs(pool - ref))])
        if abs(nearest - ref) > 1e-4 * ref:
            raise NoAdmissibleRoot(f"no root matches the oracle at x={x}, xi={xi}")
        # clustered roots are only good to ~sqrt(eps); the oracle is sharper here
        value = float(ref)
    return QuarticSolution(value, values, adm, quartic_residual(x, xi, value), used_oracle)


def cometric_quartic(x, xi) -> float:
    x = _check_x(x)
    if not np.any(x):
        return float(np.linalg.norm(xi)) if np.any(xi) else _raise_zero()
    return solve_cometric_quartic(x, xi).value


def _raise_zero():
    raise ZeroVector("covector must be nonzero")


def cometric_quartic_batch(X: np.ndarray, Xi: np.ndarray) -> np.ndarray:
    """Vectorized B*(x, xi) for many points; ambiguous rows fall back to the scalar path."""
    X, Xi = np.asarray(X, float), np.asarray(Xi, float)
    _check_x(X)
    al2, be = dual_alpha_beta(X, Xi)
    al = np.sqrt(al2)
    b2 = np.sum(X * X, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        bh = np.where(al > 0, be / np.where(al > 0, al, 1.0), 0.0)
    w = _system_refine(b2, bh, _candidate_roots(b2, bh))
    count, first = _distinct(w)
    out = np.full(len(X), np.nan)
    single = count == 1
    out[single] = al[single] / first[single]
    for i in np.flatnonzero(~single):
        out[i] = cometric_quartic(X[i], Xi[i]) if np.any(Xi[i]) else 0.0
    return out


def t_relation_residuals(x, y) -> tuple[float, float]:
    """Scaled residuals of the two t-relations at p = Legendre(x, y)."""
    x, y = _check_x(x), np.asarray(y, float)
    space = berwald_space(x.size)
    from .finsler import legendre
    p = legendre(space, x, y).components
    al2, be = dual_alpha_beta(x, p)
    al, bet = alpha_beta(x, y)
    big = b_eval(x, y)
    t = 1.0 + bet / al
    b2 = x @ x
    terms1 = np.array([big ** 2 * t ** 4, -2 * big ** 2 * t ** 3, -2 * big * be * t, al2])
    terms2 = np.array([big * t ** 3, -3 * big * t ** 2, 2 * (1 - b2) * big * t, be])
    return (float(abs(terms1.sum()) / np.abs(terms1).sum()),
            float(abs(terms2.sum()) / np.abs(terms2).sum()))


def _fundamental_tensor(x, y):
    """g_ij from the (alpha, beta) structure: closed-form Hessian of B^2/2."""
    a = 1.0 - x @ x
    aij = (a * np.eye(x.size) + np.outer(x, x)) / a ** 4
    bi = x / a ** 2
    al = np.sqrt(y @ aij @ y)
    be = bi @ y
    yl = aij @ y
    big = (al + be) ** 2 / al
    # B = (alpha+beta)^2/alpha; gradient and Hessian in y
    ga = yl / al
    ha = (aij - np.outer(ga, ga)) / al
    u = al + be
    db = 2 * u / al * (ga + bi) - u * u / al ** 2 * ga
    gu = ga + bi
    hb = (2 / al * np.outer(gu, gu) - 2 * u / al ** 2 * (np.outer(gu, ga) + np.outer(ga, gu))
          + 2 * u * u / al ** 3 * np.outer(ga, ga) + (2 * u / al - u * u / al ** 2) * ha)
    return np.outer(db, db) + big * hb


def _contains(x) -> bool:
    x = np.asarray(x, float)
    return bool(x @ x < (1.0 - BOUNDARY_GUARD) ** 2)


def berwald_space(n: int) -> FinslerSpace:
    return FinslerSpace(
        dim=n,
        metric=_metric,
        contains=_contains,
        fundamental_tensor_fn=_fundamental_tensor,
        geodesic_coeffs_fn=_spray,
        cometric_fn=cometric_quartic,
        density=lambda x: np.ones(np.shape(x)[:-1]),
        name="berwald",
    )


@dataclass(frozen=True)
class BerwaldSpace:
    """Berwald's metric space of dimension ``dim`` (>= 2)."""

    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("Berwald space needs dim >= 2")

    @property
    def finsler(self) -> FinslerSpace:
        return berwald_space(self.dim)

    def metric(self, x, y):
        return b_eval(x, y)

    def cometric(self, x, xi):
        return cometric_quartic(x, xi)

    def laplacian_r(self, x):
        return laplacian_r(x, self.dim)


def oracle_reversibility(x) -> float:
    """Measured sup of B(x,-y)/B(x,y) over directions (for cross-checks)."""
    x = _check_x(x)
    val, _ = maximize_on_sphere(lambda u: _metric(x, -u) / _metric(x, u), x.size)
    return val
