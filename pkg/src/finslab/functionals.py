"""Hardy, uncertainty and CKN quotients for radial functions on radial model spaces.

For a radial f = f(r), F*(df) reduces to f'(r) F*(dr) when f' >= 0 and to
|f'(r)| F*(-dr) otherwise, so every integral is one-dimensional against the
polar density of the space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

from . import quadrature as qd
from .berwald import laplacian_r_of_r
from .errors import InvalidParams, QuadratureFailure
from .quadrature import QuadratureSpec, RadialMeasureModel, integrate_radial

Profile = Callable[[float], float]


# test functions ---------------------------------------------------------------

@dataclass(frozen=True)
class RadialTestFunction:
    profile: Profile
    derivative: Profile
    tag: str
    params: dict = field(default_factory=dict)
    support: float = math.inf

    def __call__(self, r: float) -> float:
        return self.profile(r)

    def scaled(self, lam: float) -> "RadialTestFunction":
        f, d = self.profile, self.derivative
        return RadialTestFunction(lambda r: lam * f(r), lambda r: lam * d(r),
                                  self.tag, {**self.params, "scale": lam}, self.support)

    def negated(self) -> "RadialTestFunction":
        return self.scaled(-1.0)


def exp_decay(iota: float) -> RadialTestFunction:
    """-e^{-iota r}."""
    return RadialTestFunction(lambda r: -math.exp(-iota * r),
                              lambda r: iota * math.exp(-iota * r),
                              "exp_decay", {"iota": iota})


def stretched(iota: float, mu: float, p: float) -> RadialTestFunction:
    """-exp(-iota r^q) with q = 1 + mu/p."""
    q = 1.0 + mu / p

    def f(r):
        return -math.exp(-iota * r ** q)

    def df(r):
        return iota * q * r ** (q - 1.0) * math.exp(-iota * r ** q) if r > 0 else 0.0

    return RadialTestFunction(f, df, "stretched", {"iota": iota, "mu": mu, "p": p})


def log_power(n: int) -> RadialTestFunction:
    """-(ln(2+r))^{-1/n}."""
    def f(r):
        return -math.log(2.0 + r) ** (-1.0 / n)

    def df(r):
        return math.log(2.0 + r) ** (-1.0 / n - 1.0) / (n * (2.0 + r))

    return RadialTestFunction(f, df, "log_power", {"n": n})


def model_power(iota: float, s: float, p: float, m: float) -> RadialTestFunction:
    """-(1 + (iota r)^a)^e with a = 1 + s/(p-1), e = (p-1)/(p-m)."""
    a = 1.0 + s / (p - 1.0)
    e = (p - 1.0) / (p - m)

    def f(r):
        return -(1.0 + (iota * r) ** a) ** e

    def df(r):
        if r <= 0:
            return 0.0
        z = (iota * r) ** a
        return -e * (1.0 + z) ** (e - 1.0) * a * z / r

    return RadialTestFunction(f, df, "model_power", {"iota": iota, "s": s, "p": p, "m": m})


def bump(radius: float = 1.0, power: float = 2.0) -> RadialTestFunction:
    """(1 - r/radius)_+^power, compactly supported."""
    def f(r):
        return (1.0 - r / radius) ** power if r < radius else 0.0

    def df(r):
        return -power / radius * (1.0 - r / radius) ** (power - 1.0) if r < radius else 0.0

    return RadialTestFunction(f, df, "bump", {"radius": radius, "power": power}, support=radius)


def gaussian() -> RadialTestFunction:
    return RadialTestFunction(lambda r: math.exp(-r * r), lambda r: -2.0 * r * math.exp(-r * r),
                              "gaussian")


# parameters ---------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionalParams:
    n: int
    p: float
    s: float = 0.0
    m: float = 0.0

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)

    def check_hardy(self) -> "FunctionalParams":
        if not 1 < self.p < self.n:
            raise InvalidParams(f"Hardy needs 1 < p < n, got p={self.p}, n={self.n}")
        return self

    def check_uncertainty(self) -> "FunctionalParams":
        if not (-self.p + 1 < self.s <= 1 < self.p < self.n):
            raise InvalidParams(f"uncertainty needs -p+1 < s <= 1 < p < n, got {self}")
        return self

    def check_ckn(self) -> "FunctionalParams":
        n, p, s, m = self.n, self.p, self.s, self.m
        if not (1 < p < m and p * (n + s - 1) > m * (n - p) > 0):
            raise InvalidParams(f"CKN needs 1 < p < m and p(n+s-1) > m(n-p) > 0, got {self}")
        return self


# spaces ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialSpaceView:
    """What a radial computation needs: F*(dr), F*(-dr) and the polar density."""

    n: int
    polar_density: Profile
    fstar_dr_neg: Optional[Profile]
    fstar_dr_pos: Profile = lambda r: 1.0
    name: str = "space"


def berwald_view(n: int) -> RadialSpaceView:
    c = n * qd.unit_ball_volume(n)
    return RadialSpaceView(n, lambda r: c * r ** (n - 1) / (1.0 + r) ** (n + 1),
                           lambda r: (1.0 + 2.0 * r) ** 2, name="berwald")


def funk_view(n: int) -> RadialSpaceView:
    """Funk metric on the euclidean unit ball with its Busemann-Hausdorff measure."""
    c = n * qd.unit_ball_volume(n)
    return RadialSpaceView(n, lambda r: c * math.exp(-r) * (-math.expm1(-r)) ** (n - 1),
                           lambda r: 2.0 * math.exp(r) - 1.0, name="funk")


def euclidean_view(n: int) -> RadialSpaceView:
    c = n * qd.unit_ball_volume(n)
    return RadialSpaceView(n, lambda r: c * r ** (n - 1), lambda r: 1.0, name="euclidean")


def model_view(model: RadialMeasureModel) -> RadialSpaceView:
    return RadialSpaceView(model.n, lambda r: float(model.density(r)), None,
                           name=f"model(k={model.k},C={model.C})")


def fstar_of_radial(view: RadialSpaceView, tf: RadialTestFunction, r: float) -> float:
    d = tf.derivative(r)
    if d >= 0:
        return d * view.fstar_dr_pos(r)
    if view.fstar_dr_neg is None:
        raise InvalidParams(f"{view.name} has no registered F*(-dr)")
    return -d * view.fstar_dr_neg(r)


def _integral(view: RadialSpaceView, tf: RadialTestFunction, g: Profile,
              spec: QuadratureSpec | None = None) -> float:
    return integrate_radial(g, view.polar_density, domain=(0.0, tf.support), spec=spec)


def gradient_integral(view, tf, p, spec=None) -> float:
    """Integral of F*(df)^p."""
    return _integral(view, tf, lambda r: fstar_of_radial(view, tf, r) ** p, spec)


def weighted_integral(view, tf, a, b, spec=None) -> float:
    """Integral of |f|^a r^b."""
    def g(r):
        v = abs(tf.profile(r))
        return v ** a * r ** b if v > 0 else 0.0
    return _integral(view, tf, g, spec)


class Quotient(NamedTuple):
    numerator: float
    denominator: float
    value: float


def _ratio(num: float, den: float) -> Quotient:
    if not (math.isfinite(den) and den > 0):
        raise QuadratureFailure(f"denominator {den} is not positive and finite")
    return Quotient(num, den, num / den)


def hardy_parts(view, tf, params: FunctionalParams, spec=None) -> Quotient:
    params.check_hardy()
    p = params.p
    return _ratio(gradient_integral(view, tf, p, spec), weighted_integral(view, tf, p, -p, spec))


def uncertainty_parts(view, tf, params: FunctionalParams, spec=None) -> Quotient:
    params.check_uncertainty()
    p, s, q = params.p, params.s, params.p_conj
    num = (gradient_integral(view, tf, p, spec) ** (1 / p)
           * weighted_integral(view, tf, p, q * s, spec) ** (1 / q))
    return _ratio(num, weighted_integral(view, tf, p, s - 1, spec))


def ckn_parts(view, tf, params: FunctionalParams, spec=None) -> Quotient:
    params.check_ckn()
    p, s, m, q = params.p, params.s, params.m, params.p_conj
    num = (gradient_integral(view, tf, p, spec) ** (1 / p)
           * weighted_integral(view, tf, q * (m - 1), q * s, spec) ** (1 / q))
    return _ratio(num, weighted_integral(view, tf, m, s - 1, spec))


def hardy_quotient(view, tf, params, spec=None) -> float:
    return hardy_parts(view, tf, params, spec).value


def uncertainty_quotient(view, tf, params, spec=None) -> float:
    return uncertainty_parts(view, tf, params, spec).value


def ckn_quotient(view, tf, params, spec=None) -> float:
    return ckn_parts(view, tf, params, spec).value


PARTS = {"hardy": hardy_parts, "uncertainty": uncertainty_parts, "ckn": ckn_parts}


# Berwald-specific checks ----------------------------------------------------------

def ckn_lower_bound(params: FunctionalParams) -> float:
    """(s - 2)/(4m)."""
    return (params.s - 2.0) / (4.0 * params.m)


def ckn_lower_bound_check(tf: RadialTestFunction, params: FunctionalParams,
                          view: RadialSpaceView | None = None) -> tuple[float, float, bool]:
    if params.s <= 2:
        raise InvalidParams("the lower bound concerns s > 2")
    view = view or berwald_view(params.n)
    q = ckn_quotient(view, tf, params)
    bound = ckn_lower_bound(params)
    return q, bound, q >= bound - 1e-9


def divergence_identity_residual(tf: RadialTestFunction, n: int, m: float, s: float,
                                 spec: QuadratureSpec | None = None) -> tuple[float, float, float]:
    """Both sides of the radial divergence identity on Berwald space.

    LHS = int |f|^m r^s (Delta r) + s int |f|^m r^{s-1}
    RHS = -int <d(|f|^m r^s), grad r> + s int |f|^m r^{s-1},  with <dr, grad r> = 1.
    Returns (lhs, rhs, |lhs - rhs|).
    """
    view = berwald_view(n)

    def fm(r):
        return abs(tf.profile(r)) ** m

    def lhs_g(r):
        return fm(r) * (r ** s * laplacian_r_of_r(r, n) + s * r ** (s - 1))

    def rhs_g(r):
        f = tf.profile(r)
        dfm = m * abs(f) ** (m - 1) * math.copysign(1.0, f) * tf.derivative(r) if f != 0 else 0.0
        return -(dfm * r ** s + s * fm(r) * r ** (s - 1)) + s * fm(r) * r ** (s - 1)

    lhs = _integral(view, tf, lhs_g, spec)
    rhs = _integral(view, tf, rhs_g, spec)
    return lhs, rhs, abs(lhs - rhs)


def ckn_identity_lower_form(tf: RadialTestFunction, n: int, m: float, s: float) -> tuple[float, float]:
    """(s-2) int |f|^m r^{s-1} + (n+1) int |f|^m r^{s-1}/(1+r), and (s-2) int |f|^m r^{s-1}."""
    view = berwald_view(n)
    base = weighted_integral(view, tf, m, s - 1)
    extra = _integral(view, tf, lambda r: abs(tf.profile(r)) ** m * r ** (s - 1) / (1.0 + r))
    return (s - 2) * base + (n + 1) * extra, (s - 2) * base


# Sobolev seminorms -----------------------------------------------------------------

LADDER = tuple(range(4, 15))


@dataclass(frozen=True)
class SobolevResult:
    forward: float
    backward: float
    backward_divergent: bool
    ladder: tuple[float, ...]
    radii: tuple[float, ...]


def sobolev_seminorms(view: RadialSpaceView, tf: RadialTestFunction, p: float,
                      exponents=LADDER, factor: float = 1.5) -> SobolevResult:
    """Forward and backward L^p norms of F*(+-df), the latter through a truncation ladder."""
    if p <= 1:
        raise InvalidParams("p must exceed 1")
    forward = gradient_integral(view, tf, p)
    neg = tf.negated()

    def back(r):
        try:
            return fstar_of_radial(view, neg, r) ** p * view.polar_density(r)
        except OverflowError:
            return math.inf

    radii = tuple(float(2 ** k) for k in exponents)
    if tf.support < math.inf:
        radii = tuple(min(R, tf.support) for R in radii)
    ladder = qd.truncation_ladder(back, radii)
    divergent = qd.is_divergent(ladder, factor)
    if divergent:
        backward = math.inf
    else:
        backward = gradient_integral(view, neg, p)
    return SobolevResult(forward, backward, divergent, tuple(ladder), radii)


def log_power_forward_bound(n: int, p: float) -> float:
    """omega_n 2^{-p} n^{-p} (ln 2)^{-p/n - p}."""
    return qd.unit_ball_volume(n) * 2.0 ** -p * n ** -p * math.log(2.0) ** (-p / n - p)


# section-5 model bounds ---------------------------------------------------------------

def small_ball_exponents(kind: str, params: FunctionalParams) -> tuple[float, float, float, float]:
    """(a, b, varrho, varsigma) for the chosen functional."""
    p, s, m, q = params.p, params.s, params.m, params.p_conj
    if kind == "hardy":
        return p, -p, p, -p
    if kind == "uncertainty":
        return p, q * s, p, s - 1
    if kind == "ckn":
        return q * (m - 1), q * s, m, s - 1
    raise InvalidParams(f"unknown functional {kind!r}")


def model_numerator(view, tf, kind: str, params: FunctionalParams, spec=None) -> float:
    p = params.p
    a, b, _, _ = small_ball_exponents(kind, params)
    grad = gradient_integral(view, tf, p, spec)
    if kind == "hardy":
        return grad
    return grad ** (1 / p) * weighted_integral(view, tf, a, b, spec) ** (1 / params.p_conj)


def model_denominator(view, tf, kind: str, params: FunctionalParams, spec=None) -> float:
    _, _, rho, sig = small_ball_exponents(kind, params)
    return weighted_integral(view, tf, rho, sig, spec)


def model_denominator_bound(model: RadialMeasureModel, kind: str, params: FunctionalParams,
                            eps: float = 0.5, exact_power_integral: bool = False) -> float:
    """Small-ball lower bound I * eps^{n+varsigma} / (2 e^{varrho}).

    With ``exact_power_integral`` the factor 1/(n+varsigma) from integrating
    r^{n+varsigma-1} over (0, eps) is kept.
    """
    _, _, rho, sig = small_ball_exponents(kind, params)
    e = model.n + sig
    val = model.angular_mass * eps ** e / (2.0 * math.exp(rho))
    return val / e if exact_power_integral else val
