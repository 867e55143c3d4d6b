import math

import mpmath as mp
import numpy as np
import pytest
from scipy.integrate import quad

from finslab import finsler as fs
from finslab.errors import OutsideDomain
from finslab.funk import (FunkSpace, backward_lower_bound_integral, bh_volume, exact_forward_seminorm,
                          exact_lp_norm, radial_integral)
from finslab.minkowski import MinkowskiNorm, norm_eval

EUC2 = FunkSpace(MinkowskiNorm.euclidean(2))
RANDERS = FunkSpace(MinkowskiNorm.randers([0.5, 0.0]))
BODIES = {
    "euclidean3": FunkSpace(MinkowskiNorm.euclidean(3)),
    "ellipsoid2": FunkSpace(MinkowskiNorm.ellipsoid(np.diag([4.0, 1.0]))),
    "randers2": RANDERS,
    "randers3": FunkSpace(MinkowskiNorm.randers([0.2, -0.6, 0.3])),
}


def interior(space, rng, m):
    n = space.dim
    u = rng.normal(size=(m, n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    rad = rng.uniform(0, 0.98, size=m) / norm_eval(space.norm, u)
    return u * rad[:, None], rng.normal(size=(m, n))


def test_metric_examples():
    assert EUC2.f_eval([0.0, 0.0], [3.0, 4.0]) == pytest.approx(5.0)
    assert EUC2.f_eval([0.5, 0.0], [1.0, 0.0]) == pytest.approx(2.0)
    assert EUC2.f_eval([0.5, 0.0], [-1.0, 0.0]) == pytest.approx(2.0 / 3.0)
    assert RANDERS.f_eval([0.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)
    assert RANDERS.f_eval([0.3, 0.0], [0.0, 0.0]) == 0.0
    x, y = np.array([0.3, 0.0]), np.array([1.0, 0.0])
    f = RANDERS.f_eval(x, y)
    assert abs(norm_eval(RANDERS.norm, y + x * f) - f) <= 1e-10
    with pytest.raises(OutsideDomain):
        EUC2.f_eval([1.0, 0.0], [1.0, 0.0])


@pytest.mark.parametrize("name", sorted(BODIES))
def test_implicit_residual(name, rng):
    space = BODIES[name]
    X, Y = interior(space, rng, 1000)
    F = space.metric(X, Y)
    res = np.abs(norm_eval(space.norm, Y + X * F[:, None]) - F)
    assert np.max(res / np.maximum(F, 1.0)) <= 1e-10
    assert np.all(F > 0)


def test_closed_form_matches_implicit(rng):
    space = BODIES["euclidean3"]
    X, Y = interior(space, rng, 1000)
    closed = space.metric(X, Y)
    implicit = space.f_fixed_point(X, Y)
    assert np.max(np.abs(closed - implicit) / closed) <= 1e-9


def test_cometric_examples():
    assert EUC2.cometric([0.0, 0.0], [3.0, 4.0]) == pytest.approx(5.0)
    assert EUC2.cometric([0.5, 0.0], [1.0, 0.0]) == pytest.approx(0.5)
    for space in BODIES.values():
        x = np.full(space.dim, 0.15)
        assert space.cometric(x, space.dr(x)) == pytest.approx(1.0, rel=1e-9)


def test_cometric_matches_oracle(rng):
    for space in (RANDERS, BODIES["ellipsoid2"]):
        X, Xi = interior(space, rng, 5)
        for x, xi in zip(X, Xi):
            assert space.cometric(x, xi) == pytest.approx(fs.cometric_oracle(space.finsler, x, xi), rel=1e-7)


def test_distance_examples():
    assert EUC2.dist_from_origin([0.0, 0.0]) == 0.0
    assert EUC2.dist_from_origin([0.5, 0.0]) == pytest.approx(math.log(2))
    t = 1 - math.exp(-1)
    assert EUC2.dist_from_origin([0.0, t]) == pytest.approx(1.0)


@pytest.mark.parametrize("name", sorted(BODIES))
def test_distance_is_line_integral(name, rng):
    space = BODIES[name]
    X, _ = interior(space, rng, 3)
    for x in X:
        length, _ = quad(lambda s: space.f_eval(s * x, x), 0.0, 1.0, epsabs=1e-13, epsrel=1e-12)
        assert space.dist_from_origin(x) == pytest.approx(length, rel=1e-8, abs=1e-12)


def test_bh_volume_examples(rng):
    assert bh_volume(MinkowskiNorm.euclidean(2)) == pytest.approx(math.pi, rel=1e-12)
    assert bh_volume(MinkowskiNorm.euclidean(3)) == pytest.approx(4 * math.pi / 3, rel=1e-10)
    assert bh_volume(MinkowskiNorm.ellipsoid(np.diag([4.0, 1.0]))) == pytest.approx(math.pi / 2, rel=1e-12)
    # Monte Carlo membership count over the bounding box of {|y| + y_1/2 < 1}
    lo, hi = np.array([-2.0, -1.2]), np.array([2 / 3, 1.2])
    pts = lo + (hi - lo) * rng.random((4_000_000, 2))
    mc = np.mean(norm_eval(RANDERS.norm, pts) < 1) * np.prod(hi - lo)
    vol = bh_volume(RANDERS.norm)
    assert vol == pytest.approx(mc, rel=1e-3)
    assert vol == pytest.approx(math.pi / (1 - 0.25) ** 1.5, rel=1e-12)


def test_radial_integral_examples():
    for variant in ("t", "r"):
        assert radial_integral(lambda t: 1.0, 2, variant) == pytest.approx(math.pi, rel=1e-10)
        assert radial_integral(lambda t: (1 - t), 2, variant) == pytest.approx(math.pi / 3, rel=1e-10)
        assert 0.25 * radial_integral(lambda t: (1 - t), 2, variant) == pytest.approx(math.pi / 12, rel=1e-10)
    with pytest.raises(ValueError):
        radial_integral(lambda t: 1.0, 2, "s")


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("iota", [0.25, 0.5, 1.0])
def test_exact_sobolev_grid(n, p, iota):
    lp = radial_integral(lambda t: (1 - t) ** (iota * p), n)
    assert lp == pytest.approx(exact_lp_norm(n, p, iota), rel=1e-10)
    fwd = iota ** p * radial_integral(lambda t: (1 - t) ** (iota * p), n, "r")
    assert fwd == pytest.approx(exact_forward_seminorm(n, p, iota), rel=1e-10)


def test_backward_seminorm_diverges():
    n, p, iota = 2, 2.0, 0.1
    assert p * (iota - 1) + 1 < 0
    mp.mp.dps = 25
    for delta in (1e-3, 1e-4, 1e-5):
        v, half = (backward_lower_bound_integral(n, p, iota, d) for d in (delta, delta / 2))
        assert half >= 1.5 * v
        ref = 2 * math.pi * iota ** p * mp.quad(lambda t: t ** (p + n - 1) * (1 - t) ** (p * (iota - 1)),
                                                 [0, 0.5, 1 - 10 * delta, 1 - delta])
        assert v == pytest.approx(float(ref), rel=1e-8)


def test_backward_seminorm_finite_when_exponent_allows():
    a, b = (backward_lower_bound_integral(2, 2.0, 0.8, d) for d in (1e-4, 5e-5))
    assert b / a < 1.01


def test_reversibility_interval():
    lo, hi = RANDERS.reversibility_interval([0.2, 0.1])
    measured = fs.reversibility_at(RANDERS.finsler, np.array([0.2, 0.1]))
    assert lo - 1e-6 <= measured <= hi + 1e-6
    lo, hi = EUC2.reversibility_interval([0.5, 0.0])
    assert lo == pytest.approx(3.0) and hi == pytest.approx(3.0)


def test_randers_flag_curvature_spot(rng):
    space = FunkSpace(MinkowskiNorm.randers([0.3, 0.0, 0.0])).finsler
    for _ in range(3):
        x = rng.uniform(-0.3, 0.3, 3)
        y, v = rng.normal(size=3), rng.normal(size=3)
        assert fs.flag_curvature(space, x, y, v) == pytest.approx(-0.25, abs=1e-3)


@pytest.mark.parametrize("name", ["euclidean3", "randers2"])
def test_s_curvature_constant(name, rng):
    space = BODIES[name]
    X, Y = interior(space, rng, 4)
    for x, y in zip(0.8 * X, Y):
        ratio = fs.s_curvature(space.finsler, x, y) / space.f_eval(x, y)
        assert ratio == pytest.approx((space.dim + 1) / 2, abs=1e-4)
