import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslab import bruteforce as bf
from finslab import functionals as fn
from finslab.errors import InvalidParams
from finslab.quadrature import RadialMeasureModel

BERWALD3 = fn.berwald_view(3)


def test_fstar_of_radial_examples():
    iota = 0.3
    tf = fn.exp_decay(iota)
    view = fn.berwald_view(2)
    for r in (0.1, 1.0, 7.0):
        assert fn.fstar_of_radial(view, tf, r) == pytest.approx(iota * math.exp(-iota * r))
    const = fn.RadialTestFunction(lambda r: 2.0, lambda r: 0.0, "const")
    assert fn.fstar_of_radial(view, const, 1.0) == 0.0
    assert fn.fstar_of_radial(view, tf.negated(), 1.0) == pytest.approx(iota * math.exp(-iota) * 9)
    with pytest.raises(InvalidParams):
        fn.fstar_of_radial(fn.model_view(RadialMeasureModel(3, 1, 2)), tf.negated(), 1.0)


def test_param_rules():
    with pytest.raises(InvalidParams):
        fn.FunctionalParams(2, 2).check_hardy()
    with pytest.raises(InvalidParams):
        fn.FunctionalParams(3, 2, 1.5).check_uncertainty()
    with pytest.raises(InvalidParams):
        fn.FunctionalParams(3, 2, 1, 2).check_ckn()
    fn.FunctionalParams(3, 2, 1, 3).check_ckn()
    with pytest.raises(InvalidParams):
        fn.hardy_quotient(fn.berwald_view(2), fn.exp_decay(0.1), fn.FunctionalParams(2, 2))


def _mp_hardy(iota):
    mp.mp.dps = 30
    w = lambda r: 4 * mp.pi * r ** 2 / (1 + r) ** 4  # noqa: E731
    num = mp.quad(lambda r: iota ** 2 * mp.e ** (-2 * iota * r) * w(r), [0, 1, 10, 1 / iota, mp.inf])
    den = mp.quad(lambda r: mp.e ** (-2 * iota * r) * r ** -2 * w(r), [0, 1, 10, 1 / iota, mp.inf])
    return float(num / den)


def test_hardy_quotient_against_mpmath():
    P = fn.FunctionalParams(3, 2)
    for iota in (0.1, 0.01, 0.001):
        assert fn.hardy_quotient(BERWALD3, fn.exp_decay(iota), P) == pytest.approx(_mp_hardy(iota), rel=1e-9)


def test_hardy_decade_ratio_tends_to_hundred():
    P = fn.FunctionalParams(3, 2)
    q = [fn.hardy_quotient(BERWALD3, fn.exp_decay(10.0 ** -e), P) for e in range(2, 8)]
    ratios = [a / b for a, b in zip(q, q[1:])]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] == pytest.approx(100.0, rel=1e-4)


def test_berwald_hardy_numerator_identity():
    for n, p, iota in ((2, 1.5, 0.3), (3, 2.0, 0.01), (3, 2.5, 0.5)):
        view = fn.berwald_view(n)
        lhs = fn.gradient_integral(view, fn.exp_decay(iota), p)
        rhs = iota ** p * fn.weighted_integral(view, fn.exp_decay(iota), p, 0.0)
        assert lhs == pytest.approx(rhs, rel=1e-10)


QUOTIENT_CASES = [
    ("hardy", fn.FunctionalParams(3, 2)),
    ("uncertainty", fn.FunctionalParams(3, 2, 1)),
    ("ckn", fn.FunctionalParams(3, 2, 1.5, 3)),
]


@pytest.mark.parametrize("kind,params", QUOTIENT_CASES)
@given(lam=st.floats(1e-3, 1e3), iota=st.floats(1e-3, 1.0))
def test_zero_homogeneity(kind, params, lam, iota):
    # exact in theory; numerically limited by the quadrature's relative tolerance
    tf = fn.stretched(iota, 1.5, params.p)
    base = fn.PARTS[kind](BERWALD3, tf, params).value
    assert fn.PARTS[kind](BERWALD3, tf.scaled(lam), params).value == pytest.approx(base, rel=1e-10)


@given(n=st.integers(2, 4), p=st.floats(1.1, 1.9), iota=st.floats(1e-3, 1.0))
def test_denominators_positive_and_finite(n, p, iota):
    params = fn.FunctionalParams(n, p, 0.5, p + 1.0)
    for view in (fn.berwald_view(n), fn.funk_view(n)):
        for kind in ("hardy", "uncertainty"):
            q = fn.PARTS[kind](view, fn.exp_decay(iota), params)
            assert 0 < q.denominator < math.inf and 0 < q.value < math.inf


def test_euclidean_view_matches_grid():
    params = fn.FunctionalParams(2, 1.5, 0.5, 3)
    tf = fn.bump(1.0, 1.0)
    grid = bf.grid_quotients("euclidean", tf, params)
    view = fn.euclidean_view(2)
    for kind in ("hardy", "uncertainty", "ckn"):
        assert grid[kind] == pytest.approx(fn.PARTS[kind](view, tf, params).value, rel=1e-3)


def test_uncertainty_examples():
    P = fn.FunctionalParams(3, 2, 1)
    funk = fn.funk_view(3)
    a, b = (fn.uncertainty_quotient(funk, fn.exp_decay(i), P) for i in (0.1, 0.01))
    assert b < a
    grid = np.geomspace(1e-1, 1e-4, 13)
    q = [fn.uncertainty_quotient(BERWALD3, fn.exp_decay(i), P) for i in grid]
    slope = np.polyfit(np.log(grid), np.log(q), 1)[0]
    assert slope == pytest.approx(0.5, abs=0.05)


def test_ckn_examples():
    grid = np.geomspace(1e-1, 1e-4, 13)
    P = fn.FunctionalParams(3, 2, 1, 3)
    q = [fn.ckn_quotient(fn.funk_view(3), fn.exp_decay(i), P) for i in grid]
    assert np.polyfit(np.log(grid), np.log(q), 1)[0] == pytest.approx(1.0, abs=0.1)


def test_ckn_lower_bound_examples():
    P = fn.FunctionalParams(3, 2, 2.5, 3)
    assert fn.ckn_lower_bound(P) == pytest.approx(1 / 24)
    P2 = fn.FunctionalParams(3, 2, 2.0001, 3)
    q, bound, ok = fn.ckn_lower_bound_check(fn.gaussian(), P2)
    assert bound == pytest.approx(8.3e-6, rel=1e-2) and ok
    for tf in (fn.bump(), fn.gaussian(), fn.exp_decay(0.01), fn.stretched(0.01, 1.5, 2)):
        assert fn.ckn_lower_bound_check(tf, P)[2]
    with pytest.raises(InvalidParams):
        fn.ckn_lower_bound_check(fn.gaussian(), fn.FunctionalParams(3, 2, 1.5, 3))


def test_divergence_identity_examples():
    lhs, rhs, gap = fn.divergence_identity_residual(fn.bump(), 2, 3, 2.5)
    assert gap <= 1e-6 * max(abs(lhs), 1.0)
    lhs, rhs, gap = fn.divergence_identity_residual(fn.gaussian(), 3, 3, 2.5)
    assert gap <= 1e-6 * max(abs(lhs), 1.0)
    zero = fn.RadialTestFunction(lambda r: 0.0, lambda r: 0.0, "zero", support=1.0)
    assert fn.divergence_identity_residual(zero, 2, 3, 2.5) == (0.0, 0.0, 0.0)


def test_identity_lower_form_dominates():
    full, reduced = fn.ckn_identity_lower_form(fn.gaussian(), 3, 3, 2.5)
    assert full > reduced > 0


def test_sobolev_examples():
    res = fn.sobolev_seminorms(fn.berwald_view(2), fn.log_power(2), 2)
    assert res.forward <= fn.log_power_forward_bound(2, 2)
    assert res.backward_divergent and res.backward == math.inf
    res = fn.sobolev_seminorms(fn.euclidean_view(3), fn.exp_decay(0.7), 2)
    assert not res.backward_divergent
    assert res.backward == pytest.approx(res.forward, rel=1e-12)
    with pytest.raises(InvalidParams):
        fn.sobolev_seminorms(fn.euclidean_view(3), fn.exp_decay(0.7), 1.0)


def test_model_small_ball_bounds():
    model = RadialMeasureModel(3, 1.0, 2.0)
    view = fn.model_view(model)
    P = fn.FunctionalParams(3, 2, 0.0, 3)
    mu = model.default_mu()
    for kind in ("hardy", "uncertainty", "ckn"):
        nums = [fn.model_numerator(view, fn.stretched(i, mu, 2), kind, P) for i in (1e-1, 1e-2, 1e-3, 1e-4)]
        assert all(a > b for a, b in zip(nums, nums[1:]))
        assert nums[-1] <= 0.1 * nums[0]
        bound = fn.model_denominator_bound(model, kind, P, eps=0.5)
        assert fn.model_denominator(view, fn.stretched(1e-4, mu, 2), kind, P) >= bound
        assert fn.model_denominator_bound(model, kind, P, exact_power_integral=True) <= bound


def test_small_ball_exponents():
    P = fn.FunctionalParams(3, 2, 0.5, 3)
    assert fn.small_ball_exponents("hardy", P) == (2, -2, 2, -2)
    assert fn.small_ball_exponents("uncertainty", P) == (2, 1.0, 2, -0.5)
    assert fn.small_ball_exponents("ckn", P) == (4.0, 1.0, 3, -0.5)
    with pytest.raises(InvalidParams):
        fn.small_ball_exponents("other", P)


@pytest.mark.parametrize("tf", [fn.exp_decay(0.4), fn.stretched(0.2, 1.5, 2), fn.log_power(3),
                                fn.model_power(0.5, 2.5, 2, 3), fn.bump(2.0, 3.0), fn.gaussian()])
def test_profile_derivatives(tf):
    for r in (0.3, 1.0, 1.7):
        h = 1e-6
        assert tf.derivative(r) == pytest.approx((tf.profile(r + h) - tf.profile(r - h)) / (2 * h), rel=1e-6, abs=1e-9)
