import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from finslab.errors import InvalidParams, ZeroVector
from finslab.minkowski import (MinkowskiNorm, dual_eval, dual_maximizer, norm_eval, norm_grad,
                               norm_hessian_energy, reversibility)
from finslab.numerics import maximize_on_sphere

RANDERS = MinkowskiNorm.randers([0.5, 0.0])
ELLIPSE = MinkowskiNorm.ellipsoid(np.diag([4.0, 1.0]))
EUCLID = MinkowskiNorm.euclidean(2)


def test_norm_examples():
    assert norm_eval(EUCLID, [3.0, 4.0]) == pytest.approx(5.0)
    assert norm_eval(RANDERS, [1.0, 0.0]) == pytest.approx(1.5)
    assert norm_eval(RANDERS, [-1.0, 0.0]) == pytest.approx(0.5)
    assert norm_eval(ELLIPSE, [1.0, 0.0]) == pytest.approx(2.0)


def test_gradient_examples():
    np.testing.assert_allclose(norm_grad(EUCLID, [0.0, 2.0]), [0.0, 1.0])
    np.testing.assert_allclose(norm_grad(RANDERS, [1.0, 0.0]), [1.5, 0.0])
    np.testing.assert_allclose(norm_grad(ELLIPSE, [1.0, 0.0]), [2.0, 0.0])
    with pytest.raises(ZeroVector):
        norm_grad(EUCLID, [0.0, 0.0])


def _oracle_dual(norm, eta):
    val, _ = maximize_on_sphere(lambda u: (u @ eta) / norm_eval(norm, u), norm.dim)
    return val


def test_dual_examples():
    assert dual_eval(EUCLID, [3.0, 4.0]) == pytest.approx(5.0)
    assert dual_eval(ELLIPSE, [1.0, 0.0]) == pytest.approx(0.5)
    # dense grid plus golden-section refinement as an independent oracle
    th = np.linspace(-np.pi, np.pi, 10001)
    u = np.column_stack([np.cos(th), np.sin(th)])
    ratio = u[:, 0] / norm_eval(RANDERS, u)
    i = int(np.argmax(ratio))
    from scipy.optimize import minimize_scalar
    res = minimize_scalar(lambda t: -np.cos(t) / norm_eval(RANDERS, [np.cos(t), np.sin(t)]),
                          bracket=(th[i - 1], th[i], th[i + 1]), tol=1e-12)
    assert dual_eval(RANDERS, [1.0, 0.0]) == pytest.approx(-res.fun, rel=1e-10)
    assert dual_eval(RANDERS, [1.0, 0.0]) == pytest.approx(2.0 / 3.0, rel=1e-10)


def test_reversibility_examples():
    assert reversibility(EUCLID) == 1.0
    assert reversibility(ELLIPSE) == 1.0
    assert reversibility(RANDERS) == pytest.approx(3.0, rel=1e-8)


def test_validation():
    with pytest.raises(InvalidParams):
        MinkowskiNorm.randers([1.0, 0.0])
    with pytest.raises(InvalidParams):
        MinkowskiNorm.ellipsoid([[1.0, 2.0], [2.0, 1.0]])


def test_config_round_trip():
    for norm in (EUCLID, ELLIPSE, RANDERS):
        again = MinkowskiNorm.from_config(norm.to_config(), dim=2)
        y = np.array([0.3, -1.2])
        assert norm_eval(again, y) == pytest.approx(norm_eval(norm, y))


norms = st.one_of(
    st.builds(lambda n: MinkowskiNorm.euclidean(n), st.integers(2, 4)),
    st.builds(lambda d: MinkowskiNorm.ellipsoid(np.diag(d)),
              arrays(float, 3, elements=st.floats(0.2, 5.0))),
    st.builds(lambda b: MinkowskiNorm.randers(b),
              arrays(float, 2, elements=st.floats(-0.6, 0.6))),
)


@given(norms, st.integers(0, 2 ** 31), st.floats(0.01, 100.0))
def test_homogeneity_and_euler(norm, seed, lam):
    y = np.random.default_rng(seed).normal(size=norm.dim)
    f = norm_eval(norm, y)
    assert norm_eval(norm, lam * y) == pytest.approx(lam * f, rel=1e-10)
    assert norm_grad(norm, y) @ y == pytest.approx(f, rel=1e-10)
    h = norm_hessian_energy(norm, y)
    np.testing.assert_allclose(h @ y, f * norm_grad(norm, y), rtol=1e-9, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(h) > 0)


@given(norms, st.integers(0, 2 ** 31))
def test_duality_inequality(norm, seed):
    rng = np.random.default_rng(seed)
    eta, y = rng.normal(size=norm.dim), rng.normal(size=norm.dim)
    assert eta @ y <= dual_eval(norm, eta) * norm_eval(norm, y) * (1 + 1e-10)
    u = dual_maximizer(norm, eta)
    assert eta @ u / norm_eval(norm, u) == pytest.approx(dual_eval(norm, eta), rel=1e-9)


@pytest.mark.parametrize("norm", [EUCLID, ELLIPSE, MinkowskiNorm.ellipsoid(np.diag([2.0, 0.5, 1.0]))])
def test_bidual(norm, rng):
    for _ in range(5):
        y = rng.normal(size=norm.dim)
        bidual, _ = maximize_on_sphere(lambda e: (e @ y) / np.array([dual_eval(norm, v) for v in e]), norm.dim)
        assert bidual == pytest.approx(norm_eval(norm, y), rel=1e-6)


def test_randers_dual_matches_oracle(rng):
    norm = MinkowskiNorm.randers([0.2, -0.3])
    for _ in range(20):
        eta = rng.normal(size=2)
        assert dual_eval(norm, eta) == pytest.approx(_oracle_dual(norm, eta), rel=1e-9)
