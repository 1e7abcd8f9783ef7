import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glmfab._core import DimensionError, DomainError, Level
from glmfab.base1 import FAMILIES1, Family1, eval_base1
from glmfab.base2 import FAMILIES2, eval_base2
from glmfab.expander import (
    Coefficients,
    EvalBundle,
    Objective,
    RegressionData,
    expand_1par,
    expand_2par,
    gaussian_log_prior,
    merge,
    zero_bundle,
)
from glmfab.numerics import Layout, Matrix, fd_gradient, fd_hessian, rel_error

from helpers import draw_1par, draw_2par, explicit_1par, explicit_2par, family_seed


def test_single_row_1par_is_base():
    b = expand_1par([0.0], RegressionData([[1.0]], [1.0]), Family1("binomial-logit", 1))
    assert b.f == pytest.approx(-np.log(2.0), rel=1e-15)
    np.testing.assert_array_equal(b.g, [0.5])
    np.testing.assert_array_equal(b.h, [[-0.25]])


def test_poisson_zero_predictor_zero_gradient():
    X = np.random.default_rng(0).normal(size=(7, 3))
    b = expand_1par(np.zeros(3), RegressionData(X, np.ones(7)), "poisson-log")
    np.testing.assert_allclose(b.g, np.zeros(3), atol=0)


def test_single_row_2par_example():
    data = RegressionData([[1.0]], [1.0], Z=[[1.0]])
    b = expand_2par(Coefficients([0.0], [0.0]), data, "gaussian-identity-log")
    assert b.f == -0.5
    np.testing.assert_array_equal(b.g, [1.0, 0.0])
    np.testing.assert_array_equal(b.h, [[-1.0, -1.0], [-1.0, -0.5]])
    b = expand_2par(Coefficients([0.0], [0.0]), data, "gaussian-identity-log", block_diag=True)
    np.testing.assert_array_equal(b.h, [[-1.0, 0.0], [0.0, -0.5]])


def test_zero_residual_kills_cross_block():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(12, 3))
    Z = rng.normal(size=(12, 2))
    beta = rng.normal(size=3)
    b = expand_2par(np.concatenate((beta, [0.1, -0.2])), RegressionData(X, X @ beta, Z), "gaussian-identity-log")
    np.testing.assert_allclose(b.h[:3, 3:], 0.0, atol=1e-14)
    np.testing.assert_allclose(b.g[:3], 0.0, atol=1e-14)


@pytest.mark.parametrize("name", FAMILIES1)
def test_1par_compact_equals_explicit(name):
    rng = np.random.default_rng(family_seed(name, 7))
    for _ in range(10):
        n, k = rng.integers(1, 31), rng.integers(1, 7)
        X = rng.uniform(-1, 1, size=(n, k))
        beta = rng.uniform(-1, 1, size=k)
        fam, _, y = draw_1par(name, rng, n)
        b = expand_1par(beta, RegressionData(X, y), fam)
        f, g, h = explicit_1par(eval_base1(fam, X @ beta, y), X)
        np.testing.assert_allclose(b.f, f, rtol=1e-13)
        np.testing.assert_allclose(b.g, g, rtol=0, atol=1e-12)
        np.testing.assert_allclose(b.h, h, rtol=0, atol=1e-12)


@pytest.mark.parametrize("name", FAMILIES2)
@pytest.mark.parametrize("block_diag", [False, True])
def test_2par_compact_equals_explicit(name, block_diag):
    rng = np.random.default_rng(family_seed(name, 8))
    for _ in range(10):
        n, k1, k2 = rng.integers(1, 31), rng.integers(1, 5), rng.integers(1, 4)
        X = rng.uniform(-1, 1, size=(n, k1))
        Z = rng.uniform(-1, 1, size=(n, k2))
        x = rng.uniform(-0.5, 0.5, size=k1 + k2)
        fam, _, _, y = draw_2par(name, rng, n)
        b = expand_2par(x, RegressionData(X, y, Z), fam, block_diag=block_diag)
        ev = eval_base2(fam, X @ x[:k1], Z @ x[k1:], y)
        f, g, h = explicit_2par(ev, X, Z, block_diag)
        np.testing.assert_allclose(b.f, f, rtol=1e-13)
        np.testing.assert_allclose(b.g, g, rtol=0, atol=1e-12)
        np.testing.assert_allclose(b.h, h, rtol=0, atol=1e-12)
        np.testing.assert_array_equal(b.h, b.h.T)


def test_level_monotone_f_bitwise():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(40, 4))
    y = rng.integers(0, 2, 40)
    beta = rng.normal(size=4)
    fs = [expand_1par(beta, RegressionData(X, y), "binomial-probit", lvl).f for lvl in Level]
    assert fs[0] == fs[1] == fs[2]
    Z = rng.normal(size=(40, 2))
    yy = np.exp(rng.normal(size=40))
    x = rng.normal(size=6) * 0.3
    fs = [expand_2par(x, RegressionData(X, yy, Z), "gamma-log-log", lvl).f for lvl in Level]
    assert fs[0] == fs[1] == fs[2]


def test_layouts_give_identical_results():
    rng = np.random.default_rng(4)
    X = rng.uniform(-0.5, 0.5, size=(200, 6))
    y = rng.integers(0, 2, 200)
    beta = rng.normal(size=6)
    a = expand_1par(beta, RegressionData(Matrix.from_array(X, Layout.ROW), y), "binomial-logit")
    b = expand_1par(beta, RegressionData(Matrix.from_array(X, Layout.COL), y), "binomial-logit")
    assert abs(a.f - b.f) <= 1e-12
    np.testing.assert_allclose(a.g, b.g, rtol=0, atol=1e-12)
    np.testing.assert_allclose(a.h, b.h, rtol=0, atol=1e-12)


def test_2par_constant_dispersion_beta_block_is_weighted_least_squares():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(30, 3))
    y = rng.normal(size=30)
    beta, g0 = rng.normal(size=3), 0.7
    b = expand_2par(np.append(beta, g0), RegressionData(X, y), "gaussian-identity-log")
    w = np.exp(-g0)
    np.testing.assert_allclose(b.g[:3], w * X.T @ (y - X @ beta), rtol=1e-12)
    np.testing.assert_allclose(b.h[:3, :3], -w * X.T @ X, rtol=1e-12)


def test_bundle_and_coefficient_invariants():
    with pytest.raises(DimensionError):
        EvalBundle(0.0, np.zeros(2), None, Level.FGH)
    with pytest.raises(DimensionError):
        EvalBundle(0.0, None, None, Level.FG)
    c = Coefficients([1.0, 2.0], [3.0])
    np.testing.assert_array_equal(c.vector, [1.0, 2.0, 3.0])
    back = Coefficients.from_vector(c.vector, 2, two_slot=True)
    np.testing.assert_array_equal(back.gamma, [3.0])
    with pytest.raises(DimensionError):
        RegressionData(np.ones((3, 2)), np.ones(4))
    with pytest.raises(DimensionError):
        RegressionData(np.ones((3, 2)), np.ones(3), Z=np.ones((2, 1)))
    with pytest.raises(DimensionError):
        expand_1par([0.0], RegressionData(np.ones((3, 2)), np.ones(3)), "poisson-log")
    with pytest.raises(DimensionError):
        expand_2par([0.0, 0.0], RegressionData(np.ones((3, 2)), np.ones(3)), "gamma-log-log")
    np.testing.assert_array_equal(RegressionData(np.ones((3, 2)), np.ones(3)).dispersion_design(), np.ones((3, 1)))


# --------------------------------------------------------------------------- #
# merge and prior
# --------------------------------------------------------------------------- #


def _random_bundle(rng, k, level=Level.FGH):
    B = rng.normal(size=(k, k))
    return EvalBundle(float(rng.normal()), rng.normal(size=k), B + B.T, level)


def test_merge_identity_and_sum():
    rng = np.random.default_rng(6)
    a, b = _random_bundle(rng, 3), _random_bundle(rng, 3)
    z = merge(a, zero_bundle(3))
    assert z.f == a.f
    np.testing.assert_array_equal(z.g, a.g)
    np.testing.assert_array_equal(z.h, a.h)
    assert merge(a, b).f == a.f + b.f


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 6))
def test_merge_commutative_and_associative(seed, k):
    rng = np.random.default_rng(seed)
    a, b, c = (_random_bundle(rng, k) for _ in range(3))
    ab, ba = merge(a, b), merge(b, a)
    assert ab.f == ba.f
    np.testing.assert_array_equal(ab.h, ba.h)
    left, right = merge(merge(a, b), c), merge(a, merge(b, c))
    np.testing.assert_allclose(left.g, right.g, rtol=1e-14, atol=1e-14)
    np.testing.assert_allclose(left.h, right.h, rtol=1e-14, atol=1e-14)


def test_merge_mismatch_errors():
    rng = np.random.default_rng(7)
    with pytest.raises(DimensionError):
        merge(_random_bundle(rng, 2), _random_bundle(rng, 3))
    with pytest.raises(DimensionError):
        merge(_random_bundle(rng, 2, Level.FGH), EvalBundle(0.0, level=Level.F), Level.FG)
    assert merge(_random_bundle(rng, 2), EvalBundle(1.0, level=Level.F)).level == Level.F


def test_prior_examples():
    mu = np.array([0.5, -1.0])
    p = gaussian_log_prior(mu, mu, [1.0, 2.0])
    np.testing.assert_array_equal(p.g, [0.0, 0.0])
    flat = gaussian_log_prior(np.zeros(3), 0.0, 1000.0)
    np.testing.assert_allclose(np.diag(flat.h), -1e-6, rtol=1e-12)
    from scipy import stats

    beta = np.array([0.3, -0.2])
    np.testing.assert_allclose(
        gaussian_log_prior(beta, mu, [1.0, 2.0]).f, stats.norm.logpdf(beta, mu, [1.0, 2.0]).sum(), rtol=1e-14
    )
    with pytest.raises(DomainError):
        gaussian_log_prior(beta, 0.0, [1.0, 0.0])


def test_prior_fd():
    rng = np.random.default_rng(8)
    beta, mu, sd = rng.normal(size=4), rng.normal(size=4), rng.uniform(0.5, 2, 4)
    p = gaussian_log_prior(beta, mu, sd)
    fn = lambda b: gaussian_log_prior(b, mu, sd, Level.F).f  # noqa: E731
    assert rel_error(p.g, fd_gradient(fn, beta)) <= 1e-6
    assert rel_error(p.h, fd_hessian(fn, beta)) <= 1e-5


def test_objective_with_prior_matches_fd_of_sum():
    rng = np.random.default_rng(9)
    X = rng.uniform(-0.5, 0.5, size=(50, 3))
    y = rng.integers(0, 2, 50)
    obj = Objective(RegressionData(X, y), Family1("binomial-logit", 1), prior_mean=0.2, prior_sd=1.5)
    x = rng.normal(size=3)
    b = obj(x)
    scal = lambda t: expand_1par(t, obj.data, obj.family, Level.F).f + gaussian_log_prior(t, 0.2, 1.5, Level.F).f  # noqa: E731
    assert b.f == pytest.approx(scal(x), rel=1e-15)
    assert rel_error(b.g, fd_gradient(scal, x)) <= 1e-5
    assert rel_error(b.h, fd_hessian(scal, x)) <= 1e-4


def test_objective_resolution_and_checks():
    data = RegressionData(np.ones((3, 1)), np.ones(3))
    assert not Objective(data, "poisson-log").two_slot
    obj = Objective(data, "gamma-log-log")
    assert obj.two_slot and obj.dim == 2
    with pytest.raises(DimensionError):
        Objective(RegressionData(np.ones((3, 1)), np.ones(3), np.ones((3, 1))), "poisson-log")
    with pytest.raises(DomainError):
        Objective(data, "poisson-log", prior_mean=1.0)
