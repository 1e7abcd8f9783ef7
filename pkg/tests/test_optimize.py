import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glmfab._core import DomainError, Level, NumericalError
from glmfab.base1 import Family1
from glmfab.expander import EvalBundle, Objective, RegressionData
from glmfab.numerics import fd_gradient
from glmfab.optimize import (
    NewtonConfig,
    damped_factor,
    gradient_ascent,
    irls_gaussian_reference,
    newton_maximize,
    standard_errors,
)
from glmfab.simulate import simulate


def quadratic(center, A):
    center = np.asarray(center, dtype=float)
    A = np.asarray(A, dtype=float)

    def obj(x, level=Level.FGH):
        d = np.asarray(x, dtype=float) - center
        f = float(-0.5 * d @ A @ d)
        level = Level.coerce(level)
        g = -A @ d if level >= Level.FG else None
        h = -A if level == Level.FGH else None
        return EvalBundle(f, g, h, level)

    return obj


def _logistic(seed=0, n=1000, k=5):
    ds, truth = simulate("binomial-logit", n, k, seed)
    X, y = ds.values[:, :k], ds.column("y")
    return Objective(RegressionData(X, y), Family1("binomial-logit", 1)), truth


def test_quadratic_one_undamped_step():
    # f = -(b - 3)^2
    res = newton_maximize(quadratic([3.0], [[2.0]]), init=[0.0])
    np.testing.assert_allclose(res.x, [3.0], rtol=0, atol=1e-15)
    assert res.iterations == 1 and not res.damping_used and res.converged


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 6))
def test_quadratic_exact_in_one_step(seed, k):
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(k, k))
    A = B @ B.T + np.eye(k)
    c = rng.normal(size=k)
    res = newton_maximize(quadratic(c, A), init=np.zeros(k))
    np.testing.assert_allclose(res.x, c, rtol=1e-9, atol=1e-9)
    assert res.iterations <= 2


def test_logistic_converges_without_damping_and_matches_gradient_ascent():
    obj, _ = _logistic()
    res = newton_maximize(obj)
    assert res.converged and res.grad_norm < 1e-8
    assert not res.damping_used and res.certificate.certified
    ref = gradient_ascent(obj, np.zeros(obj.dim))
    np.testing.assert_allclose(res.x, ref, rtol=0, atol=1e-6)


def test_monotone_ascent_and_stationarity():
    obj, _ = _logistic(seed=3, n=500, k=4)
    res = newton_maximize(obj)
    trace = np.array(res.loglik_trace)
    assert np.all(np.diff(trace) > 0)
    g = fd_gradient(lambda t: obj(t, Level.F).f, res.x)
    assert np.max(np.abs(g)) <= 1e-5 * (1 + abs(res.loglik))


@pytest.mark.parametrize("name", ["poisson-log", "exponential-log", "geometric-logit", "binomial-probit", "binomial-cloglog"])
def test_concave_families_never_damp(name):
    ds, _ = simulate(name, 800, 3, 4)
    obj = Objective(RegressionData(ds.values[:, :3], ds.column("y")), name)
    res = newton_maximize(obj)
    assert res.converged and not res.damping_used
    assert res.iterations <= 20


def test_gaussian_constant_dispersion_equals_ols():
    ds, _ = simulate("gaussian-identity-log", 1000, 4, 5)
    X, y = ds.values[:, :4], ds.column("y")
    res = newton_maximize(Objective(RegressionData(X, y), "gaussian-identity-log"))
    assert res.converged
    np.testing.assert_allclose(res.x[:4], irls_gaussian_reference(X, y), rtol=0, atol=1e-8)
    # the ML variance is RSS / N
    r = y - X @ res.x[:4]
    np.testing.assert_allclose(np.exp(res.x[4]), r @ r / y.size, rtol=1e-8)


def test_gaussian_varying_dispersion_close_to_two_stage():
    ds, _ = simulate("gaussian-identity-log", 2000, 3, 6)
    X, y = ds.values[:, :3], ds.column("y")
    res = newton_maximize(Objective(RegressionData(X, y, X), "gaussian-identity-log"))
    assert res.converged
    ols = irls_gaussian_reference(X, y)
    assert np.max(np.abs(res.x[:3] - ols)) <= 3 * np.max(res.std_errors[:3])


def test_indefinite_hessian_triggers_damping():
    def saddle(x, level=Level.FGH):
        x = np.asarray(x, dtype=float)
        # concave in x0, convex near origin in x1 but bounded: f = -x0^2 - x1^4 + x1^2 / 2
        f = float(-x[0] ** 2 - x[1] ** 4 + 0.5 * x[1] ** 2)
        g = np.array([-2 * x[0], -4 * x[1] ** 3 + x[1]])
        h = np.array([[-2.0, 0.0], [0.0, -12 * x[1] ** 2 + 1.0]])
        return EvalBundle(f, g, h, Level.FGH)

    res = newton_maximize(saddle, init=[1.0, 0.1])
    assert res.damping_used and res.converged
    np.testing.assert_allclose(np.abs(res.x), [0.0, 0.5], atol=1e-8)


def test_damped_factor_escalation():
    H = np.diag([-1.0, 0.5])
    chol, lam = damped_factor(H, ridge=1e-6)
    k = np.log(lam / 1e-6) / np.log(4.0)
    assert lam > 0.5 and abs(k - round(k)) < 1e-9
    assert damped_factor(-np.eye(2))[1] == 0.0
    with pytest.raises(NumericalError):
        damped_factor(np.diag([-1.0, 1e6]), ridge=1e-6, max_steps=3)


def test_errors_on_non_finite_objective():
    def nan_init(x, level=Level.FGH):
        return EvalBundle(float("nan"), np.zeros(1), np.zeros((1, 1)), Level.FGH)

    with pytest.raises(NumericalError):
        newton_maximize(nan_init, init=[0.0])

    def cliff(x, level=Level.FGH):
        x = np.asarray(x, dtype=float)
        if x[0] != 0.0:
            raise DomainError("outside support")
        return EvalBundle(0.0, np.array([1.0]), np.array([[-1.0]]), Level.FGH)

    with pytest.raises(NumericalError, match="any trial step"):
        newton_maximize(cliff, init=[0.0])


def test_no_improvement_stop_is_reported():
    # gradient claims ascent, but f never increases: a mis-specified objective
    def flat(x, level=Level.FGH):
        return EvalBundle(0.0, np.array([1.0]), np.array([[-1.0]]), Level.FGH)

    res = newton_maximize(flat, init=[0.0], config=NewtonConfig(max_halvings=5))
    assert res.stop_reason == "no_improvement" and not res.converged


def test_max_iter_respected():
    obj, _ = _logistic(seed=1, n=300, k=3)
    res = newton_maximize(obj, config=NewtonConfig(max_iter=1))
    assert res.iterations == 1 and res.stop_reason == "max_iter"
    assert res.converged == (res.grad_norm <= 1e-8)


def test_config_validation():
    with pytest.raises(ValueError):
        NewtonConfig(grad_tol=0.0)


def test_irls_reference_examples():
    np.testing.assert_allclose(irls_gaussian_reference([[1.0], [1.0]], [1.0, 3.0]), [2.0])
    Q, _ = np.linalg.qr(np.random.default_rng(7).normal(size=(10, 3)))
    y = np.arange(10.0)
    np.testing.assert_allclose(irls_gaussian_reference(Q, y), Q.T @ y, atol=1e-12)
    rng = np.random.default_rng(8)
    X, y = rng.normal(size=(50, 4)), rng.normal(size=50)
    b = irls_gaussian_reference(X, y)
    assert np.max(np.abs(X.T @ (y - X @ b))) <= 1e-8
    with pytest.raises(DomainError):
        irls_gaussian_reference(np.ones((5, 2)), np.ones(5))


def test_standard_errors():
    np.testing.assert_allclose(standard_errors(-np.diag([4.0, 0.25])), [0.5, 2.0])
    assert standard_errors(np.eye(2)) is None


def test_recovery_z_scores_are_calibrated():
    # across many data seeds the MLE z-scores against the simulated truth
    # should look standard normal; this is the population-level version of
    # the single-seed "within 3 standard errors" check
    z = []
    for seed in range(1, 201):
        obj, truth = _logistic(seed=seed)
        res = newton_maximize(obj)
        z.append((res.x - np.array(truth["beta"])) / res.std_errors)
    z = np.concatenate(z)
    assert abs(z.mean()) <= 4 / np.sqrt(z.size)
    assert 0.9 <= z.std() <= 1.1
    # P(|Z| > 3) = 0.0027; allow a generous binomial band
    assert np.mean(np.abs(z) > 3) <= 0.0027 + 4 * np.sqrt(0.0027 / z.size)
