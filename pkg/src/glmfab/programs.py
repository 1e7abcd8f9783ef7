"""Runnable versions of the worked examples: Bayesian logistic regression,
hierarchical shrinkage, varying-dispersion Gaussian regression and geometric
regression.

Every program simulates seeded data, fits it, and returns a report whose
``checks`` list records each property it asserts.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .base1 import Family1
from .base2 import Family2
from .expander import Objective, RegressionData
from .optimize import NewtonConfig, irls_gaussian_reference, newton_maximize
from .simulate import simulate
from .sns import SnsConfig, run_chain

__all__ = [
    "threads_from_env",
    "example_bayes_logistic",
    "example_hb_shrinkage",
    "hb_pool_groups",
    "example_varying_dispersion",
    "example_geometric",
    "shrinkage_slope",
    "PROGRAMS",
]


def threads_from_env() -> int:
    try:
        return max(1, int(os.environ.get("GLMFAB_THREADS", "1")))
    except ValueError:
        return 1


def _check(name: str, passed: bool, value, threshold) -> dict:
    return {"name": name, "passed": bool(passed), "value": value, "threshold": threshold}


def _split_xy(ds):
    k = sum(c.startswith("x") for c in ds.columns)
    return ds.values[:, :k], ds.column("y")


def _max_abs_z(est, truth, se) -> float:
    return float(np.max(np.abs((np.asarray(est) - np.asarray(truth)) / np.asarray(se))))


def _post_burn_mean(objective, dim: int, nsmp: int, rnd: bool = False, seed: int = 0) -> np.ndarray:
    return run_chain(objective, np.zeros(dim), SnsConfig(rnd=rnd, nsmp=nsmp, seed=seed)).mean()


def example_bayes_logistic(seed: int = 1, n: int = 1000, k: int = 5, nsmp: int = 100, prior_sd: float = 1000.0) -> dict:
    ds, truth = simulate("binomial-logit", n, k, seed)
    X, y = _split_xy(ds)
    data = RegressionData(X, y)
    family = Family1("binomial-logit", 1)
    mle = newton_maximize(Objective(data, family))
    post = Objective(data, family, prior_mean=0.0, prior_sd=prior_sd)
    beta_sns = _post_burn_mean(post, k, nsmp)
    diff = float(np.max(np.abs(beta_sns - mle.x)))
    z = _max_abs_z(mle.x, truth["beta"], mle.std_errors)
    return {
        "program": "example-bayes-logistic",
        "seed": seed,
        "truth": truth["beta"],
        "beta_mle": mle.x,
        "beta_sns": beta_sns,
        "std_errors": mle.std_errors,
        "checks": [
            _check("mle_grad_norm", mle.grad_norm <= 1e-8, mle.grad_norm, 1e-8),
            _check("mle_vs_sns_max_abs_diff", diff <= 1e-6, diff, 1e-6),
            _check("mle_recovery_max_abs_z", z <= 3.0, z, 3.0),
        ],
    }


def shrinkage_slope(unpooled: np.ndarray, pooled: np.ndarray) -> float:
    """Least-squares slope of ``pooled`` regressed on ``unpooled`` (with intercept)."""
    a = unpooled - unpooled.mean()
    return float(a @ (pooled - pooled.mean()) / (a @ a))


def hb_pool_groups(groups: list[RegressionData], prior_mean, prior_sd, nsmp: int = 100, threads: int | None = None):
    """Unpooled (per-group MLE) and pooled (shared normal prior) estimates per group.

    Groups are conditionally independent given the prior, so they are fitted
    in parallel with up to ``threads`` workers; results keep group order.
    """
    family = Family1("binomial-logit", 1)
    threads = threads or threads_from_env()

    def one(data: RegressionData):
        k = data.n_beta
        unpooled = newton_maximize(Objective(data, family)).x
        pooled = _post_burn_mean(Objective(data, family, prior_mean=prior_mean, prior_sd=prior_sd), k, nsmp)
        return unpooled, pooled

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(one, groups))
    else:
        out = [one(g) for g in groups]
    return np.array([o[0] for o in out]), np.array([o[1] for o in out])


def example_hb_shrinkage(
    seed: int = 1,
    groups: int = 20,
    n: int = 1000,
    k: int = 5,
    nsmp: int = 100,
    threads: int | None = None,
    grouped_data: tuple[list[RegressionData], np.ndarray, np.ndarray] | None = None,
) -> dict:
    """Hierarchical logistic regression with frozen hyperparameters.

    ``grouped_data`` may supply ``(groups, prior_mean, prior_sd)`` instead of
    simulating.
    """
    truth = None
    if grouped_data is None:
        rng = np.random.default_rng(seed)
        mu = rng.uniform(-0.5, 0.5, size=k)
        sd = rng.uniform(0.5, 1.0, size=k)
        beta = np.empty((groups, k))
        for j in range(k):
            beta[:, j] = rng.normal(mu[j], sd[j], size=groups)
        datasets = []
        for g in range(groups):
            X = rng.uniform(-0.5, 0.5, size=(n, k))
            y = rng.binomial(1, 1.0 / (1.0 + np.exp(-X @ beta[g])))
            datasets.append(RegressionData(X, y))
        truth = {"mu": mu, "sd": sd, "beta": beta}
    else:
        datasets, mu, sd = grouped_data
        k = datasets[0].n_beta
    unpooled, pooled = hb_pool_groups(datasets, mu, sd, nsmp, threads)

    var_u = unpooled.var(axis=0, ddof=1)
    var_p = pooled.var(axis=0, ddof=1)
    slopes = [shrinkage_slope(unpooled[:, j], pooled[:, j]) for j in range(k)]
    overall = shrinkage_slope(unpooled.ravel(), pooled.ravel())
    checks = [
        _check(f"pooled_variance_le_unpooled[{j}]", var_p[j] <= var_u[j], [float(var_p[j]), float(var_u[j])], "<=")
        for j in range(k)
    ]
    checks += [_check(f"shrinkage_slope[{j}]", 0.0 < s < 1.0, s, "(0, 1)") for j, s in enumerate(slopes)]
    checks.append(_check("shrinkage_slope_all", 0.0 < overall < 1.0, overall, "(0, 1)"))
    return {
        "program": "example-hb-shrinkage",
        "seed": seed,
        "groups": len(datasets),
        "prior_mean": mu,
        "prior_sd": sd,
        "unpooled": unpooled,
        "pooled": pooled,
        "truth": truth,
        "checks": checks,
    }


def example_varying_dispersion(seed: int = 1, n: int = 1000, k: int = 5, n_large: int = 5000, nsmp: int = 100) -> dict:
    family = Family2("gaussian-identity-log")
    ds, truth = simulate(family.name, n, k, seed)
    X, y = _split_xy(ds)

    # constant dispersion: Z defaults to an intercept column
    cd_obj = Objective(RegressionData(X, y), family)
    cd = newton_maximize(cd_obj)
    cd_sns = _post_burn_mean(cd_obj, k + 1, nsmp)
    ols = irls_gaussian_reference(X, y)
    resid = y - X @ ols
    sigma_ols = float(np.sqrt(resid @ resid / (n - k)))
    sigma_ml = float(np.sqrt(np.exp(cd.x[k])))
    cd_diff = float(np.max(np.abs(cd.x[:k] - ols)))
    cd_sns_diff = float(np.max(np.abs(cd_sns[:k] - ols)))

    vd = newton_maximize(Objective(RegressionData(X, y, X), family))

    ds_l, truth_l = simulate(family.name, n_large, k, seed)
    Xl, yl = _split_xy(ds_l)
    vd_l = newton_maximize(Objective(RegressionData(Xl, yl, Xl), family))
    z = _max_abs_z(vd_l.x, truth_l["beta"] + truth_l["gamma"], vd_l.std_errors)

    return {
        "program": "example-varying-dispersion",
        "seed": seed,
        "constant_dispersion": {
            "beta_ols": ols,
            "beta_joint": cd.x[:k],
            "beta_sns": cd_sns[:k],
            "sigma_ols": sigma_ols,
            "sigma_ml": sigma_ml,
        },
        "varying_dispersion": {
            "truth_beta": truth["beta"],
            "truth_gamma": truth["gamma"],
            "beta": vd.x[:k],
            "gamma": vd.x[k:],
            "iterations": vd.iterations,
            "damping_used": vd.damping_used,
        },
        "varying_dispersion_large": {"n": n_large, "coefficients": vd_l.x, "std_errors": vd_l.std_errors},
        "checks": [
            _check("cd_joint_vs_ols_max_abs_diff", cd_diff <= 1e-8, cd_diff, 1e-8),
            _check("cd_sns_vs_ols_max_abs_diff", cd_sns_diff <= 1e-8, cd_sns_diff, 1e-8),
            _check("vd_grad_norm", vd.grad_norm <= 1e-8, vd.grad_norm, 1e-8),
            _check("vd_large_grad_norm", vd_l.grad_norm <= 1e-8, vd_l.grad_norm, 1e-8),
            _check("vd_large_recovery_max_abs_z", z <= 3.0, z, 3.0),
        ],
    }


def example_geometric(seed: int = 1, n: int = 1000, k: int = 5, n_large: int = 20000) -> dict:
    family = Family1("geometric-logit")
    ds, truth = simulate(family.name, n, k, seed)
    X, y = _split_xy(ds)
    fit = newton_maximize(Objective(RegressionData(X, y), family), None, NewtonConfig())
    ds_l, truth_l = simulate(family.name, n_large, k, seed)
    Xl, yl = _split_xy(ds_l)
    fit_l = newton_maximize(Objective(RegressionData(Xl, yl), family))
    z = _max_abs_z(fit_l.x, truth_l["beta"], fit_l.std_errors)
    return {
        "program": "example-geometric",
        "seed": seed,
        "truth": truth["beta"],
        "beta_est": fit.x,
        "iterations": fit.iterations,
        "large": {"n": n_large, "truth": truth_l["beta"], "beta_est": fit_l.x, "std_errors": fit_l.std_errors},
        "checks": [
            _check("iterations", fit.iterations <= 20, fit.iterations, 20),
            _check("grad_norm", fit.grad_norm <= 1e-8, fit.grad_norm, 1e-8),
            _check("large_grad_norm", fit_l.grad_norm <= 1e-8, fit_l.grad_norm, 1e-8),
            _check("large_recovery_max_abs_z", z <= 3.0, z, 3.0),
        ],
    }


PROGRAMS = {
    "example-bayes-logistic": example_bayes_logistic,
    "example-hb-shrinkage": example_hb_shrinkage,
    "example-varying-dispersion": example_varying_dispersion,
    "example-geometric": example_geometric,
}
