"""Synthetic data from each family's generative model.

Covariates and coefficients are drawn uniformly on [-0.5, 0.5], in that
order, from a seeded NumPy generator.  Two-parameter families put the
dispersion on the log scale: Gaussian variance is ``exp(Z gamma)``, gamma and
inverse-Gaussian dispersion is ``exp(Z gamma)`` with ``Z = X`` (varying) or a
single intercept (constant).
"""

from __future__ import annotations

import numpy as np
from scipy import special as sps

from ._core import SpecError
from .base1 import FAMILIES1
from .base2 import FAMILIES2
from .dataset import Dataset

__all__ = ["simulate"]


def _mean_prob(family: str, u: np.ndarray) -> np.ndarray:
    link = family.split("-", 1)[1]
    if link == "logit":
        return sps.expit(u)
    if link == "probit":
        return sps.ndtr(u)
    if link == "cauchit":
        return 0.5 + np.arctan(u) / np.pi
    return -np.expm1(-np.exp(u))  # cloglog


def simulate(
    family: str,
    n: int,
    k: int,
    seed: int,
    beta=None,
    gamma=None,
    trials: int = 1,
    dispersion: str = "varying",
) -> tuple[Dataset, dict]:
    """Draw ``n`` observations with ``k`` covariates.

    Returns the dataset (columns ``x1..xk``, ``trials`` for binomial, ``y``)
    and a truth record holding the coefficients used.
    """
    if family not in FAMILIES1 + FAMILIES2:
        raise SpecError(f"unknown family {family!r}")
    if n < 1 or k < 1:
        raise SpecError("n and k must be positive")
    if dispersion not in ("varying", "constant"):
        raise SpecError(f"dispersion must be 'varying' or 'constant', got {dispersion!r}")
    rng = np.random.default_rng(seed)
    X = rng.uniform(-0.5, 0.5, size=(n, k))
    beta = rng.uniform(-0.5, 0.5, size=k) if beta is None else np.asarray(beta, dtype=float)
    if beta.size != k:
        raise SpecError(f"beta has {beta.size} entries, expected {k}")
    u = X @ beta
    columns = [f"x{j + 1}" for j in range(k)]
    extra = []
    truth = {"family": family, "n": n, "k": k, "seed": seed, "beta": beta.tolist(), "gamma": None}

    if family in FAMILIES1:
        if family.startswith("binomial-"):
            if trials < 1:
                raise SpecError("trials must be >= 1")
            y = rng.binomial(trials, _mean_prob(family, u))
            columns.append("trials")
            extra.append(np.full(n, float(trials)))
            truth["trials"] = trials
        elif family == "poisson-log":
            y = rng.poisson(np.exp(u))
        elif family == "exponential-log":
            y = rng.exponential(np.exp(u))
        else:  # geometric-logit: failures before first success
            y = rng.geometric(sps.expit(u)) - 1
    else:
        k2 = k if dispersion == "varying" else 1
        if gamma is None:
            gamma = rng.uniform(-0.5, 0.5, size=k2)
        gamma = np.asarray(gamma, dtype=float).reshape(-1)
        if gamma.size != k2:
            raise SpecError(f"gamma has {gamma.size} entries, expected {k2}")
        u2 = X @ gamma if dispersion == "varying" else np.full(n, gamma[0])
        truth["gamma"] = gamma.tolist()
        truth["dispersion"] = dispersion
        if family == "gaussian-identity-log":
            y = rng.normal(u, np.exp(0.5 * u2))
        elif family == "inverse-gaussian-log-log":
            y = rng.wald(np.exp(u), np.exp(-u2))
        else:
            shape = np.exp(-u2)
            y = rng.gamma(shape, np.exp(u) / shape)

    columns.append("y")
    values = np.column_stack([X, *extra, np.asarray(y, dtype=float)])
    return Dataset(columns, values), truth
