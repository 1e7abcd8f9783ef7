"""Lift base-function derivatives to coefficient space.

For a one-slot model with linear predictor ``u = X beta``::

    L = sum_n f_n,   G = X^T g,   H = X^T diag(h) X

and for two slots (mean ``X beta``, dispersion ``Z gamma``) the Hessian is
assembled from the three base Hessian columns as blocks ``X^T D1 X``,
``Z^T D2 Z`` and ``X^T D3 Z``.  The diagonal matrices are never formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._core import DimensionError, DomainError, Level
from .base1 import FAMILIES1, Family1, eval_base1
from .base2 import Family2, eval_base2
from .numerics import Matrix, as_array, mat_vec, xt_diag_x, xt_diag_z

__all__ = [
    "EvalBundle",
    "Coefficients",
    "RegressionData",
    "expand_1par",
    "expand_2par",
    "merge",
    "zero_bundle",
    "gaussian_log_prior",
    "Objective",
]

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class EvalBundle:
    """Log-density value with optional gradient and Hessian."""

    f: float
    g: np.ndarray | None = None
    h: np.ndarray | None = None
    level: Level = Level.F

    def __post_init__(self):
        level = Level.coerce(self.level)
        object.__setattr__(self, "level", level)
        if (self.g is not None) != (level >= Level.FG):
            raise DimensionError(f"gradient presence does not match level {level.name}")
        if (self.h is not None) != (level == Level.FGH):
            raise DimensionError(f"Hessian presence does not match level {level.name}")

    @property
    def dim(self) -> int | None:
        return None if self.g is None else self.g.size


@dataclass(frozen=True)
class Coefficients:
    """Mean-slot coefficients ``beta`` and optional dispersion-slot ``gamma``.

    Packed order is ``(beta, gamma)``.
    """

    beta: np.ndarray
    gamma: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "beta", np.atleast_1d(np.asarray(self.beta, dtype=float)))
        if self.gamma is not None:
            object.__setattr__(self, "gamma", np.atleast_1d(np.asarray(self.gamma, dtype=float)))

    @property
    def vector(self) -> np.ndarray:
        if self.gamma is None:
            return self.beta.copy()
        return np.concatenate((self.beta, self.gamma))

    @classmethod
    def from_vector(cls, x, n_beta: int, two_slot: bool = False) -> "Coefficients":
        x = np.asarray(x, dtype=float)
        if not two_slot:
            if x.size != n_beta:
                raise DimensionError(f"expected {n_beta} coefficients, got {x.size}")
            return cls(x.copy())
        return cls(x[:n_beta].copy(), x[n_beta:].copy())


@dataclass(frozen=True)
class RegressionData:
    """Design matrices and response.

    ``Z`` is the dispersion design; two-slot evaluation defaults it to a single
    column of ones (constant dispersion).
    """

    X: Matrix | np.ndarray
    y: np.ndarray
    Z: Matrix | np.ndarray | None = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).reshape(-1)
        object.__setattr__(self, "y", y)
        n = as_array(self.X).shape[0]
        if n != y.size:
            raise DimensionError(f"X has {n} rows but y has length {y.size}")
        if self.Z is not None and as_array(self.Z).shape[0] != n:
            raise DimensionError(f"Z has {as_array(self.Z).shape[0]} rows, X has {n}")

    @property
    def n_obs(self) -> int:
        return self.y.size

    @property
    def n_beta(self) -> int:
        return as_array(self.X).shape[1]

    @property
    def n_gamma(self) -> int:
        return 1 if self.Z is None else as_array(self.Z).shape[1]

    def dispersion_design(self) -> np.ndarray:
        if self.Z is None:
            return np.ones((self.n_obs, 1))
        return as_array(self.Z)


def _beta_of(beta, k: int) -> np.ndarray:
    if isinstance(beta, Coefficients):
        if beta.gamma is not None:
            raise DimensionError("one-slot model takes no dispersion coefficients")
        beta = beta.beta
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    if beta.size != k:
        raise DimensionError(f"expected {k} coefficients, got {beta.size}")
    return beta


def expand_1par(beta, data: RegressionData, family: Family1 | str, level: Level | int = Level.FGH) -> EvalBundle:
    level = Level.coerce(level)
    X = as_array(data.X)
    b = _beta_of(beta, X.shape[1])
    base = eval_base1(family, mat_vec(X, b), data.y, level)
    f = float(np.sum(base.f))
    if level == Level.F:
        return EvalBundle(f, level=level)
    g = X.T @ base.g
    if level == Level.FG:
        return EvalBundle(f, g, level=level)
    return EvalBundle(f, g, xt_diag_x(X, base.h), level)


def expand_2par(
    coeff,
    data: RegressionData,
    family: Family2 | str,
    level: Level | int = Level.FGH,
    block_diag: bool = False,
) -> EvalBundle:
    """Two-slot expander; ``block_diag`` zeroes the mean/dispersion cross blocks."""
    level = Level.coerce(level)
    X = as_array(data.X)
    Z = data.dispersion_design()
    k1, k2 = X.shape[1], Z.shape[1]
    if isinstance(coeff, Coefficients):
        if coeff.gamma is None:
            raise DimensionError("two-slot model needs dispersion coefficients")
        beta, gamma = coeff.beta, coeff.gamma
    else:
        coeff = np.asarray(coeff, dtype=float).reshape(-1)
        beta, gamma = coeff[:k1], coeff[k1:]
    if beta.size != k1 or gamma.size != k2:
        raise DimensionError(f"expected {k1}+{k2} coefficients, got {beta.size}+{gamma.size}")

    base = eval_base2(family, mat_vec(X, beta), mat_vec(Z, gamma), data.y, level)
    f = float(np.sum(base.f))
    if level == Level.F:
        return EvalBundle(f, level=level)
    g = np.concatenate((X.T @ base.g[:, 0], Z.T @ base.g[:, 1]))
    if level == Level.FG:
        return EvalBundle(f, g, level=level)
    h = np.zeros((k1 + k2, k1 + k2))
    h[:k1, :k1] = xt_diag_x(X, base.h[:, 0])
    h[k1:, k1:] = xt_diag_x(Z, base.h[:, 1])
    if not block_diag:
        cross = xt_diag_z(X, base.h[:, 2], Z)
        h[:k1, k1:] = cross
        h[k1:, :k1] = cross.T
    return EvalBundle(f, g, h, level)


def zero_bundle(dim: int, level: Level | int = Level.FGH) -> EvalBundle:
    level = Level.coerce(level)
    g = np.zeros(dim) if level >= Level.FG else None
    h = np.zeros((dim, dim)) if level == Level.FGH else None
    return EvalBundle(0.0, g, h, level)


def merge(a: EvalBundle, b: EvalBundle, level: Level | int | None = None) -> EvalBundle:
    """Add two bundles (e.g. log-likelihood and log-prior) up to ``level``.

    ``level`` defaults to the lower of the two input levels.
    """
    level = min(a.level, b.level) if level is None else Level.coerce(level)
    if a.level < level or b.level < level:
        raise DimensionError(
            f"cannot merge at level {level.name}: inputs are {a.level.name} and {b.level.name}"
        )
    f = a.f + b.f
    if level == Level.F:
        return EvalBundle(f, level=level)
    if a.g.shape != b.g.shape:
        raise DimensionError(f"gradient shapes differ: {a.g.shape} vs {b.g.shape}")
    g = a.g + b.g
    if level == Level.FG:
        return EvalBundle(f, g, level=level)
    return EvalBundle(f, g, a.h + b.h, level)


def gaussian_log_prior(beta, mu=0.0, sd=1.0, level: Level | int = Level.FGH) -> EvalBundle:
    """Independent normal log-prior on each coefficient, normalizing constant included."""
    level = Level.coerce(level)
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    k = beta.size
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (k,))
    sd = np.broadcast_to(np.asarray(sd, dtype=float), (k,))
    if not np.all(sd > 0):
        raise DomainError("prior standard deviations must be positive")
    z = (beta - mu) / sd
    f = float(-0.5 * np.sum(z * z) - np.sum(np.log(sd)) - 0.5 * k * _LOG_2PI)
    if level == Level.F:
        return EvalBundle(f, level=level)
    prec = 1.0 / (sd * sd)
    g = -(beta - mu) * prec
    if level == Level.FG:
        return EvalBundle(f, g, level=level)
    return EvalBundle(f, g, np.diag(-prec), level)


@dataclass(frozen=True)
class Objective:
    """Log-likelihood (plus optional normal prior) as one callable.

    ``objective(x, level)`` maps a packed coefficient vector to an
    :class:`EvalBundle`.  This is what the optimizer and sampler consume.
    A string family is resolved against both catalogs.
    """

    data: RegressionData
    family: Family1 | Family2
    prior_mean: float | np.ndarray | None = None
    prior_sd: float | np.ndarray | None = None
    block_diag: bool = False
    two_slot: bool = field(init=False)

    def __post_init__(self):
        family = self.family
        if isinstance(family, str):
            family = Family1(family) if family in FAMILIES1 else Family2(family)
            object.__setattr__(self, "family", family)
        two = isinstance(family, Family2)
        object.__setattr__(self, "two_slot", two)
        if not two and self.data.Z is not None:
            raise DimensionError("one-parameter family cannot take a dispersion design")
        if self.prior_sd is None and self.prior_mean is not None:
            raise DomainError("prior mean given without prior sd")

    @property
    def n_beta(self) -> int:
        return self.data.n_beta

    @property
    def n_gamma(self) -> int:
        return self.data.n_gamma if self.two_slot else 0

    @property
    def dim(self) -> int:
        return self.n_beta + self.n_gamma

    def split(self, x) -> Coefficients:
        return Coefficients.from_vector(x, self.n_beta, self.two_slot)

    def loglik(self, x, level: Level | int = Level.FGH) -> EvalBundle:
        if self.two_slot:
            return expand_2par(x, self.data, self.family, level, self.block_diag)
        return expand_1par(x, self.data, self.family, level)

    def __call__(self, x, level: Level | int = Level.FGH) -> EvalBundle:
        x = np.asarray(x, dtype=float).reshape(-1)
        out = self.loglik(x, level)
        if self.prior_sd is None:
            return out
        mu = 0.0 if self.prior_mean is None else self.prior_mean
        return merge(out, gaussian_log_prior(x, mu, self.prior_sd, level), level)
