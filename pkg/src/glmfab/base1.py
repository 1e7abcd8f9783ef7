"""One-parameter base distributions in linear-predictor space.

Each base function maps a vector of linear predictors ``u`` and responses
``y`` to per-observation log-densities ``f`` and their first and second
derivatives with respect to ``u``.  Terms that do not depend on ``u`` are
dropped; :func:`omitted_constant` returns them for callers who need true
log-likelihood values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special as sps

from ._core import DimensionError, DomainError, Level
from .numerics import (
    log_sigmoid,
    log_std_normal_cdf,
    log_std_normal_pdf,
    sigmoid,
    softplus,
)

__all__ = [
    "BaseEval1",
    "Family1",
    "FAMILIES1",
    "LOG_CONCAVE_1PAR",
    "eval_base1",
    "omitted_constant",
]

FAMILIES1 = (
    "binomial-logit",
    "binomial-probit",
    "binomial-cauchit",
    "binomial-cloglog",
    "poisson-log",
    "exponential-log",
    "geometric-logit",
)

# Catalog knowledge: family/link pairs whose base Hessian is negative everywhere
# on the response domain.  Cauchit is deliberately absent.
LOG_CONCAVE_1PAR = frozenset(
    {
        "binomial-logit",
        "binomial-probit",
        "binomial-cloglog",
        "poisson-log",
        "exponential-log",
        "geometric-logit",
    }
)


@dataclass(frozen=True)
class BaseEval1:
    f: np.ndarray
    g: np.ndarray | None
    h: np.ndarray | None
    level: Level


@dataclass(frozen=True)
class Family1:
    """A one-parameter family with its fixed arguments.

    ``trials`` is only meaningful for the binomial families; a scalar is
    broadcast over all observations.  It defaults to 1 (Bernoulli).
    """

    name: str
    trials: float | np.ndarray | None = None

    def __post_init__(self):
        if self.name not in FAMILIES1:
            raise DomainError(f"unknown one-parameter family {self.name!r}")
        if self.trials is not None and not self.is_binomial:
            raise DomainError(f"family {self.name!r} takes no trials argument")

    @property
    def is_binomial(self) -> bool:
        return self.name.startswith("binomial-")

    def trials_for(self, n_obs: int) -> np.ndarray:
        n = 1.0 if self.trials is None else self.trials
        n = np.broadcast_to(np.asarray(n, dtype=float), (n_obs,))
        bad = np.flatnonzero(~((n >= 1) & (n == np.round(n))))
        if bad.size:
            raise DomainError(
                f"trials must be integers >= 1 (observation {bad[0]})", index=int(bad[0])
            )
        return n


def _wmul(c: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``c * v`` with ``0 * anything == 0`` (avoids 0 * -inf)."""
    with np.errstate(invalid="ignore"):
        return np.where(c == 0, 0.0, c * v)


# --------------------------------------------------------------------------- #
# Family kernels: (u, y, n, level) -> (f, g, h)
# --------------------------------------------------------------------------- #


def _binomial_logit(u, y, n, level):
    f = y * u - n * softplus(u)
    if level < Level.FG:
        return f, None, None
    p = sigmoid(u)
    g = y - n * p
    if level < Level.FGH:
        return f, g, None
    h = -n * p * sigmoid(-u)
    return f, g, h


def _binomial_probit(u, y, n, level):
    log_p = log_std_normal_cdf(u)
    log_q = log_std_normal_cdf(-u)
    f = _wmul(y, log_p) + _wmul(n - y, log_q)
    if level < Level.FG:
        return f, None, None
    log_pdf = log_std_normal_pdf(u)
    # inverse Mills ratios phi/Phi and phi/(1 - Phi), in log space for the tails
    r_lo = np.exp(log_pdf - log_p)
    r_hi = np.exp(log_pdf - log_q)
    g = y * r_lo - (n - y) * r_hi
    if level < Level.FGH:
        return f, g, None
    h = -y * r_lo * (u + r_lo) - (n - y) * r_hi * (r_hi - u)
    return f, g, h


def _binomial_cauchit(u, y, n, level):
    # G(u) = 1/2 + atan(u)/pi, written so neither tail loses precision
    p = np.arctan2(1.0, -u) / np.pi
    q = np.arctan2(1.0, u) / np.pi
    f = _wmul(y, np.log(p)) + _wmul(n - y, np.log(q))
    if level < Level.FG:
        return f, None, None
    dens = 1.0 / (np.pi * (1.0 + u * u))
    r_lo = dens / p
    r_hi = dens / q
    g = y * r_lo - (n - y) * r_hi
    if level < Level.FGH:
        return f, g, None
    ddens = -2.0 * u * dens / (1.0 + u * u)
    h = y * (ddens / p - r_lo * r_lo) - (n - y) * (ddens / q + r_hi * r_hi)
    return f, g, h


def _binomial_cloglog(u, y, n, level):
    t = np.exp(u)
    # log G = log(1 - exp(-t)),  log(1 - G) = -t
    f = _wmul(y, np.log(-np.expm1(-t))) - (n - y) * t
    if level < Level.FG:
        return f, None, None
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(t > 0, t / np.expm1(t), 1.0)
    g = y * r - (n - y) * t
    if level < Level.FGH:
        return f, g, None
    h = y * r * (1.0 - r - t) - (n - y) * t
    return f, g, h


def _poisson_log(u, y, n, level):
    mu = np.exp(u)
    f = y * u - mu
    if level < Level.FG:
        return f, None, None
    g = y - mu
    if level < Level.FGH:
        return f, g, None
    return f, g, -mu


def _exponential_log(u, y, n, level):
    # mean link: mu = exp(u)
    w = y * np.exp(-u)
    f = -u - w
    if level < Level.FG:
        return f, None, None
    g = w - 1.0
    if level < Level.FGH:
        return f, g, None
    return f, g, -w


def _geometric_logit(u, y, n, level):
    # y counts failures before the first success, success probability sigmoid(u)
    f = -(y * u - (1.0 + y) * log_sigmoid(u))
    if level < Level.FG:
        return f, None, None
    p = sigmoid(u)
    g = 1.0 - (1.0 + y) * p
    if level < Level.FGH:
        return f, g, None
    h = -(1.0 + y) * p * sigmoid(-u)
    return f, g, h


_KERNELS: dict[str, Callable] = {
    "binomial-logit": _binomial_logit,
    "binomial-probit": _binomial_probit,
    "binomial-cauchit": _binomial_cauchit,
    "binomial-cloglog": _binomial_cloglog,
    "poisson-log": _poisson_log,
    "exponential-log": _exponential_log,
    "geometric-logit": _geometric_logit,
}


def _first_bad(mask: np.ndarray) -> int | None:
    idx = np.flatnonzero(mask)
    return int(idx[0]) if idx.size else None


def _check_response(family: Family1, y: np.ndarray, n: np.ndarray | None) -> None:
    integral = y == np.round(y)
    if family.is_binomial:
        bad = ~((y >= 0) & (y <= n) & integral)
        what = "an integer count in [0, trials]"
    elif family.name == "exponential-log":
        bad = ~((y > 0) & np.isfinite(y))
        what = "positive and finite"
    else:
        bad = ~((y >= 0) & integral & np.isfinite(y))
        what = "a non-negative integer"
    i = _first_bad(bad)
    if i is not None:
        raise DomainError(
            f"{family.name}: response at observation {i} ({y[i]!r}) must be {what}", index=i
        )


def eval_base1(family: Family1 | str, u, y, level: Level | int = Level.FGH) -> BaseEval1:
    """Evaluate a one-parameter base function at linear predictors ``u``.

    Parameters
    ----------
    family : Family1 or str
        Family identifier, with trials for the binomial families.
    u, y : array_like
        Linear predictors and responses, one entry per observation.
    level : Level
        ``F``, ``FG`` or ``FGH``; quantities above the level are not computed.
    """
    if isinstance(family, str):
        family = Family1(family)
    level = Level.coerce(level)
    u = np.asarray(u, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if u.size != y.size:
        raise DimensionError(f"u has length {u.size} but y has length {y.size}")
    i = _first_bad(~np.isfinite(u))
    if i is not None:
        raise DomainError(f"linear predictor is not finite at observation {i}", index=i)
    n = family.trials_for(u.size) if family.is_binomial else None
    _check_response(family, y, n)
    f, g, h = _KERNELS[family.name](u, y, n, level)
    return BaseEval1(f=f, g=g, h=h, level=level)


def omitted_constant(family: Family1 | str, y) -> np.ndarray:
    """Per-observation log-density terms dropped because they do not involve ``u``.

    Adding this to ``eval_base1(...).f`` gives the exact log-density.
    """
    if isinstance(family, str):
        family = Family1(family)
    y = np.asarray(y, dtype=float).reshape(-1)
    if family.is_binomial:
        n = family.trials_for(y.size)
        return sps.gammaln(n + 1) - sps.gammaln(y + 1) - sps.gammaln(n - y + 1)
    if family.name == "poisson-log":
        return -sps.gammaln(y + 1)
    return np.zeros_like(y)
