"""Two-parameter base distributions.

``u1`` drives the mean and ``u2`` the dispersion through a log link.  The
Hessian comes back as three columns ordered ``(d2f/du1^2, d2f/du2^2,
d2f/du1du2)``, which is the order the two-slot expander consumes them in.

Omitted constants per family:

* gaussian-identity-log: ``-log(2 pi) / 2``
* inverse-gaussian-log-log: ``-log(2 pi y^3) / 2``
* gamma-log-log: none (every term involves the dispersion)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._core import DimensionError, DomainError, Level
from .numerics import digamma, log_gamma, trigamma

__all__ = ["BaseEval2", "Family2", "FAMILIES2", "eval_base2", "omitted_constant2"]

FAMILIES2 = (
    "gaussian-identity-log",
    "inverse-gaussian-log-log",
    "gamma-log-log",
)


@dataclass(frozen=True)
class BaseEval2:
    f: np.ndarray
    g: np.ndarray | None  # (N, 2)
    h: np.ndarray | None  # (N, 3): 11, 22, 12
    level: Level


@dataclass(frozen=True)
class Family2:
    name: str

    def __post_init__(self):
        if self.name not in FAMILIES2:
            raise DomainError(f"unknown two-parameter family {self.name!r}")


def _gaussian(u1, u2, y, level):
    w = np.exp(-u2)
    r = y - u1
    wr2 = w * r * r
    f = -0.5 * (u2 + wr2)
    if level < Level.FG:
        return f, None, None
    g = np.column_stack((w * r, 0.5 * wr2 - 0.5))
    if level < Level.FGH:
        return f, g, None
    h = np.column_stack((-w, -0.5 * wr2, -w * r))
    return f, g, h


def _inverse_gaussian(u1, u2, y, level):
    w = np.exp(-u2)
    a = np.exp(-u1)
    ya = y * a
    # (y - mu)^2 / (2 y mu^2) with mu = exp(u1)
    q = 0.5 * (ya * a - 2.0 * a + 1.0 / y)
    dq = a - ya * a
    f = -0.5 * u2 - w * q
    if level < Level.FG:
        return f, None, None
    g = np.column_stack((-w * dq, w * q - 0.5))
    if level < Level.FGH:
        return f, g, None
    d2q = 2.0 * ya * a - a
    h = np.column_stack((-w * d2q, -w * q, w * dq))
    return f, g, h


def _gamma(u1, u2, y, level):
    nu = np.exp(-u2)  # shape = 1 / dispersion
    ya = y * np.exp(-u1)
    log_y = np.log(y)
    core = -u1 - ya
    log_nu = -u2
    f = nu * core - log_gamma(nu) + nu * log_nu + (nu - 1.0) * log_y
    if level < Level.FG:
        return f, None, None
    # df/dnu; d nu / d u2 = -nu
    dnu = core - digamma(nu) + log_nu + 1.0 + log_y
    g = np.column_stack((nu * (ya - 1.0), -nu * dnu))
    if level < Level.FGH:
        return f, g, None
    h22 = nu * dnu + nu - nu * nu * trigamma(nu)
    h = np.column_stack((-nu * ya, h22, nu * (1.0 - ya)))
    return f, g, h


_KERNELS = {
    "gaussian-identity-log": _gaussian,
    "inverse-gaussian-log-log": _inverse_gaussian,
    "gamma-log-log": _gamma,
}


def eval_base2(family: Family2 | str, u1, u2, y, level: Level | int = Level.FGH) -> BaseEval2:
    """Evaluate a two-parameter base function.

    Gaussian accepts any finite ``y``; inverse-Gaussian and gamma need
    ``y > 0``.  Out-of-domain responses and non-finite predictors raise
    :class:`DomainError` carrying the observation index.
    """
    if isinstance(family, str):
        family = Family2(family)
    level = Level.coerce(level)
    u1 = np.asarray(u1, dtype=float).reshape(-1)
    u2 = np.asarray(u2, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if not (u1.size == u2.size == y.size):
        raise DimensionError(f"length mismatch: u1={u1.size}, u2={u2.size}, y={y.size}")
    bad = np.flatnonzero(~(np.isfinite(u1) & np.isfinite(u2)))
    if bad.size:
        raise DomainError(f"linear predictor is not finite at observation {bad[0]}", index=int(bad[0]))
    if family.name == "gaussian-identity-log":
        bad = np.flatnonzero(~np.isfinite(y))
        what = "finite"
    else:
        bad = np.flatnonzero(~((y > 0) & np.isfinite(y)))
        what = "positive and finite"
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"{family.name}: response at observation {i} ({y[i]!r}) must be {what}", index=i)
    f, g, h = _KERNELS[family.name](u1, u2, y, level)
    return BaseEval2(f=f, g=g, h=h, level=level)


def omitted_constant2(family: Family2 | str, y) -> np.ndarray:
    if isinstance(family, str):
        family = Family2(family)
    y = np.asarray(y, dtype=float).reshape(-1)
    if family.name == "gaussian-identity-log":
        return np.full(y.shape, -0.5 * np.log(2.0 * np.pi))
    if family.name == "inverse-gaussian-log-log":
        return -0.5 * np.log(2.0 * np.pi * y**3)
    return np.zeros_like(y)
