"""Stochastic Newton Sampler.

Metropolis-Hastings where the proposal at ``x`` is the Gaussian fitted from
one Newton step: mean ``x + (-H)^{-1} g`` and covariance ``(-H)^{-1}``.  The
acceptance test uses the reverse proposal fitted at the candidate point.
With ``rnd=False`` a step simply returns the proposal mean, i.e. a full
Newton step.

Standard normals come from Box-Muller over PCG64 uniforms, so a seed fixes
the chain exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import linalg as sla

from ._core import Level, NumericalError
from .expander import Coefficients, EvalBundle
from .numerics import CholeskyFactor, solve
from .optimize import _try_eval, damped_factor

__all__ = ["SnsConfig", "Chain", "NormalStream", "SnsStep", "sns_step", "run_chain"]

_LOG_2PI = np.log(2.0 * np.pi)


class NormalStream:
    """Seeded uniforms and Box-Muller standard normals (PCG64 underneath)."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self) -> float:
        return float(self._gen.random())

    def normals(self, k: int) -> np.ndarray:
        m = (k + 1) // 2
        u1 = self._gen.random(m)
        u2 = self._gen.random(m)
        r = np.sqrt(-2.0 * np.log1p(-u1))
        theta = 2.0 * np.pi * u2
        return np.column_stack((r * np.cos(theta), r * np.sin(theta))).ravel()[:k]


@dataclass(frozen=True)
class SnsConfig:
    rnd: bool = True
    nsmp: int = 100
    burn_in: int | None = None
    seed: int = 0
    ridge: float = 1e-6

    def __post_init__(self):
        if self.nsmp < 1:
            raise ValueError("nsmp must be at least 1")
        if not 0 <= self.effective_burn_in < self.nsmp:
            raise ValueError(f"burn_in must lie in [0, nsmp), got {self.effective_burn_in}")

    @property
    def effective_burn_in(self) -> int:
        return self.nsmp // 2 if self.burn_in is None else int(self.burn_in)


@dataclass
class Chain:
    samples: np.ndarray  # (nsmp, K)
    accepted: np.ndarray  # (nsmp,) bool
    log_density: np.ndarray  # (nsmp,)
    seed: int
    burn_in: int

    @property
    def nsmp(self) -> int:
        return self.samples.shape[0]

    @property
    def acceptance_rate(self) -> float:
        return float(np.mean(self.accepted))

    @property
    def kept(self) -> np.ndarray:
        return self.samples[self.burn_in :]

    def mean(self) -> np.ndarray:
        return self.kept.mean(axis=0)

    def sd(self) -> np.ndarray:
        kept = self.kept
        return kept.std(axis=0, ddof=1) if kept.shape[0] > 1 else np.zeros(kept.shape[1])


@dataclass(frozen=True)
class _LocalFit:
    x: np.ndarray
    bundle: EvalBundle
    chol: CholeskyFactor  # of the precision -H (+ ridge)
    mean: np.ndarray

    def log_q(self, z: np.ndarray) -> float:
        """Log density of the fitted Gaussian at ``z``."""
        w = self.chol.lower.T @ (z - self.mean)
        return float(-0.5 * (w @ w) + 0.5 * self.chol.logdet() - 0.5 * z.size * _LOG_2PI)


def _fit(objective: Callable, x: np.ndarray, ridge: float, bundle: EvalBundle | None = None) -> _LocalFit:
    b = bundle if bundle is not None else objective(x, Level.FGH)
    if not np.isfinite(b.f):
        raise NumericalError(f"log density is not finite at {x.tolist()}")
    chol, _ = damped_factor(b.h, ridge)
    return _LocalFit(x, b, chol, x + solve(chol, b.g))


class SnsStep(NamedTuple):
    x: np.ndarray
    accepted: bool
    log_accept_ratio: float


def _advance(objective, cur: _LocalFit, rnd: bool, rng: NormalStream | None, ridge: float):
    if not rnd:
        nxt = _fit(objective, cur.mean, ridge)
        return nxt, True, 0.0
    z = rng.normals(cur.x.size)
    proposal = cur.mean + sla.solve_triangular(cur.chol.lower, z, lower=True, trans="T")
    bp = _try_eval(objective, proposal, Level.FGH)
    u = rng.uniform()
    if bp is None:
        return cur, False, -np.inf
    back = _fit(objective, proposal, ridge, bp)
    log_ratio = bp.f - cur.bundle.f + back.log_q(cur.x) - cur.log_q(proposal)
    if np.log(u) < log_ratio:
        return back, True, log_ratio
    return cur, False, log_ratio


def sns_step(objective: Callable, current, rnd: bool, rng: NormalStream | None = None, ridge: float = 1e-6) -> SnsStep:
    """One SNS transition from ``current``.

    Returns ``(x, accepted, log_accept_ratio)``.  ``rng`` is required when
    ``rnd`` is true.
    """
    x = np.array(current.vector if isinstance(current, Coefficients) else current, dtype=float).reshape(-1)
    if rnd and rng is None:
        raise ValueError("stochastic steps need a NormalStream")
    nxt, acc, lr = _advance(objective, _fit(objective, x, ridge), rnd, rng, ridge)
    return SnsStep(nxt.x.copy(), acc, lr)


def run_chain(objective: Callable, init, config: SnsConfig) -> Chain:
    """Run ``config.nsmp`` SNS steps from ``init``; identical seeds give identical chains."""
    x = np.array(init.vector if isinstance(init, Coefficients) else init, dtype=float).reshape(-1)
    rng = NormalStream(config.seed)
    k = x.size
    samples = np.empty((config.nsmp, k))
    accepted = np.zeros(config.nsmp, dtype=bool)
    logd = np.empty(config.nsmp)
    cur = _fit(objective, x, config.ridge)
    for i in range(config.nsmp):
        cur, accepted[i], _ = _advance(objective, cur, config.rnd, rng, config.ridge)
        samples[i] = cur.x
        logd[i] = cur.bundle.f
    return Chain(samples, accepted, logd, config.seed, config.effective_burn_in)
