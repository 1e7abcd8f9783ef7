"""Damped Newton-Raphson maximization of EvalBundle objectives."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._core import DomainError, Level, NumericalError
from .concavity import ConcavityCertificate, certify, design_full_rank
from .expander import Coefficients, EvalBundle, Objective
from .numerics import CholeskyFactor, as_array, cholesky, solve

__all__ = [
    "NewtonConfig",
    "FitResult",
    "damped_factor",
    "newton_maximize",
    "irls_gaussian_reference",
    "gradient_ascent",
    "standard_errors",
]

logger = logging.getLogger(__name__)

ObjectiveFn = Callable[..., EvalBundle]

# accepted ascent may lose this much (relative) to roundoff when the gradient improves
_ROUNDOFF_SLACK = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class NewtonConfig:
    max_iter: int = 100
    grad_tol: float = 1e-8
    step_tol: float = 1e-10
    max_halvings: int = 30
    ridge: float = 1e-6
    max_ridge_steps: int = 60

    def __post_init__(self):
        for name in ("max_iter", "grad_tol", "step_tol", "max_halvings", "ridge", "max_ridge_steps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"NewtonConfig.{name} must be positive")


@dataclass
class FitResult:
    coefficients: Coefficients
    loglik: float
    grad_norm: float
    iterations: int
    converged: bool
    damping_used: bool
    certificate: ConcavityCertificate
    stop_reason: str = ""
    std_errors: np.ndarray | None = None
    path: list[np.ndarray] = field(default_factory=list, repr=False)
    loglik_trace: list[float] = field(default_factory=list, repr=False)

    @property
    def x(self) -> np.ndarray:
        return self.coefficients.vector


def damped_factor(H: np.ndarray, ridge: float = 1e-6, max_steps: int = 60) -> tuple[CholeskyFactor, float]:
    """Factor ``-H + lam I`` with the smallest ``lam`` in ``{0, ridge * 4**k}`` that works."""
    A = -np.asarray(H, dtype=float)
    res = cholesky(A)
    if isinstance(res, CholeskyFactor):
        return res, 0.0
    eye = np.eye(A.shape[0])
    for k in range(max_steps):
        lam = ridge * 4.0**k
        res = cholesky(A + lam * eye)
        if isinstance(res, CholeskyFactor):
            return res, lam
    raise NumericalError(f"Hessian could not be made negative definite (ridge up to {lam:.3g})")


def _finite_bundle(b: EvalBundle) -> bool:
    if not np.isfinite(b.f):
        return False
    if b.g is not None and not np.all(np.isfinite(b.g)):
        return False
    return b.h is None or bool(np.all(np.isfinite(b.h)))


def _try_eval(objective: ObjectiveFn, x: np.ndarray, level: Level) -> EvalBundle | None:
    try:
        with np.errstate(all="ignore"):
            b = objective(x, level)
    except (DomainError, NumericalError, FloatingPointError):
        return None
    return b if _finite_bundle(b) else None


def standard_errors(H: np.ndarray) -> np.ndarray | None:
    """Square roots of the diagonal of ``(-H)^{-1}``, or None if ``-H`` is not PD."""
    res = cholesky(-np.asarray(H, dtype=float))
    if not isinstance(res, CholeskyFactor):
        return None
    return np.sqrt(np.diag(solve(res, np.eye(res.dim))))


def _split(objective, x: np.ndarray) -> Coefficients:
    return objective.split(x) if isinstance(objective, Objective) else Coefficients(x)


def _certificate(objective, b: EvalBundle) -> ConcavityCertificate:
    cert = certify(b)
    if isinstance(objective, Objective):
        rank, full = design_full_rank(objective.data.X)
        evidence = dict(cert.evidence, mean_design_full_rank=full)
        return ConcavityCertificate(cert.verdict, evidence, rank)
    return cert


def newton_maximize(objective: ObjectiveFn, init=None, config: NewtonConfig | None = None) -> FitResult:
    """Maximize ``objective`` by damped Newton steps with step halving.

    Each iteration solves ``(-H + lam I) d = g``.  ``lam`` is 0 whenever ``-H``
    factors, otherwise it escalates geometrically.  The step ``s d`` starts at
    ``s = 1`` and halves until the objective increases.  A step whose value is
    equal to within roundoff is also taken if it shrinks the gradient, so the
    loop can reach tight gradient tolerances on large sums.

    Parameters
    ----------
    objective : callable
        ``objective(x, level) -> EvalBundle``.
    init : array_like, optional
        Starting point; zeros by default (needs ``objective.dim``).
    """
    config = config or NewtonConfig()
    if init is None:
        init = np.zeros(objective.dim)
    x = np.array(init.vector if isinstance(init, Coefficients) else init, dtype=float).reshape(-1)
    # evaluated directly so that data errors (e.g. responses outside the
    # family's support) surface as such instead of as a numerical failure
    with np.errstate(all="ignore"):
        b = objective(x, Level.FGH)
    if not _finite_bundle(b):
        raise NumericalError(f"objective is not finite at the initial point {x.tolist()}")

    path = [x.copy()]
    trace = [b.f]
    damping_used = False
    stop_reason = "max_iter"
    iterations = 0
    for _ in range(config.max_iter):
        gnorm = float(np.max(np.abs(b.g)))
        if gnorm <= config.grad_tol:
            stop_reason = "grad_tol"
            break
        chol, lam = damped_factor(b.h, config.ridge, config.max_ridge_steps)
        damping_used = damping_used or lam > 0
        d = solve(chol, b.g)

        accepted = None
        any_finite = False
        s = 1.0
        for _ in range(config.max_halvings + 1):
            xn = x + s * d
            bn = _try_eval(objective, xn, Level.FGH)
            if bn is not None:
                any_finite = True
                slack = _ROUNDOFF_SLACK * (1.0 + abs(b.f))
                if bn.f > b.f or (bn.f >= b.f - slack and np.max(np.abs(bn.g)) < gnorm):
                    accepted = (xn, bn)
                    break
            s *= 0.5
        if accepted is None:
            if not any_finite:
                raise NumericalError(
                    f"objective not finite at any trial step from {x.tolist()} "
                    f"(direction {d.tolist()}, ridge {lam:g})"
                )
            stop_reason = "no_improvement"
            break
        step = float(np.max(np.abs(accepted[0] - x)))
        x, b = accepted
        iterations += 1
        path.append(x.copy())
        trace.append(b.f)
        logger.debug("newton iter %d: f=%.17g |g|=%.3g step=%.3g lam=%g", iterations, b.f, np.max(np.abs(b.g)), step, lam)
        if step <= config.step_tol:
            stop_reason = "step_tol"
            break

    gnorm = float(np.max(np.abs(b.g)))
    return FitResult(
        coefficients=_split(objective, x),
        loglik=b.f,
        grad_norm=gnorm,
        iterations=iterations,
        converged=gnorm <= config.grad_tol,
        damping_used=damping_used,
        certificate=_certificate(objective, b),
        stop_reason=stop_reason,
        std_errors=standard_errors(b.h),
        path=path,
        loglik_trace=trace,
    )


def irls_gaussian_reference(X, y) -> np.ndarray:
    """Least-squares coefficients from the normal equations ``X^T X b = X^T y``."""
    x = as_array(X)
    y = np.asarray(y, dtype=float).reshape(-1)
    res = cholesky(x.T @ x)
    if not isinstance(res, CholeskyFactor):
        raise DomainError(f"design matrix is rank deficient (pivot {res.pivot})")
    return solve(res, x.T @ y)


def gradient_ascent(
    objective: ObjectiveFn,
    init,
    grad_tol: float = 1e-7,
    max_iter: int = 100_000,
) -> np.ndarray:
    """First-order reference maximizer with Armijo backtracking.

    Slow, but shares no machinery with :func:`newton_maximize` beyond the
    objective itself; used to cross-check Newton fits.
    """
    x = np.array(init, dtype=float).reshape(-1)
    b = objective(x, Level.FG)
    t = 1.0
    for _ in range(max_iter):
        g = b.g
        gg = float(g @ g)
        if np.max(np.abs(g)) <= grad_tol:
            return x
        while True:
            xn = x + t * g
            bn = _try_eval(objective, xn, Level.FG)
            if bn is not None and bn.f >= b.f + 0.5 * t * gg:
                break
            t *= 0.5
            if t < 1e-300:
                return x
        x, b = xn, bn
        t *= 2.0
    raise NumericalError("gradient ascent did not converge")

