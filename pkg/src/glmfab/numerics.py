"""Dense linear algebra, special functions and finite-difference derivatives.

Everything here is a pure function of its inputs.  Symmetric results
(``xt_diag_x``, ``fd_hessian``) are built from the lower triangle and
mirrored, so ``H[i, j] == H[j, i]`` holds bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Union

import numpy as np
from scipy import linalg as sla
from scipy import special as sps

from ._core import DimensionError, DomainError, NumericalError

__all__ = [
    "Layout",
    "Matrix",
    "as_array",
    "mat_vec",
    "xt_diag_x",
    "xt_diag_z",
    "mirror_lower",
    "CholeskyFactor",
    "NotPositiveDefinite",
    "cholesky",
    "solve",
    "sigmoid",
    "log_sigmoid",
    "softplus",
    "std_normal_pdf",
    "std_normal_cdf",
    "log_std_normal_cdf",
    "log_gamma",
    "digamma",
    "trigamma",
    "fd_gradient",
    "fd_hessian",
    "rel_error",
]

CHOLESKY_PIVOT_TOL = 1e-12
FD_GRAD_STEP = 1e-6
FD_HESS_STEP = 1e-4

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


# --------------------------------------------------------------------------- #
# Matrices
# --------------------------------------------------------------------------- #


class Layout(str, Enum):
    ROW = "row"
    COL = "col"

    @property
    def order(self) -> str:
        return "C" if self is Layout.ROW else "F"


@dataclass(frozen=True)
class Matrix:
    """Dense real matrix over flat storage with an explicit layout tag.

    ``data`` holds ``rows * cols`` values; ``layout`` decides how they are
    indexed.  The layout is never converted behind the caller's back:
    :attr:`array` is a view on ``data``.
    """

    data: np.ndarray
    rows: int
    cols: int
    layout: Layout = Layout.COL

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=float).reshape(-1)
        if data.size != self.rows * self.cols:
            raise DimensionError(
                f"storage length {data.size} != rows*cols = {self.rows}*{self.cols}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "layout", Layout(self.layout))

    @classmethod
    def from_array(cls, a, layout: Layout | str = Layout.COL) -> "Matrix":
        a = np.asarray(a, dtype=float)
        if a.ndim == 1:
            a = a[:, None]
        if a.ndim != 2:
            raise DimensionError(f"expected a 2-d array, got ndim={a.ndim}")
        layout = Layout(layout)
        return cls(a.ravel(order=layout.order), a.shape[0], a.shape[1], layout)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def array(self) -> np.ndarray:
        return self.data.reshape(self.rows, self.cols, order=self.layout.order)

    def with_layout(self, layout: Layout | str) -> "Matrix":
        return Matrix.from_array(self.array, layout)


MatrixLike = Union[Matrix, np.ndarray]


def as_array(A) -> np.ndarray:
    """Return a 2-d float view of a :class:`Matrix` or array-like."""
    if isinstance(A, Matrix):
        return A.array
    a = np.asarray(A, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got ndim={a.ndim}")
    return a


def _vector(v, name: str = "v") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionError(f"{name} must be a vector, got shape {v.shape}")
    return v


def mirror_lower(M: np.ndarray) -> np.ndarray:
    """Copy the lower triangle of a square matrix onto its upper triangle."""
    lower = np.tril(M)
    return lower + np.tril(M, -1).T


def mat_vec(A: MatrixLike, v) -> np.ndarray:
    a = as_array(A)
    v = _vector(v)
    if a.shape[1] != v.size:
        raise DimensionError(f"A has {a.shape[1]} columns but v has length {v.size}")
    return a @ v


def xt_diag_x(X: MatrixLike, w) -> np.ndarray:
    """``X^T diag(w) X`` without forming the diagonal matrix.

    Each column of ``X`` is scaled by ``w``; the result is mirrored from its
    lower triangle so it is exactly symmetric.
    """
    x = as_array(X)
    w = _vector(w, "w")
    if w.size != x.shape[0]:
        raise DimensionError(f"w has length {w.size} but X has {x.shape[0]} rows")
    xw = x * w[:, None]
    return mirror_lower(xw.T @ x)


def xt_diag_z(X: MatrixLike, w, Z: MatrixLike) -> np.ndarray:
    """``X^T diag(w) Z``, the cross block between two design matrices."""
    x = as_array(X)
    z = as_array(Z)
    w = _vector(w, "w")
    if not (x.shape[0] == z.shape[0] == w.size):
        raise DimensionError(
            f"row mismatch: X has {x.shape[0]}, Z has {z.shape[0]}, w has {w.size}"
        )
    return (x * w[:, None]).T @ z


# --------------------------------------------------------------------------- #
# Cholesky
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular ``L`` with ``L @ L.T`` equal to the factored matrix."""

    lower: np.ndarray

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def reconstruct(self) -> np.ndarray:
        return self.lower @ self.lower.T

    def logdet(self) -> float:
        """Log-determinant of the factored matrix."""
        return 2.0 * float(np.sum(np.log(np.diag(self.lower))))


@dataclass(frozen=True)
class NotPositiveDefinite:
    """Returned by :func:`cholesky` when a pivot is not safely positive.

    ``pivot`` is the 0-based index of the failing diagonal and ``value`` the
    residual diagonal found there.
    """

    pivot: int
    value: float


def cholesky(A) -> CholeskyFactor | NotPositiveDefinite:
    """Factor a symmetric matrix, reading only its lower triangle.

    A residual diagonal ``d`` at step ``k`` counts as a failure when
    ``d <= 1e-12 * (1 + |A[k, k]|)`` (NaN also fails).
    """
    a = np.asarray(A, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got {a.shape}")
    n = a.shape[0]
    L = np.zeros_like(a)
    for k in range(n):
        row = L[k, :k]
        d = a[k, k] - row @ row
        if not d > CHOLESKY_PIVOT_TOL * (1.0 + abs(a[k, k])):
            return NotPositiveDefinite(pivot=k, value=float(d))
        lkk = np.sqrt(d)
        L[k, k] = lkk
        if k + 1 < n:
            L[k + 1 :, k] = (a[k + 1 :, k] - L[k + 1 :, :k] @ row) / lkk
    return CholeskyFactor(L)


def solve(chol: CholeskyFactor, b) -> np.ndarray:
    """Solve ``A x = b`` given ``A = L L^T``; ``b`` may be a vector or matrix."""
    b = np.asarray(b, dtype=float)
    if b.shape[0] != chol.dim:
        raise DimensionError(f"b has leading dimension {b.shape[0]}, factor has {chol.dim}")
    y = sla.solve_triangular(chol.lower, b, lower=True, check_finite=False)
    return sla.solve_triangular(chol.lower, y, lower=True, trans="T", check_finite=False)


# --------------------------------------------------------------------------- #
# Special functions
# --------------------------------------------------------------------------- #


def sigmoid(u):
    return sps.expit(u)


def log_sigmoid(u):
    return sps.log_expit(u)


def softplus(u):
    """``log(1 + exp(u))`` without overflow."""
    return np.logaddexp(0.0, u)


def std_normal_pdf(u):
    u = np.asarray(u, dtype=float)
    return np.exp(-0.5 * u * u - _LOG_SQRT_2PI)


def log_std_normal_pdf(u):
    u = np.asarray(u, dtype=float)
    return -0.5 * u * u - _LOG_SQRT_2PI


def std_normal_cdf(u):
    return sps.ndtr(u)


def log_std_normal_cdf(u):
    return sps.log_ndtr(u)


def _positive(x, name: str):
    x = np.asarray(x, dtype=float)
    if not np.all(x > 0):
        raise DomainError(f"{name} requires x > 0")
    return x


def log_gamma(x):
    return sps.gammaln(_positive(x, "log_gamma"))


def digamma(x):
    return sps.digamma(_positive(x, "digamma"))


def trigamma(x):
    return sps.polygamma(1, _positive(x, "trigamma"))


# --------------------------------------------------------------------------- #
# Finite differences
# --------------------------------------------------------------------------- #


def _probe(f: Callable, x: np.ndarray, scalar: bool) -> float:
    val = f(float(x[0]) if scalar else x.copy())
    val = float(val)
    if not np.isfinite(val):
        raise NumericalError(f"function is not finite at probe point {x.tolist()}")
    return val


def fd_gradient(f: Callable, x, rel_step: float = FD_GRAD_STEP) -> np.ndarray:
    """Central-difference gradient, step ``rel_step * (1 + |x_i|)`` per coordinate.

    Truncation error is O(h^2).  A scalar ``x`` is passed to ``f`` as a float.
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float)).copy()
    grad = np.empty(x.size)
    for i in range(x.size):
        h = rel_step * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (_probe(f, xp, scalar) - _probe(f, xm, scalar)) / (2.0 * h)
    return grad


def fd_hessian(f: Callable, x, rel_step: float = FD_HESS_STEP) -> np.ndarray:
    """Hessian by nested central differences of ``f`` alone (no gradient needed).

    ``H[i, j] = [f(++) - f(+-) - f(-+) + f(--)] / (4 h_i h_j)`` with steps
    ``rel_step * (1 + |x_i|)``; accuracy O(h^2).
    """
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float)).copy()
    n = x.size
    steps = rel_step * (1.0 + np.abs(x))
    H = np.empty((n, n))
    for i in range(n):
        for j in range(i + 1):
            total = 0.0
            for si, sj, sign in ((1, 1, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)):
                xp = x.copy()
                xp[i] += si * steps[i]
                xp[j] += sj * steps[j]
                total += sign * _probe(f, xp, scalar)
            H[i, j] = total / (4.0 * steps[i] * steps[j])
    return mirror_lower(H)


def rel_error(a, b, floor: float = 1.0) -> float:
    """Largest ``|a - b| / max(|a|, |b|, floor)`` over all entries."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / scale)) if a.size else 0.0
