"""Negative-definiteness certificates for expanded Hessians.

Two routes are offered.  The structural route checks the premises of the
invariance result: every per-observation base Hessian is negative definite,
and at least one design matrix has full column rank; together they imply a
negative-definite coefficient-space Hessian.  The direct route attempts a
Cholesky factorization of ``-H``.

Catalog knowledge decides which families are log-concave; probe points only
guard against implementation bugs and never upgrade a verdict beyond what the
catalog supports.  Two-parameter gamma and inverse-Gaussian verdicts rest on
probe grids alone and say so in their evidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._core import Level
from .base1 import LOG_CONCAVE_1PAR, Family1, eval_base1
from .base2 import Family2, eval_base2
from .expander import EvalBundle
from .numerics import CholeskyFactor, as_array, cholesky

__all__ = [
    "Verdict",
    "ConcavityCertificate",
    "SylvesterReport",
    "base_concavity_1par",
    "base_concavity_2par",
    "design_full_rank",
    "pivoted_cholesky_rank",
    "certify",
]

RANK_TOL = 1e-10


class Verdict(str, Enum):
    NEGATIVE_DEFINITE = "CertifiedNegativeDefinite"
    BLOCKWISE_ONLY = "CertifiedBlockwiseOnly"
    NOT_CERTIFIED = "NotCertified"


@dataclass(frozen=True)
class ConcavityCertificate:
    verdict: Verdict
    evidence: dict = field(default_factory=dict)
    rank: int | None = None

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.NEGATIVE_DEFINITE

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "rank": self.rank, "evidence": self.evidence}


@dataclass(frozen=True)
class SylvesterReport:
    """Per-probe checks of the 2x2 base Hessian."""

    h11_negative: np.ndarray
    h22_negative: np.ndarray
    det_positive: np.ndarray
    det: np.ndarray


def base_concavity_1par(family: Family1 | str, u_samples, y_samples) -> ConcavityCertificate:
    """Certify a one-parameter base function as strictly concave in ``u``.

    Concave iff the family is in the log-concave catalog and ``f_uu < 0`` at
    every probe.  The probes are all pairs from ``u_samples`` x ``y_samples``.
    """
    if isinstance(family, str):
        family = Family1(family)
    u = np.asarray(u_samples, dtype=float).reshape(-1)
    y = np.asarray(y_samples, dtype=float).reshape(-1)
    uu, yy = np.meshgrid(u, y, indexing="ij")
    probe_family = family
    if family.is_binomial and family.trials is not None and np.ndim(family.trials) > 0:
        # per-observation trials do not line up with a probe grid; use the largest
        probe_family = Family1(family.name, float(np.max(family.trials)))
    base = eval_base1(probe_family, uu.ravel(), yy.ravel(), Level.FGH)
    n_bad = int(np.sum(~(base.h < 0)))
    in_catalog = family.name in LOG_CONCAVE_1PAR
    evidence = {
        "catalog_log_concave": in_catalog,
        "n_probes": int(base.h.size),
        "n_probes_failed": n_bad,
        "max_h": float(np.max(base.h)),
    }
    ok = in_catalog and n_bad == 0
    return ConcavityCertificate(Verdict.NEGATIVE_DEFINITE if ok else Verdict.NOT_CERTIFIED, evidence)


def sylvester_2x2(h: np.ndarray) -> SylvesterReport:
    """Leading-minor checks on rows of ``(h11, h22, h12)``."""
    h = np.atleast_2d(h)
    det = h[:, 0] * h[:, 1] - h[:, 2] ** 2
    return SylvesterReport(h[:, 0] < 0, h[:, 1] < 0, det > 0, det)


def base_concavity_2par(family: Family2 | str, u1, u2, y) -> tuple[ConcavityCertificate, SylvesterReport]:
    """Sylvester check of a two-parameter base Hessian at given probes.

    ``u1``, ``u2`` and ``y`` are aligned probe vectors.  Gaussian is known to
    be concave per slot but never jointly (its determinant is
    ``-exp(-2 u2) (y - u1)^2 / 2``), so its best verdict is blockwise.
    """
    if isinstance(family, str):
        family = Family2(family)
    base = eval_base2(family, u1, u2, y, Level.FGH)
    rep = sylvester_2x2(base.h)
    evidence = {
        "n_probes": int(rep.det.size),
        "h11_negative_all": bool(np.all(rep.h11_negative)),
        "h22_negative_all": bool(np.all(rep.h22_negative)),
        "det_positive_all": bool(np.all(rep.det_positive)),
        "min_det": float(np.min(rep.det)),
    }
    if family.name == "gaussian-identity-log":
        evidence["basis"] = "catalog"
        # d2f/du2^2 vanishes at zero residual; blockwise concavity only needs <= 0
        blockwise = bool(np.all(rep.h11_negative) and np.all(base.h[:, 1] <= 0))
        verdict = Verdict.BLOCKWISE_ONLY if blockwise else Verdict.NOT_CERTIFIED
    else:
        evidence["basis"] = "probe-grid"
        if evidence["h11_negative_all"] and evidence["h22_negative_all"]:
            verdict = Verdict.NEGATIVE_DEFINITE if evidence["det_positive_all"] else Verdict.BLOCKWISE_ONLY
        else:
            verdict = Verdict.NOT_CERTIFIED
    return ConcavityCertificate(verdict, evidence), rep


def pivoted_cholesky_rank(A: np.ndarray, rel_tol: float = RANK_TOL) -> int:
    """Numerical rank of a symmetric PSD matrix by diagonally pivoted Cholesky.

    Stops when the largest remaining diagonal is at most
    ``rel_tol * trace(A) / dim``.
    """
    a = np.array(A, dtype=float)
    n = a.shape[0]
    tol = rel_tol * max(np.trace(a), 0.0) / n
    if tol == 0.0:
        return 0
    for k in range(n):
        d = np.diag(a)[k:]
        j = k + int(np.argmax(d))
        if not a[j, j] > tol:
            return k
        a[[k, j]] = a[[j, k]]
        a[:, [k, j]] = a[:, [j, k]]
        piv = np.sqrt(a[k, k])
        a[k:, k] /= piv
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k + 1 :, k])
    return n


def design_full_rank(X) -> tuple[int, bool]:
    """Column rank of ``X`` from its Gram matrix; returns ``(rank, rank == K)``."""
    x = as_array(X)
    rank = pivoted_cholesky_rank(x.T @ x)
    return rank, rank == x.shape[1]


def certify(bundle: EvalBundle | np.ndarray) -> ConcavityCertificate:
    """Direct certificate: negative definite iff ``cholesky(-H)`` succeeds."""
    H = bundle.h if isinstance(bundle, EvalBundle) else np.asarray(bundle, dtype=float)
    if H is None:
        raise ValueError("certify needs a bundle evaluated with its Hessian")
    res = cholesky(-H)
    if isinstance(res, CholeskyFactor):
        return ConcavityCertificate(Verdict.NEGATIVE_DEFINITE, {"method": "cholesky(-H)"})
    return ConcavityCertificate(
        Verdict.NOT_CERTIFIED,
        {"method": "cholesky(-H)", "failed_pivot": res.pivot, "pivot_value": res.value},
    )
