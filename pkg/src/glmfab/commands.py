"""Library entry points behind the ``fit``, ``sample``, ``check`` and ``bench`` subcommands.

Each returns the plain dict that the CLI serializes, so a CLI run and a
direct call produce identical JSON.
"""

from __future__ import annotations

import statistics
import time

import numpy as np

from ._core import Level, SpecError
from .base1 import Family1
from .concavity import base_concavity_1par, base_concavity_2par, certify, design_full_rank
from .dataset import Dataset, Model, ModelSpec, build_model
from .expander import RegressionData, expand_1par
from .numerics import Layout, Matrix, as_array, fd_gradient, fd_hessian, rel_error
from .optimize import NewtonConfig, newton_maximize
from .sns import SnsConfig, run_chain

__all__ = ["fit_report", "sample_report", "check_report", "bench_report", "chain_csv"]

FD_GRAD_RTOL = 1e-5
FD_HESS_RTOL = 1e-4


def _spec_dict(spec: ModelSpec) -> dict:
    return {
        "family": spec.family,
        "response": spec.response,
        "n_mean_coefficients": len(spec.mean_names()),
        "n_dispersion_coefficients": len(spec.dispersion_names()),
        "block_diag": spec.block_diag,
        "prior": None if spec.prior_sd is None else {"mean": spec.prior_mean or [0.0], "sd": spec.prior_sd},
    }


def fit_report(spec: ModelSpec, data: Dataset, config: NewtonConfig | None = None) -> dict:
    model = build_model(spec, data)
    res = newton_maximize(model.objective, None, config or NewtonConfig())
    se = model.label(res.std_errors) if res.std_errors is not None else None
    return {
        "command": "fit",
        "model": _spec_dict(spec),
        "n_obs": data.n_rows,
        "coefficients": model.label(res.x),
        "std_errors": se,
        "loglik": res.loglik,
        "grad_norm": res.grad_norm,
        "iterations": res.iterations,
        "converged": res.converged,
        "stop_reason": res.stop_reason,
        "damping_used": res.damping_used,
        "certificate": res.certificate.to_dict(),
    }


def _run_sample(model: Model, config: SnsConfig):
    return run_chain(model.objective, np.zeros(model.objective.dim), config)


def sample_report(spec: ModelSpec, data: Dataset, config: SnsConfig) -> tuple[dict, str]:
    """Chain summary dict and the full chain as CSV text."""
    model = build_model(spec, data)
    chain = _run_sample(model, config)
    summary = {
        "command": "sample",
        "model": _spec_dict(spec),
        "n_obs": data.n_rows,
        "rnd": config.rnd,
        "nsmp": config.nsmp,
        "burn_in": chain.burn_in,
        "seed": config.seed,
        "acceptance_rate": chain.acceptance_rate,
        "mean": model.label(chain.mean()),
        "sd": model.label(chain.sd()),
    }
    return summary, chain_csv(model, chain)


def chain_csv(model: Model, chain) -> str:
    names = ["mean:" + n for n in model.mean_names] + ["dispersion:" + n for n in model.dispersion_names]
    lines = [",".join(["step", "accepted", "log_density", *names])]
    for i, row in enumerate(chain.samples):
        cells = [str(i + 1), str(int(chain.accepted[i])), format(chain.log_density[i], ".17g")]
        cells += [format(v, ".17g") for v in row]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _y_probes(y: np.ndarray, limit: int = 25) -> np.ndarray:
    vals = np.unique(y)
    if vals.size > limit:
        vals = np.unique(np.quantile(y, np.linspace(0, 1, limit), method="nearest"))
    return vals


def check_report(spec: ModelSpec, data: Dataset, point=None) -> dict:
    """Audit an objective at ``point`` (zeros by default).

    Compares analytic derivatives with finite differences, checks base-space
    concavity on probe points, reports design ranks and tries the direct
    Cholesky certificate of the expanded Hessian.
    """
    model = build_model(spec, data)
    obj = model.objective
    x = np.zeros(obj.dim) if point is None else np.asarray(point, dtype=float).reshape(-1)
    if x.size != obj.dim:
        raise SpecError(f"point has {x.size} entries, model has {obj.dim} coefficients")
    b = obj(x, Level.FGH)

    def scalar(t):
        return obj(t, Level.F).f

    g_err = rel_error(b.g, fd_gradient(scalar, x))
    h_err = rel_error(b.h, fd_hessian(scalar, x))
    fd = {
        "grad_max_rel_err": g_err,
        "hess_max_rel_err": h_err,
        "grad_rtol": FD_GRAD_RTOL,
        "hess_rtol": FD_HESS_RTOL,
        "grad_ok": g_err <= FD_GRAD_RTOL,
        "hess_ok": h_err <= FD_HESS_RTOL,
    }

    reg: RegressionData = obj.data
    X = as_array(reg.X)
    k1 = X.shape[1]
    if obj.two_slot:
        Z = reg.dispersion_design()
        cert, _ = base_concavity_2par(obj.family, X @ x[:k1], Z @ x[k1:], reg.y)
    else:
        u_probes = np.concatenate((np.linspace(-8.0, 8.0, 33), X @ x))
        cert = base_concavity_1par(obj.family, u_probes, _y_probes(reg.y))

    ranks = {}
    warnings = []
    for name, M in (("mean", X), ("dispersion", reg.dispersion_design() if obj.two_slot else None)):
        if M is None:
            continue
        r, full = design_full_rank(M)
        ranks[name] = {"rank": r, "columns": M.shape[1], "full_rank": full}
        if not full:
            warnings.append(f"{name} design is rank deficient ({r} < {M.shape[1]})")

    hess = certify(b)
    if not fd["grad_ok"]:
        warnings.append("analytic gradient disagrees with finite differences")
    if not fd["hess_ok"]:
        warnings.append("analytic Hessian disagrees with finite differences")
    if cert.verdict.value == "NotCertified":
        warnings.append(f"base function of {spec.family} is not certified log-concave")
    elif cert.verdict.value == "CertifiedBlockwiseOnly":
        warnings.append(f"base function of {spec.family} is only blockwise concave")
    if not hess.certified:
        warnings.append("expanded Hessian is not negative definite at the point")

    return {
        "command": "check",
        "model": _spec_dict(spec),
        "n_obs": data.n_rows,
        "point": model.label(x),
        "finite_difference": fd,
        "base_concavity": {"verdict": cert.verdict.value, "evidence": cert.evidence},
        "design_rank": ranks,
        "hessian_certificate": hess.to_dict(),
        "warnings": warnings,
        "all_green": not warnings,
    }


def bench_report(layouts: list[str], n: int, k: int, reps: int, seed: int = 0) -> dict:
    """Median wall time of one-slot FGH evaluation per design layout.

    Outputs of all requested layouts are compared against column-major.
    """
    if reps < 1:
        raise SpecError("reps must be at least 1")
    if n < 1 or k < 1:
        raise SpecError("n and k must be positive")
    rng = np.random.default_rng(seed)
    X = rng.uniform(-0.5, 0.5, size=(n, k))
    beta = rng.uniform(-0.5, 0.5, size=k)
    y = rng.binomial(1, 1.0 / (1.0 + np.exp(-X @ beta))).astype(float)
    family = Family1("binomial-logit")
    ref = expand_1par(beta, RegressionData(Matrix.from_array(X, Layout.COL), y), family, Level.FGH)

    timings = {}
    diffs = {}
    for name in layouts:
        data = RegressionData(Matrix.from_array(X, Layout(name)), y)
        times = []
        out = None
        for _ in range(reps):
            t0 = time.perf_counter()
            out = expand_1par(beta, data, family, Level.FGH)
            times.append(time.perf_counter() - t0)
        timings[name] = {"median_seconds": statistics.median(times), "reps": reps}
        diffs[name] = max(abs(out.f - ref.f), float(np.max(np.abs(out.g - ref.g))), float(np.max(np.abs(out.h - ref.h))))
    max_diff = max(diffs.values())
    return {
        "command": "bench",
        "family": "binomial-logit",
        "n": n,
        "k": k,
        "reps": reps,
        "layouts": timings,
        "max_abs_diff_vs_col": diffs,
        "agree": max_diff <= 1e-12,
    }
