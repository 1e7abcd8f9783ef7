"""``glmfab`` command line.

Exit codes: 0 success, 1 an example program's checks failed, 2 specification,
parse, domain or dimension error, 3 numerical failure.  Errors are written to
standard error as one line of JSON.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import jsonio
from ._core import DimensionError, DomainError, NumericalError, SpecError
from .base1 import FAMILIES1
from .base2 import FAMILIES2
from .commands import bench_report, check_report, fit_report, sample_report
from .dataset import ModelSpec, format_csv, read_csv
from .expander import RegressionData
from .optimize import NewtonConfig
from .programs import PROGRAMS, example_hb_shrinkage
from .simulate import simulate
from .sns import SnsConfig

__all__ = ["main", "build_parser"]


def _names(text: str | None) -> list[str]:
    if not text:
        return []
    return [c.strip() for c in text.split(",") if c.strip()]


def _reals(text: str | None) -> list[float] | None:
    if text is None:
        return None
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise SpecError(f"cannot parse {text!r} as comma-separated numbers") from None


def _trials(text: str | None):
    if text is None:
        return None
    try:
        return float(text)
    except ValueError:
        return text


def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, choices=FAMILIES1 + FAMILIES2)
    p.add_argument("--data", required=True, help="CSV file with a header row")
    p.add_argument("--response", required=True)
    p.add_argument("--covariates", default="", help="comma-separated mean-slot columns")
    p.add_argument("--dispersion-covariates", default=None, help="comma-separated dispersion-slot columns")
    p.add_argument("--trials", default=None, help="binomial trial count or column name")
    p.add_argument("--prior-mean", default=None, help="scalar or one value per coefficient")
    p.add_argument("--prior-sd", default=None, help="scalar or one value per coefficient")
    p.add_argument("--block-diag", action="store_true", help="drop mean/dispersion cross blocks of the Hessian")
    p.add_argument("--intercept", dest="intercept", action="store_true", default=False)
    p.add_argument("--no-intercept", dest="intercept", action="store_false")
    p.add_argument("--dispersion-intercept", action="store_true")
    p.add_argument("--out", default=None, help="write JSON here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glmfab", description="GLM fitting and sampling from base-function derivatives")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="maximize the log-likelihood (plus prior) by damped Newton")
    _model_args(fit)
    fit.add_argument("--max-iter", type=int, default=100)

    sample = sub.add_parser("sample", help="run the stochastic Newton sampler")
    _model_args(sample)
    sample.add_argument("--nsmp", type=int, default=100)
    sample.add_argument("--burn-in", type=int, default=None)
    sample.add_argument("--rnd", action="store_true", help="stochastic steps (default: deterministic Newton steps)")
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--chain-out", default=None, help="write the full chain as CSV")

    check = sub.add_parser("check", help="derivative, concavity and rank audit")
    _model_args(check)
    check.add_argument("--point", default=None, help="comma-separated coefficients (default zeros)")

    simp = sub.add_parser("simulate", help="draw a seeded synthetic dataset as CSV")
    simp.add_argument("--family", required=True, choices=FAMILIES1 + FAMILIES2)
    simp.add_argument("--n", type=int, required=True)
    simp.add_argument("--k", type=int, required=True)
    simp.add_argument("--seed", type=int, required=True)
    simp.add_argument("--beta", default=None, help="comma-separated mean coefficients")
    simp.add_argument("--gamma", default=None, help="comma-separated dispersion coefficients")
    simp.add_argument("--trials", type=int, default=1)
    simp.add_argument("--dispersion", choices=["varying", "constant"], default="varying")
    simp.add_argument("--out", default=None, help="CSV path (default standard output)")
    simp.add_argument("--truth-out", default=None, help="JSON sidecar path (default <out>.truth.json)")

    bench = sub.add_parser("bench", help="time expanded FGH evaluation per design layout")
    bench.add_argument("--layout", choices=["row", "col", "both"], default="both")
    bench.add_argument("--n", type=int, default=100_000)
    bench.add_argument("--k", type=int, default=20)
    bench.add_argument("--reps", type=int, default=5)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", default=None)

    for name in PROGRAMS:
        ep = sub.add_parser(name, help=f"run the {name[len('example-'):]} example")
        ep.add_argument("--seed", type=int, default=1)
        ep.add_argument("--out", default=None)
        if name == "example-hb-shrinkage":
            ep.add_argument("--groups", type=int, default=20)
            ep.add_argument("--data", default=None, help="CSV with a group column (binomial-logit response)")
            ep.add_argument("--group", default=None, help="group column name, required with --data")
            ep.add_argument("--response", default="y")
            ep.add_argument("--covariates", default=None)
            ep.add_argument("--prior-mean", default=None)
            ep.add_argument("--prior-sd", default=None)
            ep.add_argument("--csv-out", default=None, help="unpooled/pooled estimates for plotting")
    return parser


def _spec(args) -> ModelSpec:
    disp = _names(args.dispersion_covariates) if args.dispersion_covariates is not None else None
    return ModelSpec(
        family=args.family,
        response=args.response,
        covariates=_names(args.covariates),
        dispersion_covariates=disp,
        intercept=args.intercept,
        dispersion_intercept=args.dispersion_intercept,
        trials=_trials(args.trials),
        prior_mean=_reals(args.prior_mean),
        prior_sd=_reals(args.prior_sd),
        block_diag=args.block_diag,
    )


def _emit(obj, out: str | None) -> None:
    text = jsonio.dumps(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise SpecError(f"cannot write {path}: {exc.strerror}") from None


def _hb_grouped(args):
    if args.group is None:
        raise SpecError("--data requires --group")
    ds = read_csv(args.data)
    g = ds.column(args.group)
    covs = _names(args.covariates) or [c for c in ds.columns if c not in (args.group, args.response)]
    X = np.column_stack([ds.column(c) for c in covs])
    y = ds.column(args.response)
    groups = [RegressionData(X[g == v], y[g == v]) for v in np.unique(g)]

    def hyper(text, default):
        vals = _reals(text)
        v = np.full(len(covs), default) if vals is None else np.asarray(vals, dtype=float)
        if v.size == 1:
            v = np.full(len(covs), v[0])
        if v.size != len(covs):
            raise SpecError(f"hyperparameter has {v.size} entries, expected {len(covs)}")
        return v

    return groups, hyper(args.prior_mean, 0.0), hyper(args.prior_sd, 1.0)


def _shrinkage_csv(report: dict) -> str:
    un, po = report["unpooled"], report["pooled"]
    k = un.shape[1]
    head = ["group"] + [f"unpooled{j + 1}" for j in range(k)] + [f"pooled{j + 1}" for j in range(k)]
    lines = [",".join(head)]
    for i in range(un.shape[0]):
        lines.append(",".join([str(i + 1)] + [format(v, ".17g") for v in (*un[i], *po[i])]))
    return "\n".join(lines) + "\n"


def _run(args) -> int:
    cmd = args.command
    if cmd in ("fit", "sample", "check"):
        spec = _spec(args)
        data = read_csv(args.data)
        if cmd == "fit":
            _emit(fit_report(spec, data, NewtonConfig(max_iter=args.max_iter)), args.out)
        elif cmd == "sample":
            try:
                config = SnsConfig(rnd=args.rnd, nsmp=args.nsmp, burn_in=args.burn_in, seed=args.seed)
            except ValueError as exc:
                raise SpecError(str(exc)) from None
            summary, chain = sample_report(spec, data, config)
            if args.chain_out:
                _write(args.chain_out, chain)
            _emit(summary, args.out)
        else:
            _emit(check_report(spec, data, _reals(args.point)), args.out)
        return 0
    if cmd == "simulate":
        ds, truth = simulate(
            args.family, args.n, args.k, args.seed, _reals(args.beta), _reals(args.gamma), args.trials, args.dispersion
        )
        csv_text = format_csv(ds)
        if args.out:
            _write(args.out, csv_text)
        else:
            sys.stdout.write(csv_text)
        sidecar = args.truth_out or (args.out + ".truth.json" if args.out else None)
        if sidecar:
            _write(sidecar, jsonio.dumps(truth))
        return 0
    if cmd == "bench":
        layouts = ["row", "col"] if args.layout == "both" else [args.layout]
        _emit(bench_report(layouts, args.n, args.k, args.reps, args.seed), args.out)
        return 0
    # example programs
    if cmd == "example-hb-shrinkage":
        grouped = _hb_grouped(args) if args.data else None
        report = example_hb_shrinkage(seed=args.seed, groups=args.groups, grouped_data=grouped)
        if args.csv_out:
            _write(args.csv_out, _shrinkage_csv(report))
    else:
        report = PROGRAMS[cmd](seed=args.seed)
    _emit(report, args.out)
    return 0 if all(c["passed"] for c in report["checks"]) else 1


def _fail(kind: str, exc: BaseException, code: int) -> int:
    payload = {"error": kind, "message": str(exc)}
    index = getattr(exc, "index", None)
    if index is not None:
        payload["index"] = index
    sys.stderr.write(jsonio.compact(payload) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except SpecError as exc:
        return _fail("spec", exc, 2)
    except DomainError as exc:
        return _fail("domain", exc, 2)
    except DimensionError as exc:
        return _fail("dimension", exc, 2)
    except NumericalError as exc:
        return _fail("numerical", exc, 3)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
