"""CSV datasets and model specifications for the command line."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._core import SpecError
from .base1 import FAMILIES1, Family1
from .base2 import FAMILIES2, Family2
from .expander import Objective, RegressionData

__all__ = ["Dataset", "read_csv", "parse_csv", "format_csv", "ModelSpec", "build_model", "Model"]

INTERCEPT = "(Intercept)"


@dataclass
class Dataset:
    columns: list[str]
    values: np.ndarray  # (N, n_columns)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.columns):
            raise SpecError(f"dataset has {len(self.columns)} columns but values of shape {self.values.shape}")
        if len(set(self.columns)) != len(self.columns):
            raise SpecError("duplicate column names in dataset")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        try:
            j = self.columns.index(name)
        except ValueError:
            raise SpecError(f"column {name!r} not found; available: {', '.join(self.columns)}") from None
        return self.values[:, j]

    def subset(self, rows: np.ndarray) -> "Dataset":
        return Dataset(list(self.columns), self.values[rows])


def parse_csv(text: str, source: str = "<csv>") -> Dataset:
    """Parse comma-separated numeric data with a header row.

    Cells must be finite reals (scientific notation is fine).  Errors name the
    1-based line and the column.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise SpecError(f"{source}: empty file (a header row is required)")
    header = [c.strip() for c in rows[0]]
    if any(not c for c in header):
        raise SpecError(f"{source}: empty column name in header")
    values = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:]):
        line = i + 2
        if len(row) != len(header):
            raise SpecError(f"{source}: line {line} has {len(row)} fields, header has {len(header)}")
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise SpecError(f"{source}: line {line}, column {header[j]!r}: cannot parse {cell!r} as a number") from None
            if not math.isfinite(v):
                raise SpecError(f"{source}: line {line}, column {header[j]!r}: value {cell!r} is not finite")
            values[i, j] = v
    return Dataset(header, values)


def read_csv(path: str | Path) -> Dataset:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    return parse_csv(text, str(path))


def _cell(v: float) -> str:
    if v == int(v) and abs(v) < 2**53:
        return str(int(v))
    return format(v, ".17g")


def format_csv(ds: Dataset) -> str:
    out = [",".join(ds.columns)]
    for row in ds.values:
        out.append(",".join(_cell(v) for v in row))
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------- #
# Model specification
# --------------------------------------------------------------------------- #


@dataclass
class ModelSpec:
    family: str
    response: str
    covariates: list[str]
    dispersion_covariates: list[str] | None = None
    intercept: bool = False
    dispersion_intercept: bool = False
    trials: float | str | None = None
    prior_mean: list[float] | None = None
    prior_sd: list[float] | None = None
    block_diag: bool = False

    def validate(self, data: Dataset | None = None) -> None:
        if self.family not in FAMILIES1 + FAMILIES2:
            raise SpecError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES1 + FAMILIES2)}")
        one_par = self.family in FAMILIES1
        if one_par and self.dispersion_covariates:
            raise SpecError(f"one-parameter family {self.family!r} does not take dispersion covariates")
        if one_par and self.dispersion_intercept:
            raise SpecError(f"one-parameter family {self.family!r} has no dispersion slot")
        if one_par and self.block_diag:
            raise SpecError("--block-diag applies to two-parameter families only")
        if self.trials is not None and not self.family.startswith("binomial-"):
            raise SpecError(f"family {self.family!r} takes no trials")
        if not self.covariates and not self.intercept:
            raise SpecError("the mean slot needs at least one covariate or --intercept")
        if self.prior_mean is not None and self.prior_sd is None:
            raise SpecError("--prior-mean requires --prior-sd")
        if data is not None:
            for name in [self.response, *self.covariates, *(self.dispersion_covariates or [])]:
                data.column(name)
            if isinstance(self.trials, str):
                data.column(self.trials)

    @property
    def two_slot(self) -> bool:
        return self.family in FAMILIES2

    def mean_names(self) -> list[str]:
        return ([INTERCEPT] if self.intercept else []) + list(self.covariates)

    def dispersion_names(self) -> list[str]:
        if not self.two_slot:
            return []
        names = ([INTERCEPT] if self.dispersion_intercept else []) + list(self.dispersion_covariates or [])
        return names or [INTERCEPT]


@dataclass
class Model:
    spec: ModelSpec
    objective: Objective
    mean_names: list[str]
    dispersion_names: list[str] = field(default_factory=list)

    @property
    def names(self) -> list[str]:
        return self.mean_names + self.dispersion_names

    def label(self, x) -> dict:
        x = np.asarray(x, dtype=float)
        k = len(self.mean_names)
        out = {"mean": dict(zip(self.mean_names, map(float, x[:k])))}
        out["dispersion"] = dict(zip(self.dispersion_names, map(float, x[k:]))) if self.spec.two_slot else None
        return out


def _design(data: Dataset, names: list[str], intercept: bool) -> np.ndarray:
    cols = [data.column(c) for c in names]
    if intercept:
        cols.insert(0, np.ones(data.n_rows))
    return np.column_stack(cols) if cols else np.ones((data.n_rows, 1))


def _prior_vector(values, k: int, what: str):
    if values is None:
        return None
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.size == 1:
        return float(v[0])
    if v.size != k:
        raise SpecError(f"{what} has {v.size} entries but the model has {k} coefficients")
    return v


def build_model(spec: ModelSpec, data: Dataset) -> Model:
    """Design matrices and objective (likelihood plus optional normal prior)."""
    spec.validate(data)
    y = data.column(spec.response)
    X = _design(data, spec.covariates, spec.intercept)
    if spec.two_slot:
        if spec.dispersion_covariates or spec.dispersion_intercept:
            Z = _design(data, spec.dispersion_covariates or [], spec.dispersion_intercept)
        else:
            Z = None
        family = Family2(spec.family)
        reg = RegressionData(X, y, Z)
    else:
        if isinstance(spec.trials, str):
            trials = data.column(spec.trials)
        else:
            trials = spec.trials
        family = Family1(spec.family, trials)
        reg = RegressionData(X, y)
    k = X.shape[1] + (reg.n_gamma if spec.two_slot else 0)
    sd = _prior_vector(spec.prior_sd, k, "prior sd")
    mu = _prior_vector(spec.prior_mean, k, "prior mean")
    if sd is not None and mu is None:
        mu = 0.0
    objective = Objective(reg, family, prior_mean=mu, prior_sd=sd, block_diag=spec.block_diag)
    return Model(spec, objective, spec.mean_names(), spec.dispersion_names())
