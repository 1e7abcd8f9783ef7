"""Generalized linear models assembled from base-function derivatives.

A family supplies the per-observation log-density and its derivatives in
its one- or two-dimensional parameter space; the expander lifts them to
coefficient space, where Newton optimization and the stochastic Newton
sampler work.
"""

from ._core import DimensionError, DomainError, GlmfabError, Level, NumericalError, SpecError
from .base1 import FAMILIES1, LOG_CONCAVE_1PAR, BaseEval1, Family1, eval_base1, omitted_constant
from .base2 import FAMILIES2, BaseEval2, Family2, eval_base2, omitted_constant2
from .concavity import (
    ConcavityCertificate,
    Verdict,
    base_concavity_1par,
    base_concavity_2par,
    certify,
    design_full_rank,
)
from .expander import (
    Coefficients,
    EvalBundle,
    Objective,
    RegressionData,
    expand_1par,
    expand_2par,
    gaussian_log_prior,
    merge,
)
from .numerics import CholeskyFactor, Layout, Matrix, NotPositiveDefinite, cholesky, solve
from .optimize import FitResult, NewtonConfig, irls_gaussian_reference, newton_maximize
from .sns import Chain, SnsConfig, run_chain, sns_step

__version__ = "0.1.0"

__all__ = [
    "Level",
    "GlmfabError",
    "DimensionError",
    "DomainError",
    "NumericalError",
    "SpecError",
    "FAMILIES1",
    "FAMILIES2",
    "LOG_CONCAVE_1PAR",
    "BaseEval1",
    "BaseEval2",
    "Family1",
    "Family2",
    "eval_base1",
    "eval_base2",
    "omitted_constant",
    "omitted_constant2",
    "Coefficients",
    "EvalBundle",
    "Objective",
    "RegressionData",
    "expand_1par",
    "expand_2par",
    "gaussian_log_prior",
    "merge",
    "ConcavityCertificate",
    "Verdict",
    "base_concavity_1par",
    "base_concavity_2par",
    "certify",
    "design_full_rank",
    "CholeskyFactor",
    "Layout",
    "Matrix",
    "NotPositiveDefinite",
    "cholesky",
    "solve",
    "FitResult",
    "NewtonConfig",
    "irls_gaussian_reference",
    "newton_maximize",
    "Chain",
    "SnsConfig",
    "run_chain",
    "sns_step",
]
