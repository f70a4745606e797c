"""Reduced-rank multivariate regression with exact unbiased degrees of freedom.

Public surface: linear-algebra substrate (linalg), the estimator family
(estimators), degrees-of-freedom estimators and oracles (dof), model
selection (selection), simulation studies (simbench), and the CSV/report
pipeline (pipeline). The `rrdof` console script exposes the same machinery
from the command line.
"""

from .dof import (
    DofEstimate,
    GapPolicy,
    divergence_analytic,
    divergence_fd,
    exact_df_rrr,
    exact_df_shrunk,
    mc_df,
    naive_df,
    perturbation_df,
    sv_derivatives,
)
from .estimators import (
    FittedModel,
    LsFit,
    ShrinkageRule,
    adaptive,
    coef_matrix,
    fit_ols,
    fit_rrr,
    fit_shrunk,
    hard,
    soft,
)
from .linalg import (
    GramFactors,
    HFactor,
    SvdFactors,
    build_h,
    effective_rank,
    gram_factors,
    thin_svd,
)
from .pipeline import EvalReport, eval_splits, ingest_csv, synthetic_fixture
from .selection import (
    Criterion,
    SelectionReport,
    bic_score,
    cp_score,
    gcv_score,
    select_rank,
)
from .simbench import PRESETS, SimConfig, gen_instance, run_dof_study, run_pred_study, snr

__version__ = "0.1.0"

__all__ = [
    "DofEstimate", "GapPolicy", "divergence_analytic", "divergence_fd",
    "exact_df_rrr", "exact_df_shrunk", "mc_df", "naive_df", "perturbation_df",
    "sv_derivatives",
    "FittedModel", "LsFit", "ShrinkageRule", "adaptive", "coef_matrix",
    "fit_ols", "fit_rrr", "fit_shrunk", "hard", "soft",
    "GramFactors", "HFactor", "SvdFactors", "build_h", "effective_rank",
    "gram_factors", "thin_svd",
    "EvalReport", "eval_splits", "ingest_csv", "synthetic_fixture",
    "Criterion", "SelectionReport", "bic_score", "cp_score", "gcv_score",
    "select_rank",
    "PRESETS", "SimConfig", "gen_instance", "run_dof_study", "run_pred_study",
    "snr",
]
