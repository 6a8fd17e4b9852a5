"""Penalized quantile regression with wild-bootstrap inference."""

from ._wildqr import (
    BootstrapDraws,
    ConditionReport,
    ConfidenceInterval,
    FitResult,
    MethodReport,
    SimReport,
    SolverError,
    TuneEntry,
    TuneResult,
    __version__,
    bic_select,
    bootstrap_adaptive,
    bootstrap_lasso,
    bootstrap_unpenalized,
    cv_select,
    fit_adaptive,
    fit_lasso,
    fit_unpenalized,
    method_label,
    normal_quantile,
    percentile_ci,
    run_study,
    sample_law,
    select_a_n,
    verify_law,
)

__all__ = [
    "BootstrapDraws",
    "ConditionReport",
    "ConfidenceInterval",
    "FitResult",
    "MethodReport",
    "SimReport",
    "SolverError",
    "TuneEntry",
    "TuneResult",
    "__version__",
    "bic_select",
    "bootstrap_adaptive",
    "bootstrap_lasso",
    "bootstrap_unpenalized",
    "cv_select",
    "fit_adaptive",
    "fit_lasso",
    "fit_unpenalized",
    "method_label",
    "normal_quantile",
    "percentile_ci",
    "run_study",
    "sample_law",
    "select_a_n",
    "verify_law",
]
