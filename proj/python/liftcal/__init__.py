"""Calibration of arbitrary predictive models from (response, prediction) pairs."""

from ._core import (
    ConsistencyTest,
    InputError,
    Interval,
    IntervalMethod,
    LcdReport,
    LiftedFit,
    NumericalError,
    OutlierSolution,
    PosteriorChain,
    baseline_predict,
    committee_predict,
    consistency_test,
    detect_outliers,
    empirical_coverage,
    eta_hat,
    fit_lifted_linear,
    gen_dataset,
    haar_dwt,
    lcd,
    mic_probabilities,
    prediction_interval,
    prediction_intervals,
    predictive_interval_mcmc,
    rank_models,
    reliability_curve,
    sample_posterior,
    select_lambda,
    t_cdf,
    t_quantile,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
