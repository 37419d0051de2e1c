"""Multilevel Monte Carlo estimators built on the Ninomiya-Victoir and Giles-Szpruch schemes."""

from ._core import (
    ConfigError,
    HestonParams,
    ModelConfig,
    SamplingFailure,
    calibrate,
    cc_exact_usq_mean,
    lambda_table,
    ml2r_last_level,
    ml2r_weights,
    mlmc_last_level,
    mlmc_sample_sizes,
    oracle_check,
    run,
    strong_order,
    variance_decay,
    znv_second_moment,
    znv_second_moment_exact,
)

__all__ = [
    "ConfigError",
    "HestonParams",
    "ModelConfig",
    "SamplingFailure",
    "calibrate",
    "cc_exact_usq_mean",
    "lambda_table",
    "ml2r_last_level",
    "ml2r_weights",
    "mlmc_last_level",
    "mlmc_sample_sizes",
    "oracle_check",
    "run",
    "strong_order",
    "variance_decay",
    "znv_second_moment",
    "znv_second_moment_exact",
]
