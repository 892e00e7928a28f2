"""Python view of the prophet_lab C++ core."""

from ._core import (
    ConfigError,
    FiniteDist,
    PreconditionError,
    ValidationError,
    alpha_estimate,
    batch_value,
    clean_upper_bound,
    competitive_ratio,
    delta_gap,
    dilate,
    fast_ratio,
    gambler_values,
    kth_root,
    max_power,
    noniid_demo,
    parse_dist,
    prophet_value,
    run_cli,
    thresholds,
    zero_pad,
)

__all__ = [
    "ConfigError",
    "FiniteDist",
    "PreconditionError",
    "ValidationError",
    "alpha_estimate",
    "batch_value",
    "clean_upper_bound",
    "competitive_ratio",
    "delta_gap",
    "dilate",
    "fast_ratio",
    "gambler_values",
    "kth_root",
    "max_power",
    "noniid_demo",
    "parse_dist",
    "prophet_value",
    "run_cli",
    "thresholds",
    "zero_pad",
]
