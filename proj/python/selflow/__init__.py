"""Stochastic relaxed Ericksen-Leslie simulation and diagnostics."""

from ._selflow import (
    ArgumentError,
    IoError,
    NumericalError,
    StabilityError,
    canonical_config,
    config_hash,
    config_keys,
    defect_detect,
    ensemble,
    output_format_version,
    philox4x32,
    pohozaev_residual,
    run_path,
    selftest,
    simulate,
    sweep,
)

__all__ = [
    "ArgumentError",
    "IoError",
    "NumericalError",
    "StabilityError",
    "canonical_config",
    "config_hash",
    "config_keys",
    "defect_detect",
    "ensemble",
    "output_format_version",
    "philox4x32",
    "pohozaev_residual",
    "run_path",
    "selftest",
    "simulate",
    "sweep",
]
