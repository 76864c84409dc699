"""Fractionally damped wave equations on the unit interval."""

from ._fracdamp import (
    CertificateError,
    ConfigError,
    InsufficientPoints,
    Quadrature,
    canonical_config,
    closed_integral_resolvent,
    closed_integral_squared,
    config_hash,
    diffusive_apply,
    fit_decay,
    fractional_integral,
    gamma_const,
    kv_coefficients,
    p_weight,
    predict_decay,
    resolvent_scan,
    run,
    simulate,
)

__all__ = [
    "CertificateError",
    "ConfigError",
    "InsufficientPoints",
    "Quadrature",
    "canonical_config",
    "closed_integral_resolvent",
    "closed_integral_squared",
    "config_hash",
    "diffusive_apply",
    "fit_decay",
    "fractional_integral",
    "gamma_const",
    "kv_coefficients",
    "p_weight",
    "predict_decay",
    "resolvent_scan",
    "run",
    "simulate",
]
