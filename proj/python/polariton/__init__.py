"""Exciton-polariton condensation kinetics in a magnetic field."""

from ._polariton import (
    Config,
    ConfigError,
    DomainError,
    Model,
    NumericalError,
    __version__,
    apply_preset,
    build_model,
    config_keys,
    dispersion,
    field_state,
    find_threshold,
    kinematic_R,
    run_point,
    run_scurve,
)

__all__ = [
    "Config",
    "ConfigError",
    "DomainError",
    "Model",
    "NumericalError",
    "__version__",
    "apply_preset",
    "build_model",
    "config_keys",
    "dispersion",
    "field_state",
    "find_threshold",
    "kinematic_R",
    "run_point",
    "run_scurve",
]
