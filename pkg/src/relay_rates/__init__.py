"""Achievable rates for the symmetric Gaussian parallel relay channel."""

from .core import (
    ChannelParams,
    ConfigError,
    ConstraintViolation,
    PreconditionError,
    RateReport,
    RelayRatesError,
    Scheme,
    Units,
    capacity,
    db_to_linear,
    linear_to_db,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "ConfigError",
    "ConstraintViolation",
    "PreconditionError",
    "RateReport",
    "RelayRatesError",
    "Scheme",
    "Units",
    "capacity",
    "db_to_linear",
    "linear_to_db",
]
