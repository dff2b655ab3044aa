"""Channel parameterization and the scalar capacity function.

Powers are linear and per dimension; every noise term has unit variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

import numpy as np


class RelayRatesError(ValueError):
    """Base class for domain errors raised by this package."""


class PreconditionError(RelayRatesError):
    """A scheme was asked for a rate outside the regime where it is defined."""


class ConstraintViolation(RelayRatesError):
    """An allocation breaks one of the bandwidth or power constraints."""


class ConfigError(RelayRatesError):
    """Invalid optimizer or experiment configuration."""


class Units(str, Enum):
    PER_MAC_DIM = "per_mac_dim"
    PER_TOTAL_DIM = "per_total_dim"


class Scheme(str, Enum):
    CADF = "CADF"
    AF = "AF"
    DF = "DF"
    CF = "CF"
    RF = "RF"
    CUTSET = "CUTSET"
    CADF_DF = "CADF_DF"
    RF_DF = "RF_DF"
    AF_DF = "AF_DF"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        try:
            return cls(name.strip().upper().replace("-", "_"))
        except ValueError:
            raise ConfigError(f"unknown scheme {name!r}") from None


@dataclass(frozen=True)
class ChannelParams:
    """Symmetric Gaussian parallel relay channel.

    Attributes
    ----------
    M : int
        Number of relays.
    Ps : float
        Source power per dimension.
    Pr : float
        Power of each relay per dimension.
    rho : float
        Bandwidth expansion factor: broadcast-hop uses per multiple-access use.
    """

    M: int
    Ps: float
    Pr: float
    rho: float = 1.0

    def __post_init__(self):
        if isinstance(self.M, bool) or int(self.M) != self.M or self.M < 1:
            raise RelayRatesError(f"M must be a positive integer, got {self.M!r}")
        object.__setattr__(self, "M", int(self.M))
        for name in ("Ps", "Pr", "rho"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise RelayRatesError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)

    def with_rho(self, rho: float) -> "ChannelParams":
        return ChannelParams(self.M, self.Ps, self.Pr, rho)

    @classmethod
    def from_total_relay_power(cls, M: int, Ps: float, total: float, rho: float = 1.0):
        """Build params holding ``M * Pr`` fixed, as the figure sweeps do."""
        return cls(M, Ps, total / M, rho)


_HALF_INV_LN2 = 0.5 / math.log(2.0)


def capacity(x):
    """Gaussian capacity ``0.5 * log2(1 + x)`` in bits per dimension.

    Accepts scalars or arrays; raises on negative or non-finite input.
    """
    if isinstance(x, (float, int)):
        if not (math.isfinite(x) and x >= 0):
            raise RelayRatesError("capacity is defined for finite x >= 0")
        return math.log1p(x) * _HALF_INV_LN2
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise RelayRatesError("capacity is defined for finite x >= 0")
    out = np.log1p(arr) * _HALF_INV_LN2
    return float(out) if out.ndim == 0 else out


def db_to_linear(x_db: float) -> float:
    if not math.isfinite(x_db):
        raise RelayRatesError(f"non-finite dB value {x_db!r}")
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    if not math.isfinite(x) or x <= 0:
        raise RelayRatesError(f"linear value must be finite and > 0, got {x!r}")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class RateReport:
    """A scheme's rate plus whatever produced it.

    ``bc_cut`` and ``mac_cut`` are the two arguments of the outer min when
    the scheme has that form; ``allocation``, ``hop_split`` and ``plan``
    carry the optimizing configuration for the CADF family, half-duplex
    and time-sharing results respectively.
    """

    scheme: Scheme
    rate: float
    units: Units = Units.PER_MAC_DIM
    bc_cut: Optional[float] = None
    mac_cut: Optional[float] = None
    allocation: Any = None
    hop_split: Optional[float] = None
    plan: Any = None
    saturated: bool = False

    def to_dict(self) -> dict:
        out = {
            "scheme": self.scheme.value,
            "rate": self.rate,
            "units": self.units.value,
            "bc_cut": self.bc_cut,
            "mac_cut": self.mac_cut,
            "hop_split": self.hop_split,
            "saturated": self.saturated,
            "allocation": None if self.allocation is None else self.allocation.to_dict(),
            "plan": None if self.plan is None else self.plan.to_dict(),
        }
        return out
