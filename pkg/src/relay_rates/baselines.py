"""Closed-form reference rates: cut-set bound, DF, AF, CF and RF.

All rates are in bits per multiple-access dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .core import ChannelParams, PreconditionError, capacity

__all__ = [
    "CfSolution",
    "rate_af",
    "rate_cf",
    "rate_cutset",
    "rate_df",
    "rate_rf",
    "solve_cf_fixed_point",
]

CF_RTOL = 1e-10


def rate_cutset(p: ChannelParams) -> float:
    return min(p.rho * capacity(p.M * p.Ps), capacity(p.M**2 * p.Pr))


def rate_df(p: ChannelParams) -> float:
    return min(p.rho * capacity(p.Ps), capacity(p.M**2 * p.Pr))


def rate_af(p: ChannelParams) -> float:
    gamma = min(p.rho, 1.0)
    snr = p.M**2 * p.Pr * p.Ps / (p.M * p.Pr + p.Ps + 1.0)
    return gamma * capacity(snr)


def rate_rf(p: ChannelParams) -> float:
    """Rematch-and-forward rate; only defined for ``Ps > 1``."""
    if not p.Ps > 1.0:
        raise PreconditionError(f"RF rate requires Ps > 1 (got Ps={p.Ps:g})")
    gamma = min(p.rho, 1.0)
    # everything in logs: Ps**rho overflows for the large rho of hop-split sweeps
    log_s = p.rho * math.log(p.Ps)
    log_s_m1 = _log_expm1(log_s)
    log_mpr = math.log(p.M * p.Pr)
    log_m2pr = math.log(p.M**2 * p.Pr)
    log_den = gamma * _logaddexp(log_s, log_mpr) + (1.0 - gamma) * _logaddexp(log_s, log_m2pr)
    snr = math.exp(log_m2pr + log_s_m1 - log_den)
    return capacity(snr)


def _logaddexp(x: float, y: float) -> float:
    hi, lo = (x, y) if x >= y else (y, x)
    return hi + math.log1p(math.exp(lo - hi))


@dataclass(frozen=True)
class CfSolution:
    """Root of the CF compression constraint.

    ``p_cf`` lies in ``(0, M*Ps + 1)``. ``pole_gap`` is ``M*Ps + 1 - p_cf``,
    carried separately (with its log) because near the pole it is far
    smaller than the spacing of doubles around ``p_cf``. ``residual`` is
    ``|LHS - RHS| / LHS``. ``saturated`` is set when the root is so close to
    the pole that ``p_cf`` rounds onto it.
    """

    p_cf: float
    pole_gap: float
    residual: float
    saturated: bool = False
    log_pole_gap: float = float("nan")


def _log_expm1(y: float) -> float:
    # log(e^y - 1) without overflow for large y
    if y > 30.0:
        return y + math.log1p(-math.exp(-y))
    return math.log(math.expm1(y))


def _relative_residual(log_lhs_m1: float, log_rhs_m1: float, log_lhs: float) -> float:
    # |(LHS-1) - (RHS-1)| / LHS evaluated in logs
    big = max(log_lhs_m1, log_rhs_m1)
    diff = -math.expm1(-abs(log_lhs_m1 - log_rhs_m1))
    return math.exp(big - log_lhs) * diff


def _expand(fn, start, step, sign):
    # walk away from start, doubling the step, until fn changes sign
    z = start
    while sign * fn(z) > 0.0:
        z -= step
        step *= 2.0
    return z


def solve_cf_fixed_point(p: ChannelParams) -> CfSolution:
    """Solve the CF constraint for the effective SNR ``P_CF``.

    The right-hand side grows monotonically from 1 at ``P_CF = 0`` to a pole
    at ``P_CF = M Ps + 1``. The search variable is the log of the distance
    to whichever end of the interval the root is nearer, so both ``Pr -> 0``
    and roots hugging the pole stay resolvable.
    """
    mps = p.M * p.Ps
    pole = mps + 1.0
    log_pole = math.log(pole)
    log_mps = math.log(mps)
    log_lhs = math.log1p(p.M * p.Pr) / p.rho
    target = _log_expm1(log_lhs)

    def g_low(z):  # z = log p_cf
        return z + p.M * (log_mps - math.log(pole - math.exp(z))) - target

    def g_high(z):  # z = log(pole - p_cf)
        return math.log(pole - math.exp(z)) + p.M * (log_mps - z) - target

    log_half = log_pole - math.log(2.0)
    if g_low(log_half) >= 0.0:
        lo = _expand(g_low, log_half - 1.0, 50.0, 1.0)
        z = brentq(g_low, lo, log_half, xtol=1e-15, rtol=1e-15, maxiter=400)
        log_p = z
        p_cf = math.exp(z)
        log_gap = math.log(pole - p_cf)
    else:
        hi = _expand(g_high, log_half - 1.0, 50.0, -1.0)
        log_gap = brentq(g_high, hi, log_half, xtol=1e-15, rtol=1e-15, maxiter=400)
        gap = math.exp(log_gap)
        p_cf = pole - gap
        log_p = math.log(p_cf)
    gap = math.exp(log_gap)
    log_rhs_m1 = log_p + p.M * (log_mps - log_gap)
    residual = _relative_residual(target, log_rhs_m1, log_lhs)
    return CfSolution(p_cf, gap, residual, p_cf >= pole, log_gap)


def rate_cf(p: ChannelParams) -> float:
    return p.rho * capacity(solve_cf_fixed_point(p).p_cf)
