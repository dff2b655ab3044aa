"""Brute-force reference optimizers used to validate the structured solvers.

Both oracles evaluate the same band-term and objective functions as the
solver, so they test the search, not the formula.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .cadf import BandPowerSplit, CadfAllocation, cadf_rate_eq25
from .core import ChannelParams, ConfigError, RateReport, capacity

__all__ = ["alpha_lattice", "brute_force_cadf", "brute_force_inner", "power_lattice"]


def power_lattice(p: ChannelParams, n_grid: int):
    """AF power nodes uniform in ``C(ps_af)`` and in ``C(M^2 pr_af)``.

    Refining ``n`` to ``2n - 1`` keeps every old node.
    """
    f = np.linspace(0.0, 1.0, n_grid)
    return kernels.source_power(f, p.Ps), kernels.relay_power(f, p.M, p.Pr)


def alpha_lattice(p: ChannelParams, n_grid: int):
    """Feasible ``(alpha1, alpha2, beta1, beta2)`` lattice points, betas eliminated."""
    g = min(p.rho, 1.0)
    al = np.linspace(0.0, g, n_grid)
    A1, A2 = np.meshgrid(al, al, indexing="ij")
    # integer test keeps the lattice exact instead of comparing floats
    I, J = np.meshgrid(np.arange(n_grid), np.arange(n_grid), indexing="ij")
    ok = (I + J) <= n_grid - 1
    a1 = A1[ok]
    a2 = A2[ok]
    s = a1 + a2
    return a1, a2, np.maximum(p.rho - s, 0.0), np.maximum(1.0 - s, 0.0)


def brute_force_cadf(p: ChannelParams, n_grid: int = 13) -> RateReport:
    """Exhaustive two-band search on a fixed lattice.

    Every pair of lattice power splits is combined with every lattice
    bandwidth point; the best point is re-evaluated through
    :func:`cadf_rate_eq25`.
    """
    if int(n_grid) != n_grid or n_grid < 5:
        raise ConfigError(f"n_grid must be an integer >= 5, got {n_grid!r}")
    n_grid = int(n_grid)
    ps_nodes, pr_nodes = power_lattice(p, n_grid)
    PS, PR = np.meshgrid(ps_nodes, pr_nodes, indexing="ij")
    a = PS.ravel()
    r = PR.ravel()
    af, bc, mac = kernels.band_terms(p.M, p.Ps, p.Pr, a, r)
    a1, a2, b1, b2 = alpha_lattice(p, n_grid)
    c_bc = capacity(p.Ps)
    c_mac = capacity(p.M**2 * p.Pr)
    _, i, j, k = kernels.lattice_max(af, bc, mac, a1, a2, b1, b2, c_bc, c_mac)
    s1 = BandPowerSplit.from_af(p, a[i], r[i])
    s2 = BandPowerSplit.from_af(p, a[j], r[j])
    alloc = CadfAllocation((float(a1[k]), float(a2[k])), float(b1[k]), float(b2[k]), (s1, s2))
    return cadf_rate_eq25(p, alloc)


def brute_force_inner(p: ChannelParams, splits, n_grid: int = 513) -> float:
    """Dense ``(alpha1, alpha2)`` grid maximum for fixed power splits."""
    af, bc, mac = (np.array(x, dtype=float) for x in zip(*(
        kernels.band_terms(p.M, p.Ps, p.Pr, s.ps_af, s.pr_af) for s in splits
    )))
    a1, a2, b1, b2 = alpha_lattice(p, int(n_grid))
    vals = kernels.eq25_value(a1, a2, b1, b2, af[0], bc[0], mac[0], af[1], bc[1], mac[1],
                              capacity(p.Ps), capacity(p.M**2 * p.Pr))
    return float(np.max(vals))
