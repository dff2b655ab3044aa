"""Shared high-precision reference formulas (mpmath, 50 digits).

These are written directly from the rate definitions and share no code
with the package, so they serve as an independent route for value checks.
"""

import mpmath as mp
import numpy as np
import pytest

mp.mp.dps = 50


def mp_cap(x):
    return mp.log(1 + mp.mpf(x)) / (2 * mp.log(2))


def mp_cutset(M, Ps, Pr, rho):
    return min(rho * mp_cap(M * mp.mpf(Ps)), mp_cap(M * M * mp.mpf(Pr)))


def mp_df(M, Ps, Pr, rho):
    return min(rho * mp_cap(Ps), mp_cap(M * M * mp.mpf(Pr)))


def mp_af(M, Ps, Pr, rho):
    Ps, Pr = mp.mpf(Ps), mp.mpf(Pr)
    return min(mp.mpf(rho), 1) * mp_cap(M * M * Pr * Ps / (M * Pr + Ps + 1))


def mp_rf(M, Ps, Pr, rho):
    Ps, Pr, rho = mp.mpf(Ps), mp.mpf(Pr), mp.mpf(rho)
    g = min(rho, 1)
    s = Ps**rho
    return mp_cap(M * M * Pr * (s - 1) / ((s + M * Pr) ** g * (s + M * M * Pr) ** (1 - g)))


def mp_cf_root(M, Ps, Pr, rho):
    """Bisection in 50-digit arithmetic on (0, M*Ps + 1)."""
    M, Ps, Pr, rho = int(M), mp.mpf(Ps), mp.mpf(Pr), mp.mpf(rho)
    lhs = (1 + M * Pr) ** (1 / rho)
    pole = M * Ps + 1

    def f(p):
        return 1 + p * (M * Ps / (pole - p)) ** M - lhs

    lo, hi = mp.mpf(0), pole
    for _ in range(400):
        mid = (lo + hi) / 2
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
