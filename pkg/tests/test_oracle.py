import numpy as np
import pytest

from relay_rates import ChannelParams, ConfigError, capacity
from relay_rates.baselines import rate_af, rate_df
from relay_rates.cadf import BandPowerSplit, _inner_vertex_solve
from relay_rates.oracle import alpha_lattice, brute_force_cadf, brute_force_inner, power_lattice


def test_rejects_small_grid():
    with pytest.raises(ConfigError):
        brute_force_cadf(ChannelParams(2, 3.0, 3.0, 1.0), 4)


def test_lattice_contains_endpoints_and_nests():
    p = ChannelParams(3, 40.0, 2.0, 0.7)
    ps5, pr5 = power_lattice(p, 5)
    ps9, pr9 = power_lattice(p, 9)
    assert ps5[0] == 0.0 and ps5[-1] == pytest.approx(p.Ps) and pr5[-1] == pytest.approx(p.Pr)
    assert np.allclose(ps9[::2], ps5) and np.allclose(pr9[::2], pr5)
    a1, a2, b1, b2 = alpha_lattice(p, 5)
    assert np.all(a1 + a2 <= 0.7 + 1e-15) and np.all(b1 >= 0) and np.all(b2 >= 0)
    assert len(a1) == 15


@pytest.mark.parametrize("p", [ChannelParams(1, 1e4, 1e-3, 1.0), ChannelParams(8, 1e-2, 1e3, 1.0),
                               ChannelParams(4, 50.0, 50.0, 1.0)])
def test_coarse_oracle_covers_degenerate_schemes(p):
    assert brute_force_cadf(p, 5).rate >= max(rate_af(p), rate_df(p)) - 1e-12


def test_refinement_is_monotone():
    p = ChannelParams(4, 300.0, 2.5, 0.5)
    vals = [brute_force_cadf(p, n).rate for n in (5, 9, 17)]
    assert vals[0] <= vals[1] + 1e-15 <= vals[2] + 2e-15


def test_deterministic():
    p = ChannelParams(5, 20.0, 3.0, 1.7)
    assert brute_force_cadf(p, 9) == brute_force_cadf(p, 9)


def test_case_2i_approaches_capacity_from_below():
    p = ChannelParams(2, 100.0, 0.5, 3.0)
    v = brute_force_cadf(p, 9).rate
    assert v <= capacity(4 * 0.5) + 1e-12
    assert v == pytest.approx(capacity(2.0), abs=1e-12)


def test_inner_matches_vertex_solver_single_band():
    p = ChannelParams(2, 3.0, 3.0, 1.0)
    s = BandPowerSplit.from_af(p, 2.0, 1.0)
    assert brute_force_inner(p, (s, s), 513) == pytest.approx(_inner_vertex_solve(p, (s, s))[0], abs=1e-6)


def test_inner_alpha_free_region_gives_df():
    # all-DF splits make every alpha band a worse copy of the DF bands
    p = ChannelParams(3, 8.0, 1.5, 1.0)
    s = BandPowerSplit.from_af(p, 0.0, 0.0)
    assert brute_force_inner(p, (s, s), 65) == pytest.approx(rate_df(p), rel=1e-14)


def test_inner_random_agreement(rng):
    for _ in range(100):
        p = ChannelParams(int(rng.integers(1, 65)), 10 ** rng.uniform(-1, 4), 10 ** rng.uniform(-1, 4),
                          10 ** rng.uniform(-1, 1))
        splits = tuple(BandPowerSplit.from_af(p, rng.uniform(0, p.Ps), rng.uniform(0, p.Pr)) for _ in range(2))
        val, _, _, g, lip = _inner_vertex_solve(p, splits)
        grid = brute_force_inner(p, splits, 513)
        assert grid <= val + 1e-12
        assert val - grid <= 1e-6 + 2 * g / 512 * lip
