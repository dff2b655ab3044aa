import numpy as np
import pytest

from relay_rates import ChannelParams, ConfigError, PreconditionError, Scheme, capacity
from relay_rates.baselines import rate_af, rate_cutset, rate_df, rate_rf
from relay_rates.cadf import BandPowerSplit, CadfAllocation, cadf_rate_eq25
from relay_rates.half_duplex import hd_rate


def _dense(fn, p, n=20001):
    ws = np.linspace(0, 1, n)[1:-1]
    return max((1 - w) * fn(p.with_rho(w / (1 - w))) for w in ws)


def test_df_symmetric_single_relay():
    p = ChannelParams(1, 7.0, 7.0, 1.0)
    rep = hd_rate("DF", p)
    assert rep.hop_split == pytest.approx(0.5, abs=1e-15)
    assert rep.rate == pytest.approx(0.5 * capacity(7.0), rel=1e-14)
    assert rep.units.value == "per_total_dim"


@pytest.mark.parametrize("fn, scheme", [(rate_af, "AF"), (rate_rf, "RF"), (rate_cutset, "CUTSET"), (rate_df, "DF")])
def test_baselines_match_dense_scan(fn, scheme):
    p = ChannelParams(8, 300.0, 10 / 8, 1.0)
    n = 20001
    ref = _dense(fn, p, n)
    got = hd_rate(scheme, p).rate
    # every objective is Lipschitz in w with constant at most the larger hop capacity
    lip = max(capacity(p.M * p.Ps), capacity(p.M**2 * p.Pr))
    assert ref - 1e-12 <= got <= ref + lip / (n - 1)


def test_all_af_pattern_halves_af_rate():
    p = ChannelParams(4, 30.0, 2.0, 1.0)
    s = BandPowerSplit.from_af(p, p.Ps, p.Pr)
    alloc = CadfAllocation((0.5, 0.0), 0.0, 0.0, (s, s), half_duplex=True)
    assert cadf_rate_eq25(p, alloc).rate == pytest.approx(0.5 * rate_af(p), rel=1e-14)


def test_cadf_dominates_other_schemes_fig7_point():
    p = ChannelParams(32, 300.0, 10 / 32, 1.0)
    cadf = hd_rate(Scheme.CADF, p)
    cadf.allocation.check(p)
    for s in ("AF", "DF", "RF"):
        assert cadf.rate > hd_rate(s, p).rate
    assert cadf.rate <= hd_rate("CUTSET", p).rate + 1e-12


def test_cadf_ignores_rho():
    p = ChannelParams(4, 10.0, 75.0, 1.0)
    assert hd_rate("CADF", p).rate == hd_rate("CADF", p.with_rho(3.0)).rate


def test_cadf_dominates_on_random_draws(rng):
    for _ in range(15):
        p = ChannelParams(int(rng.integers(1, 65)), 10 ** rng.uniform(0.01, 3), 10 ** rng.uniform(-1, 3), 1.0)
        c = hd_rate("CADF", p).rate
        for s in ("AF", "DF", "RF"):
            assert c >= hd_rate(s, p).rate - 1e-9
        assert c <= hd_rate("CUTSET", p).rate + 1e-9


def test_errors():
    with pytest.raises(PreconditionError):
        hd_rate("RF", ChannelParams(2, 1.0, 3.0, 1.0))
    with pytest.raises(ConfigError):
        hd_rate("AF_DF", ChannelParams(2, 3.0, 3.0, 1.0))
