import math

import mpmath as mp
import pytest
from conftest import mp_af, mp_cap, mp_df
from scipy.optimize import linprog

from relay_rates import ChannelParams, ConfigError, ConstraintViolation, PreconditionError, capacity
from relay_rates.baselines import rate_af, rate_cutset, rate_rf
from relay_rates.cadf import (
    BandPowerSplit,
    CadfAllocation,
    OptimizerConfig,
    band_snrs,
    cadf_rate_eq11,
    cadf_rate_eq25,
    check_degenerate_bounds,
    mac_region,
    optimize_cadf,
    successive_corner_check,
    verify_prop2_structure,
    verify_theorem3,
)
from relay_rates.oracle import brute_force_cadf


def _draw(rng, ps_above_one=False):
    lo = 0.0 if ps_above_one else -1.0
    return ChannelParams(int(rng.integers(1, 65)), 10 ** rng.uniform(lo, 4), 10 ** rng.uniform(-1, 4),
                         10 ** rng.uniform(-1, 1))


def _split(rng, p):
    return BandPowerSplit.from_af(p, rng.uniform(0, p.Ps), rng.uniform(0, p.Pr))


def mp_band(M, s):
    """(af, bc, mac) band terms in 50-digit arithmetic."""
    a, b, r, q = (mp.mpf(x) for x in (s.ps_af, s.ps_df, s.pr_af, s.pr_df))
    af = mp_cap(M * M * r * a / (M * r + a + 1))
    bc = mp_cap(b / (a + 1))
    mac = mp_cap(M * M * q * (a + 1) / (M * M * r * a + M * r + a + 1))
    return af, bc, mac


# ---------------------------------------------------------------- objective


def test_af_degenerate_allocation_is_af_rate():
    p = ChannelParams(3, 7.0, 2.0, 1.0)
    alloc = CadfAllocation((1.0, 0.0), 0.0, 0.0, (BandPowerSplit.from_af(p, p.Ps, p.Pr),) * 2)
    assert cadf_rate_eq25(p, alloc).rate == pytest.approx(float(mp_af(3, 7, 2, 1)), rel=1e-14)


def test_df_degenerate_allocation_is_df_rate():
    p = ChannelParams(5, 40.0, 0.3, 0.4)
    assert cadf_rate_eq25(p, CadfAllocation.pure_df(p)).rate == pytest.approx(float(mp_df(5, 40, 0.3, 0.4)), rel=1e-14)


def test_hand_instance_against_high_precision():
    p = ChannelParams(2, 3.0, 3.0, 1.0)
    s = BandPowerSplit(2.0, 1.0, 1.0, 2.0)
    alloc = CadfAllocation((1.0, 0.0), 0.0, 0.0, (s, s))
    af, bc, mac = mp_band(2, s)
    rep = cadf_rate_eq25(p, alloc)
    assert rep.bc_cut == pytest.approx(float(af + bc), rel=1e-14)
    assert rep.mac_cut == pytest.approx(float(af + mac), rel=1e-14)
    assert rep.rate == pytest.approx(float(min(af + bc, af + mac)), rel=1e-14)
    assert cadf_rate_eq11(p, alloc).rate == pytest.approx(rep.rate, rel=1e-12)


def test_zero_af_power_band_is_pure_df():
    p = ChannelParams(3, 10.0, 2.0, 2.0)
    s = BandPowerSplit.from_af(p, 0.0, 0.0)
    alloc = CadfAllocation((0.6, 0.0), 1.4, 0.4, (s, s))
    rep = cadf_rate_eq25(p, alloc)
    assert rep.bc_cut == pytest.approx(2.0 * capacity(10.0), rel=1e-14)
    assert rep.mac_cut == pytest.approx(capacity(9 * 2.0), rel=1e-14)


def test_zero_source_af_power_still_forwards_relay_noise():
    # the relays amplify pure receiver noise, which lands at the destination
    # with power M * pr_af and no AF message
    p = ChannelParams(3, 10.0, 2.0, 2.0)
    s = BandPowerSplit.from_af(p, 0.0, 0.7)
    alloc = CadfAllocation((0.6, 0.0), 1.4, 0.4, (s, s))
    rep = cadf_rate_eq25(p, alloc)
    want_mac = 0.6 * capacity(9 * s.pr_df / (3 * 0.7 + 1)) + 0.4 * capacity(9 * 2.0)
    assert rep.bc_cut == pytest.approx(2.0 * capacity(10.0), rel=1e-14)
    assert rep.mac_cut == pytest.approx(want_mac, rel=1e-14)


def test_two_forms_agree_on_random_allocations(rng):
    for _ in range(2000):
        p = _draw(rng)
        x, y = sorted(rng.uniform(0, 1, 2))
        g = min(p.rho, 1.0)
        a1, a2 = g * x, g * (y - x)
        alloc = CadfAllocation((a1, a2), p.rho - a1 - a2, 1 - a1 - a2, (_split(rng, p), _split(rng, p)))
        r25 = cadf_rate_eq25(p, alloc).rate
        assert cadf_rate_eq11(p, alloc).rate == pytest.approx(r25, rel=1e-12, abs=1e-300)


def test_half_duplex_allocation_units_and_constraint():
    p = ChannelParams(2, 5.0, 1.0, 1.0)
    s = BandPowerSplit.from_af(p, 2.0, 0.5)
    ok = CadfAllocation((0.25, 0.0), 0.3, 0.2, (s, s), half_duplex=True)
    assert cadf_rate_eq25(p, ok).units.value == "per_total_dim"
    with pytest.raises(ConstraintViolation, match="half-duplex bandwidth"):
        cadf_rate_eq25(p, CadfAllocation((0.25, 0.0), 0.3, 0.3, (s, s), half_duplex=True))


@pytest.mark.parametrize(
    "alloc_kw, match",
    [
        (dict(alpha=(0.5, 0.0), beta1=0.4, beta2=0.5), "broadcast bandwidth"),
        (dict(alpha=(0.5, 0.0), beta1=0.5, beta2=0.6), "multiple-access bandwidth"),
        (dict(alpha=(-0.1, 0.6), beta1=0.5, beta2=0.5), "band nonnegativity"),
    ],
)
def test_bandwidth_violations_name_the_constraint(alloc_kw, match):
    p = ChannelParams(2, 5.0, 1.0, 1.0)
    s = BandPowerSplit.from_af(p, 1.0, 0.5)
    with pytest.raises(ConstraintViolation, match=match):
        cadf_rate_eq25(p, CadfAllocation(splits=(s, s), **alloc_kw))


def test_power_violations_name_the_constraint():
    p = ChannelParams(2, 5.0, 1.0, 1.0)
    with pytest.raises(ConstraintViolation, match="source power split"):
        BandPowerSplit(1.0, 3.0, 0.5, 0.5).check(p)
    with pytest.raises(ConstraintViolation, match="relay power split"):
        BandPowerSplit(1.0, 4.0, 0.5, 0.2).check(p)
    with pytest.raises(ConstraintViolation, match="power nonnegativity"):
        BandPowerSplit(-1.0, 6.0, 0.5, 0.5).check(p)


# ---------------------------------------------------------------- MAC corner


def test_mac_corner_without_relay_df_power():
    p = ChannelParams(2, 3.0, 3.0, 1.0)
    s = BandPowerSplit.from_af(p, 2.0, 3.0)
    c = mac_region(p, 0.7, s)
    snr_af = band_snrs(p, s)[0]
    assert c.r_df == pytest.approx(0.0, abs=1e-15)
    assert c.r_af == pytest.approx(0.7 * capacity(snr_af), rel=1e-14)


def test_mac_corner_without_relay_af_power():
    p = ChannelParams(2, 3.0, 3.0, 1.0)
    s = BandPowerSplit.from_af(p, 2.0, 0.0)
    c = mac_region(p, 1.0, s)
    assert c.r_af == 0.0
    # no AF relay power: the relays forward nothing but the DF layer
    assert c.sum == pytest.approx(capacity(4 * 3.0), rel=1e-14)
    assert c.r_df == pytest.approx(c.sum, rel=1e-14)


def test_mac_corner_hand_values():
    p = ChannelParams(2, 3.0, 3.0, 1.0)
    s = BandPowerSplit(2.0, 1.0, 1.0, 2.0)
    c = mac_region(p, 1.0, s)
    af, _, mac = mp_band(2, s)
    assert c.r_af == pytest.approx(float(af), rel=1e-14)
    assert c.r_df == pytest.approx(float(mac), rel=1e-12)
    assert c.r_af + c.r_df == pytest.approx(c.sum, rel=1e-14)
    assert c.r_df <= c.df_bound


def test_mac_region_rejects_negative_fraction():
    p = ChannelParams(2, 3.0, 3.0, 1.0)
    with pytest.raises(ConstraintViolation):
        mac_region(p, -0.1, BandPowerSplit.from_af(p, 1, 1))


def test_successive_decoding_reaches_corner(rng):
    for _ in range(1000):
        p = _draw(rng)
        ok, w = successive_corner_check(p, _split(rng, p))
        assert ok, w


def test_successive_decoding_trivial_without_df_power():
    p = ChannelParams(4, 9.0, 2.0, 1.0)
    ok, w = successive_corner_check(p, BandPowerSplit.from_af(p, 3.0, 2.0))
    assert ok and w["snr_df_succ"] == 0.0


# ---------------------------------------------------------------- inner problem


def _lp_inner(p, splits):
    """max t s.t. t <= both cuts, alpha in the triangle; betas eliminated."""
    g = min(p.rho, 1.0)
    c1, c2 = capacity(p.Ps), capacity(p.M**2 * p.Pr)
    rows = []
    for s in splits:
        af, bc, mac = (float(x) for x in mp_band(p.M, s))
        rows.append((af + bc - c1, af + mac - c2))
    (u1, v1), (u2, v2) = rows
    # variables (a1, a2, t); minimize -t
    A = [[-u1, -u2, 1.0], [-v1, -v2, 1.0], [1.0, 1.0, 0.0]]
    b = [p.rho * c1, c2, g]
    res = linprog([0, 0, -1], A_ub=A, b_ub=b, bounds=[(0, None), (0, None), (None, None)], method="highs")
    return -res.fun


def test_inner_solver_matches_linear_program(rng):
    from relay_rates.cadf import _inner_vertex_solve

    for _ in range(300):
        p = _draw(rng)
        splits = (_split(rng, p), _split(rng, p))
        val = _inner_vertex_solve(p, splits)[0]
        assert val == pytest.approx(_lp_inner(p, splits), rel=1e-9, abs=1e-9)


def test_bandwidth_vertex_structure_random(rng):
    for _ in range(40):
        p = _draw(rng)
        ok, w = verify_prop2_structure(p, (_split(rng, p), _split(rng, p)))
        assert ok, w


def test_mac_only_band_for_narrow_broadcast(rng):
    for _ in range(30):
        p = _draw(rng).with_rho(10 ** rng.uniform(-1, -0.01))
        ok, w = verify_prop2_structure(p, (_split(rng, p), _split(rng, p)), n_grid=129, tol=1e-3)
        assert w["beta2"] > 0


# ---------------------------------------------------------------- optimizer


def test_config_validation():
    for kw in (dict(grid_points=1), dict(shrink=1.0), dict(refine_passes=-1), dict(polish_maxiter=0)):
        with pytest.raises(ConfigError):
            OptimizerConfig(**kw)


def test_optimizer_dominates_references(rng):
    for _ in range(60):
        p = _draw(rng, ps_above_one=True)
        rep = optimize_cadf(p)
        rep.allocation.check(p)
        b = check_degenerate_bounds(p, rep)
        assert min(b.values()) >= -1e-9, b
        assert rep.rate >= rate_rf(p) - 1e-9


def test_optimizer_meets_capacity_when_broadcast_surplus_wins():
    p = ChannelParams(2, 100.0, 0.5, 3.0)
    assert (p.rho - 1) * capacity(p.Ps) > capacity(p.M**2 * p.Pr)
    rep = optimize_cadf(p)
    assert rep.rate == pytest.approx(capacity(4 * 0.5), abs=1e-12)
    assert rep.rate == pytest.approx(rate_cutset(p), abs=1e-12)


def test_optimizer_against_fine_oracle_fig5_point():
    p = ChannelParams(4, 300.0, 2.5, 0.5)
    opt = optimize_cadf(p).rate
    ref = brute_force_cadf(p, 21).rate
    assert -1e-9 <= opt - ref <= 1e-3


def test_optimizer_is_deterministic():
    p = ChannelParams(8, 30.0, 4.0, 0.7)
    assert optimize_cadf(p) == optimize_cadf(p)


def test_pure_af_when_bands_forced_af():
    p = ChannelParams(3, 12.0, 4.0, 1.0)
    assert cadf_rate_eq25(p, CadfAllocation.pure_af(p)).rate == pytest.approx(rate_af(p), rel=1e-14)


# ---------------------------------------------------------------- RF-beating witness


def test_rf_witness_narrow_broadcast():
    w = verify_theorem3(ChannelParams(2, 300.0, 5.0, 0.5))
    assert w.regime == "rho<=1" and w.holds
    d = w.details
    assert w.witness_rate >= d["lower_bound"] - 1e-12 >= w.rf_rate - 2e-12


def test_rf_witness_wide_broadcast():
    w = verify_theorem3(ChannelParams(2, 10.0, 75.0, 2.0))
    assert w.regime == "rho>1" and w.holds
    assert w.details["mp_af_printed"] < w.details["mp_af_bound"]
    assert w.details["mp_af_exact"] < w.details["mp_af_bound"]


def test_rf_witness_matched_bandwidth_keeps_relay_all_af():
    p = ChannelParams(3, 20.0, 2.0, 1.0)
    w = verify_theorem3(p)
    s = w.allocation.splits[0]
    assert w.allocation.alpha[0] == 1.0 and w.allocation.beta1 == w.allocation.beta2 == 0.0
    assert s.pr_af == p.Pr and s.ps_af == pytest.approx(p.Ps - 1.0)
    assert w.witness_rate >= w.rf_rate


def test_rf_witness_capacity_regime_and_precondition():
    w = verify_theorem3(ChannelParams(2, 100.0, 0.5, 3.0))
    assert w.regime == "capacity" and w.holds
    with pytest.raises(PreconditionError):
        verify_theorem3(ChannelParams(2, 1.0, 0.5, 3.0))


def test_rf_witness_random(rng):
    for _ in range(60):
        w = verify_theorem3(_draw(rng, ps_above_one=True))
        assert w.holds, (w.regime, w.margins)
        assert math.isfinite(w.optimized_rate)
