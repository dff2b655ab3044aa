import math

import numpy as np
import pytest

from relay_rates import (
    ChannelParams,
    ConfigError,
    RateReport,
    RelayRatesError,
    Scheme,
    Units,
    capacity,
    db_to_linear,
    linear_to_db,
)


@pytest.mark.parametrize("x, want", [(0, 0.0), (3, 1.0), (1, 0.5), (15, 2.0)])
def test_capacity_exact_points(x, want):
    assert capacity(x) == pytest.approx(want, abs=1e-15)


def test_capacity_vectorized_matches_scalar():
    xs = np.array([0.0, 0.5, 3.0, 1e6])
    out = capacity(xs)
    assert out.shape == xs.shape
    assert np.allclose(out, [capacity(float(x)) for x in xs], rtol=0, atol=1e-15)


def test_capacity_tiny_argument_keeps_precision():
    # log1p keeps full relative precision where log(1 + x) would not
    assert capacity(1e-18) == pytest.approx(1e-18 / (2 * math.log(2)), rel=1e-12)


@pytest.mark.parametrize("bad", [-1e-3, float("nan"), float("-inf")])
def test_capacity_rejects_invalid(bad):
    with pytest.raises(RelayRatesError):
        capacity(bad)


def test_db_conversions():
    assert db_to_linear(20) == pytest.approx(100.0)
    assert db_to_linear(0) == 1.0
    assert linear_to_db(db_to_linear(7.3)) == pytest.approx(7.3, abs=1e-12)


def test_linear_to_db_rejects_nonpositive():
    with pytest.raises(RelayRatesError):
        linear_to_db(0.0)


@pytest.mark.parametrize(
    "kw",
    [
        dict(M=0, Ps=1, Pr=1, rho=1),
        dict(M=1, Ps=0, Pr=1, rho=1),
        dict(M=1, Ps=1, Pr=-1, rho=1),
        dict(M=1, Ps=1, Pr=1, rho=0),
        dict(M=1.5, Ps=1, Pr=1, rho=1),
        dict(M=1, Ps=float("inf"), Pr=1, rho=1),
    ],
)
def test_channel_params_validation(kw):
    with pytest.raises(RelayRatesError):
        ChannelParams(**kw)


def test_channel_params_helpers():
    p = ChannelParams.from_total_relay_power(4, 300.0, 10.0, rho=0.5)
    assert p.Pr == pytest.approx(2.5)
    q = p.with_rho(2.0)
    assert (q.M, q.Ps, q.Pr, q.rho) == (4, 300.0, p.Pr, 2.0)


def test_scheme_parse_is_case_and_dash_insensitive():
    assert Scheme.parse("cadf-df") is Scheme.CADF_DF
    assert Scheme.parse("Cutset") is Scheme.CUTSET
    with pytest.raises(ConfigError):
        Scheme.parse("bogus")


def test_rate_report_to_dict_roundtrips_enums():
    r = RateReport(Scheme.DF, 1.0, Units.PER_MAC_DIM, 1.0, 2.0)
    d = r.to_dict()
    assert d["scheme"] == "DF" and d["units"] == Units.PER_MAC_DIM.value
    assert d["bc_cut"] == 1.0 and d["mac_cut"] == 2.0
