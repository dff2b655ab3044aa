"""Half-duplex variants: both hops share one unit of bandwidth.

Rates here are per total dimension. For the reference schemes the
broadcast hop gets a fraction ``w`` and the multiple-access hop ``1 - w``;
the per-MAC-dimension rate at ``rho = w / (1 - w)`` is then scaled by
``1 - w`` and maximized over ``w``. CADF is optimized directly under
``2 * alpha + beta1 + beta2 = 1`` with a single shared band.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import kernels
from .baselines import rate_af, rate_cf, rate_rf
from .cadf import CadfAllocation, OptimizerConfig, cadf_rate_eq25
from .core import ChannelParams, ConfigError, RateReport, Scheme, Units, capacity

__all__ = ["HD_SCHEMES", "hd_cutset", "hd_rate"]

HD_SCHEMES = (Scheme.AF, Scheme.DF, Scheme.CF, Scheme.RF, Scheme.CADF, Scheme.CUTSET)
W_GRID = 512


def _two_cut_split(c_bc, c_mac):
    # max_w min(w c_bc, (1 - w) c_mac) equalizes the cuts
    w = c_mac / (c_bc + c_mac)
    return w * c_bc, w


def hd_cutset(p: ChannelParams) -> RateReport:
    rate, w = _two_cut_split(capacity(p.M * p.Ps), capacity(p.M**2 * p.Pr))
    return RateReport(Scheme.CUTSET, rate, Units.PER_TOTAL_DIM, rate, rate, hop_split=w)


def _hd_df(p):
    rate, w = _two_cut_split(capacity(p.Ps), capacity(p.M**2 * p.Pr))
    return RateReport(Scheme.DF, rate, Units.PER_TOTAL_DIM, rate, rate, hop_split=w)


def _scaled(rate_fn, p, w):
    return (1.0 - w) * rate_fn(p.with_rho(w / (1.0 - w)))


def _best_split(rate_fn, p):
    """Maximize ``(1 - w) * rate(rho = w / (1 - w))`` over ``w`` in (0, 1).

    A uniform scan brackets the best node; a bounded scalar search then
    refines inside the neighbouring cells.
    """
    ws = np.arange(1, W_GRID) / W_GRID
    vals = np.array([_scaled(rate_fn, p, w) for w in ws])
    k = int(np.argmax(vals))
    best_w, best = float(ws[k]), float(vals[k])
    lo = ws[k - 1] if k > 0 else 0.5 / W_GRID
    hi = ws[k + 1] if k + 1 < ws.size else 1.0 - 0.5 / W_GRID
    res = minimize_scalar(lambda w: -_scaled(rate_fn, p, w), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    if res.success and -res.fun > best:
        best_w, best = float(res.x), float(-res.fun)
    return best, best_w


def _hd_cadf(p, cfg, seeds):
    n = int(cfg.grid_points)
    M, Ps, Pr = p.M, p.Ps, p.Pr
    c1 = capacity(Ps)
    c2 = capacity(M**2 * Pr)
    sv = np.array([0.5, 0.0, 0.0])

    def solve(a, r):
        af, bc, mac = kernels.band_terms(M, Ps, Pr, a, r)
        m = a.shape[0]
        f1 = np.column_stack([0.5 * (af + bc), np.full(m, c1), np.zeros(m)])
        f2 = np.column_stack([0.5 * (af + mac), np.zeros(m), np.full(m, c2)])
        val, w, mass = kernels.triangle_batch(f1, f2, sv)
        best = val.max()
        # deterministic tie-break: least shared bandwidth, then lowest index
        cand = np.flatnonzero(val >= best - kernels.TIE_TOL)
        k = int(cand[np.argmin(mass[cand])])
        return float(val[k]), k, np.asarray(w[k], dtype=float)

    f = np.linspace(0.0, 1.0, n)
    s_nodes = np.unique(np.concatenate([f, kernels.source_coord(f * Ps, Ps)]))
    t_nodes = np.unique(np.concatenate([f, kernels.relay_coord(f * Pr, M, Pr)]))
    S, T = np.meshgrid(s_nodes, t_nodes, indexing="ij")
    sa = np.array([x for x, _ in seeds])
    sr = np.array([y for _, y in seeds])
    a = np.concatenate([kernels.source_power(S.ravel(), Ps), sa])
    r = np.concatenate([kernels.relay_power(T.ravel(), M, Pr), sr])
    val, k, w = solve(a, r)

    width = 1.0
    for _ in range(int(cfg.refine_passes)):
        if w[0] == 0.0:
            break
        width *= cfg.shrink
        cs = float(kernels.source_coord(a[k], Ps))
        ct = float(kernels.relay_coord(r[k], M, Pr))
        lo_s = min(max(cs - 0.5 * width, 0.0), 1.0 - width)
        lo_t = min(max(ct - 0.5 * width, 0.0), 1.0 - width)
        gs, gt = np.meshgrid(np.linspace(lo_s, lo_s + width, n), np.linspace(lo_t, lo_t + width, n), indexing="ij")
        a = np.concatenate([[a[k]], sa, kernels.source_power(gs.ravel(), Ps)])
        r = np.concatenate([[r[k]], sr, kernels.relay_power(gt.ravel(), M, Pr)])
        val, k, w = solve(a, r)

    band = (float(a[k]), float(r[k]))
    if cfg.polish and w[0] > 0.0:
        def neg(z):
            z = np.clip(z, 0.0, 1.0)
            aa = np.array([kernels.source_power(z[0], Ps)])
            rr = np.array([kernels.relay_power(z[1], M, Pr)])
            return -solve(aa, rr)[0]

        z0 = np.array([kernels.source_coord(a[k], Ps), kernels.relay_coord(r[k], M, Pr)])
        res = minimize(neg, z0, method="Nelder-Mead",
                       options=dict(xatol=1e-10, fatol=1e-15, maxiter=int(cfg.polish_maxiter)))
        if -res.fun > val:
            z = np.clip(res.x, 0.0, 1.0)
            band = (float(kernels.source_power(z[0], Ps)), float(kernels.relay_power(z[1], M, Pr)))
            val, _, w = solve(np.array([band[0]]), np.array([band[1]]))

    alpha = 0.5 * float(w[0])
    beta1 = float(w[1])
    beta2 = max(1.0 - 2.0 * alpha - beta1, 0.0)
    alloc = CadfAllocation.single_band(p, alpha, band[0], band[1], beta1, beta2, half_duplex=True)
    rep = cadf_rate_eq25(p, alloc)
    return RateReport(Scheme.CADF, rep.rate, Units.PER_TOTAL_DIM, rep.bc_cut, rep.mac_cut,
                      allocation=rep.allocation, hop_split=alpha + beta1)


def hd_rate(scheme, p: ChannelParams, cfg: OptimizerConfig | None = None) -> RateReport:
    """Half-duplex rate of one scheme, per total dimension.

    ``p.rho`` is ignored: the hop split is optimized. ``hop_split`` in the
    report is the broadcast hop's share of the bandwidth.

    Raises
    ------
    ConfigError
        For schemes without a half-duplex variant.
    PreconditionError
        For RF with ``Ps <= 1``.
    """
    scheme = Scheme.parse(scheme) if isinstance(scheme, str) else scheme
    if scheme not in HD_SCHEMES:
        raise ConfigError(f"no half-duplex variant for scheme {scheme.value}")
    cfg = cfg or OptimizerConfig()
    if scheme is Scheme.CUTSET:
        return hd_cutset(p)
    if scheme is Scheme.DF:
        return _hd_df(p)
    if scheme is Scheme.CADF:
        seeds = [(p.Ps, p.Pr)]
        if p.Ps > 1.0:
            _, w = _best_split(rate_rf, p)
            wa, wr = kernels.witness_powers(p.M, p.Ps, p.Pr, w / (1.0 - w))
            if wa >= 0.0:
                seeds.append((wa, wr))
        return _hd_cadf(p, cfg, seeds)
    fn = {Scheme.AF: rate_af, Scheme.CF: rate_cf, Scheme.RF: rate_rf}[scheme]
    if scheme is Scheme.RF:
        fn(p)  # raise the precondition error before scanning
    rate, w = _best_split(fn, p)
    return RateReport(scheme, rate, Units.PER_TOTAL_DIM, hop_split=w)
