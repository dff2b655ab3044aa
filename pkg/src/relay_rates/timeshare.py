"""Time sharing between a relaying scheme and plain DF (no bandwidth mismatch).

Scheme A (CADF, RF or AF) gets ``t1`` of the broadcast dimensions and
``t2`` of the multiple-access dimensions; DF runs on the rest. Each phase
has its own peak powers while average power is conserved. Scheme A then
sees an expansion factor ``t1 / t2`` and its per-MAC-dimension rate is
scaled by ``t2``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .baselines import rate_af, rate_cutset, rate_rf
from .cadf import OptimizerConfig, optimize_cadf
from .core import ChannelParams, ConfigError, RateReport, Scheme, Units, capacity

__all__ = [
    "TS_VARIANTS",
    "TimeShareConfig",
    "TimeSharePlan",
    "evaluate_plan",
    "optimize_timeshare",
    "plan_from_fractions",
    "timeshare_cutset",
]

TS_VARIANTS = (Scheme.CADF_DF, Scheme.RF_DF, Scheme.AF_DF)
_PARTNER = {Scheme.CADF_DF: Scheme.CADF, Scheme.RF_DF: Scheme.RF, Scheme.AF_DF: Scheme.AF}


@dataclass(frozen=True)
class TimeSharePlan:
    """Dimension split and per-phase powers; phase A is the relaying scheme, B is DF."""

    t1: float
    t2: float
    ps_a: float
    ps_b: float
    pr_a: float
    pr_b: float

    def check(self, p: ChannelParams, rtol: float = 1e-9) -> None:
        from .core import ConstraintViolation

        for name in ("t1", "t2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConstraintViolation(f"dimension share {name}={v!r} must lie in [0, 1]")
        for name in ("ps_a", "ps_b", "pr_a", "pr_b"):
            if getattr(self, name) < 0.0:
                raise ConstraintViolation(f"phase power {name} must be >= 0")
        src = self.t1 * self.ps_a + (1.0 - self.t1) * self.ps_b
        rel = self.t2 * self.pr_a + (1.0 - self.t2) * self.pr_b
        if abs(src - p.Ps) > rtol * p.Ps:
            raise ConstraintViolation(f"source energy: t1*ps_a + (1-t1)*ps_b = {src!r} must equal Ps={p.Ps!r}")
        if abs(rel - p.Pr) > rtol * p.Pr:
            raise ConstraintViolation(f"relay energy: t2*pr_a + (1-t2)*pr_b = {rel!r} must equal Pr={p.Pr!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TimeShareConfig:
    """Search settings: coarse grid sizes, local restarts, final CADF polish."""

    t_points: int = 17
    power_points: int = 9
    restarts: int = 4
    local_maxiter: int = 400
    cadf_nodes: int = 9
    final_candidates: int = 3
    cadf: OptimizerConfig = OptimizerConfig()

    def __post_init__(self):
        for name in ("t_points", "power_points", "cadf_nodes"):
            v = getattr(self, name)
            if int(v) != v or v < 2:
                raise ConfigError(f"{name} must be an integer >= 2, got {v!r}")
        for name in ("restarts", "local_maxiter", "final_candidates"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")


def _split(total, share, frac):
    # average ``total`` over a phase of size ``share`` receiving ``frac`` of the energy
    if share <= 0.0:
        return 0.0, total
    if share >= 1.0:
        return total, 0.0
    return frac * total / share, (1.0 - frac) * total / (1.0 - share)


def plan_from_fractions(p: ChannelParams, t1, t2, fs, fr) -> TimeSharePlan:
    """Plan from dimension shares and the energy fractions given to phase A."""
    t1 = min(max(float(t1), 0.0), 1.0)
    t2 = min(max(float(t2), 0.0), 1.0)
    fs = min(max(float(fs), 0.0), 1.0)
    fr = min(max(float(fr), 0.0), 1.0)
    ps_a, ps_b = _split(p.Ps, t1, fs)
    pr_a, pr_b = _split(p.Pr, t2, fr)
    return TimeSharePlan(t1, t2, ps_a, ps_b, pr_a, pr_b)


def _df_phase(M, plan):
    return min((1.0 - plan.t1) * capacity(plan.ps_b), (1.0 - plan.t2) * capacity(M * M * plan.pr_b))


def _phase_a(scheme, M, plan, cfg):
    """Scheme A's contribution ``t2 * R_A``; ``-inf`` when RF is infeasible."""
    if plan.t1 <= 0.0 or plan.t2 <= 0.0:
        return 0.0
    if scheme is Scheme.RF and not plan.ps_a > 1.0:
        return -math.inf
    if plan.ps_a <= 0.0 or plan.pr_a <= 0.0:
        return 0.0
    q = ChannelParams(M, plan.ps_a, plan.pr_a, plan.t1 / plan.t2)
    if scheme is Scheme.AF:
        r = rate_af(q)
    elif scheme is Scheme.RF:
        r = rate_rf(q)
    else:
        r = optimize_cadf(q, cfg).rate
    return plan.t2 * r


def evaluate_plan(variant, p: ChannelParams, plan: TimeSharePlan, cfg: OptimizerConfig | None = None) -> float:
    """Composite rate of one plan, per total dimension; ``-inf`` if infeasible."""
    variant = Scheme.parse(variant) if isinstance(variant, str) else variant
    plan.check(p)
    return _phase_a(_PARTNER[variant], p.M, plan, cfg or OptimizerConfig()) + _df_phase(p.M, plan)


def timeshare_cutset(p: ChannelParams, plan: TimeSharePlan) -> float:
    """Cut-set bound of the two phases of a plan, summed."""
    a = 0.0
    if plan.t1 > 0.0 and plan.t2 > 0.0 and plan.ps_a > 0.0 and plan.pr_a > 0.0:
        a = plan.t2 * rate_cutset(ChannelParams(p.M, plan.ps_a, plan.pr_a, plan.t1 / plan.t2))
    b = min((1.0 - plan.t1) * capacity(p.M * plan.ps_b), (1.0 - plan.t2) * capacity(p.M**2 * plan.pr_b))
    return a + b


class _Fast:
    """Cheap phase-A rates for many plans at once (coarse CADF lattice)."""

    def __init__(self, scheme, M, cfg):
        self.scheme = scheme
        self.M = M
        self.nodes = np.linspace(0.0, 1.0, int(cfg.cadf_nodes))

    def __call__(self, plans):
        out = np.zeros(len(plans))
        idx = []
        for k, pl in enumerate(plans):
            if pl.t1 <= 0.0 or pl.t2 <= 0.0:
                continue
            if self.scheme is Scheme.RF and not pl.ps_a > 1.0:
                out[k] = -math.inf
                continue
            if pl.ps_a <= 0.0 or pl.pr_a <= 0.0:
                continue
            if self.scheme is Scheme.CADF:
                idx.append(k)
                continue
            q = ChannelParams(self.M, pl.ps_a, pl.pr_a, pl.t1 / pl.t2)
            out[k] = pl.t2 * (rate_af(q) if self.scheme is Scheme.AF else rate_rf(q))
        if idx:
            ps = np.array([plans[k].ps_a for k in idx])
            pr = np.array([plans[k].pr_a for k in idx])
            t2 = np.array([plans[k].t2 for k in idx])
            rho = np.array([plans[k].t1 for k in idx]) / t2
            out[idx] = t2 * kernels.cadf_batch(self.M, ps, pr, rho, self.nodes, self.nodes)
        t1 = np.array([pl.t1 for pl in plans])
        t2 = np.array([pl.t2 for pl in plans])
        ps_b = np.array([pl.ps_b for pl in plans])
        pr_b = np.array([pl.pr_b for pl in plans])
        out += np.minimum((1.0 - t1) * capacity(ps_b), (1.0 - t2) * capacity(self.M**2 * pr_b))
        return out


def _coarse_plans(p, cfg):
    ts = np.linspace(0.0, 1.0, int(cfg.t_points))
    fs = np.linspace(0.0, 1.0, int(cfg.power_points))
    axis = []
    for t in ts:
        if 0.0 < t < 1.0:
            axis.extend((float(t), float(f)) for f in fs)
        else:
            axis.append((float(t), float(t)))
    return [plan_from_fractions(p, t1, t2, f1, f2) for t1, f1 in axis for t2, f2 in axis]


def _fractions(p, plan):
    fs = plan.t1 * plan.ps_a / p.Ps
    fr = plan.t2 * plan.pr_a / p.Pr
    return np.array([plan.t1, plan.t2, fs, fr])


def _order(values, plans):
    # best first; ties within 1e-12 go to the smaller (t1, t2)
    keys = [(-round(v / 1e-12) if math.isfinite(v) else math.inf, pl.t1, pl.t2, pl.ps_a, pl.pr_a)
            for v, pl in zip(values, plans)]
    return sorted(range(len(plans)), key=lambda k: keys[k])


def _search(variant, p, cfg, extra=()):
    scheme = _PARTNER[variant]
    fast = _Fast(scheme, p.M, cfg)
    plans = _coarse_plans(p, cfg) + list(extra)
    vals = fast(plans)
    order = _order(vals, plans)
    starts = []
    for k in order:
        if not math.isfinite(vals[k]):
            break
        if all(plans[k] != plans[j] for j in starts):
            starts.append(k)
        if len(starts) == cfg.restarts:
            break
    cands = [(float(vals[k]), plans[k]) for k in order[: cfg.final_candidates]]
    for k in starts:
        def neg(x):
            v = fast([plan_from_fractions(p, *x)])[0]
            return -v if math.isfinite(v) else 1e300

        res = minimize(neg, _fractions(p, plans[k]), method="Nelder-Mead",
                       options=dict(xatol=1e-9, fatol=1e-13, maxiter=int(cfg.local_maxiter)))
        pl = plan_from_fractions(p, *res.x)
        if -res.fun > vals[k]:
            cands.append((float(-res.fun), pl))
    vals2 = [v for v, _ in cands]
    pls = [pl for _, pl in cands]
    return [pls[k] for k in _order(vals2, pls)], [vals2[k] for k in _order(vals2, pls)]


def optimize_timeshare(variant, p: ChannelParams, cfg: TimeShareConfig | None = None,
                       seed_plans=None) -> RateReport:
    """Best time-sharing plan between scheme A and DF.

    A coarse grid over ``(t1, t2)`` and the energy fractions per phase is
    scored with fast phase-A rates, the best plans are refined locally and,
    for CADF, the finalists are re-scored with the full CADF optimizer. The
    pure endpoints are always candidates; the CADF search additionally
    re-scores the optimal AF-DF and RF-DF plans, so CADF-DF never trails
    them. Callers that already hold those plans can pass them as
    ``seed_plans`` to skip recomputing them.

    Raises
    ------
    ConfigError
        For an unknown variant.
    """
    variant = Scheme.parse(variant) if isinstance(variant, str) else variant
    if variant not in TS_VARIANTS:
        raise ConfigError(f"not a time-sharing variant: {variant.value}")
    cfg = cfg or TimeShareConfig()
    scheme = _PARTNER[variant]
    endpoints = [plan_from_fractions(p, 1, 1, 1, 1), plan_from_fractions(p, 0, 0, 0, 0)]

    if scheme is Scheme.CADF:
        if seed_plans is None:
            seeds = [optimize_timeshare(other, p, cfg).plan for other in (Scheme.AF_DF, Scheme.RF_DF)]
        else:
            seeds = list(seed_plans)
        plans, _ = _search(variant, p, cfg, extra=seeds)
        finals = plans[: cfg.final_candidates] + endpoints + seeds
    else:
        plans, _ = _search(variant, p, cfg, extra=endpoints)
        finals = plans[: cfg.final_candidates] + endpoints
    unique = []
    for pl in finals:
        if pl not in unique:
            unique.append(pl)
    vals = [evaluate_plan(variant, p, pl, cfg.cadf) for pl in unique]
    best = _order(vals, unique)[0]
    return RateReport(variant, float(vals[best]), Units.PER_TOTAL_DIM, plan=unique[best])

