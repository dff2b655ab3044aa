"""Sweeps, figure tables and randomized verification suites.

Everything here is deterministic: rows are computed independently (and
optionally in worker processes), then sorted before writing.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import rate_af, rate_cutset, rate_df, rate_rf, solve_cf_fixed_point
from .cadf import (
    BandPowerSplit,
    CadfAllocation,
    OptimizerConfig,
    cadf_rate_eq11,
    cadf_rate_eq25,
    mac_region,
    optimize_cadf,
    successive_corner_check,
    verify_prop2_structure,
    verify_theorem3,
)
from .core import ChannelParams, ConfigError, RateReport, Scheme, capacity, db_to_linear
from .half_duplex import hd_rate
from .oracle import brute_force_cadf
from .timeshare import TimeShareConfig, optimize_timeshare

__all__ = [
    "FIGURES",
    "SUITES",
    "SweepRow",
    "SweepSpec",
    "draw_params",
    "evaluate",
    "figure_rows",
    "rows_to_csv",
    "run_suite",
    "run_sweep",
    "worker_count",
]

M_SWEEP = (1, 2, 4, 8, 16, 32, 64)
MODES = ("mismatch", "half_duplex", "timeshare")
MISMATCH_SCHEMES = (Scheme.CADF, Scheme.AF, Scheme.DF, Scheme.CF, Scheme.RF, Scheme.CUTSET)


# ---------------------------------------------------------------------------
# single evaluations


def evaluate(scheme, p: ChannelParams, mode: str = "mismatch", cfg: OptimizerConfig | None = None) -> RateReport:
    """Rate report for one scheme in one operating mode.

    Raises
    ------
    PreconditionError
        For RF with ``Ps <= 1``.
    ConfigError
        For an unknown mode or a scheme the mode does not support.
    """
    scheme = Scheme.parse(scheme) if isinstance(scheme, str) else scheme
    if mode == "half_duplex":
        return hd_rate(scheme, p, cfg)
    if mode == "timeshare":
        if scheme in (Scheme.CADF_DF, Scheme.RF_DF, Scheme.AF_DF):
            return optimize_timeshare(scheme, p, TimeShareConfig(cadf=cfg or OptimizerConfig()))
        return evaluate(scheme, p, "mismatch", cfg)
    if mode != "mismatch":
        raise ConfigError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    c_bc = p.rho * capacity(p.Ps)
    c_mac = capacity(p.M**2 * p.Pr)
    if scheme is Scheme.CADF:
        return optimize_cadf(p, cfg)
    if scheme is Scheme.DF:
        return RateReport(scheme, rate_df(p), bc_cut=c_bc, mac_cut=c_mac)
    if scheme is Scheme.CUTSET:
        return RateReport(scheme, rate_cutset(p), bc_cut=p.rho * capacity(p.M * p.Ps), mac_cut=c_mac)
    if scheme is Scheme.AF:
        return RateReport(scheme, rate_af(p))
    if scheme is Scheme.RF:
        return RateReport(scheme, rate_rf(p))
    if scheme is Scheme.CF:
        sol = solve_cf_fixed_point(p)
        return RateReport(scheme, p.rho * capacity(sol.p_cf), saturated=sol.saturated)
    raise ConfigError(f"scheme {scheme.value} needs mode 'timeshare'")


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepSpec:
    """A grid of channel instances and schemes.

    ``ps`` and ``total_relay_power`` are linear unless ``db`` is set; the
    per-relay power of each row is ``total_relay_power / M``.
    """

    schemes: tuple
    M_values: tuple
    ps: float
    total_relay_power: float
    rho: float = 1.0
    mode: str = "mismatch"
    seed: int = 0
    db: bool = False

    def __post_init__(self):
        if not self.schemes:
            raise ConfigError("a sweep needs at least one scheme")
        if not self.M_values:
            raise ConfigError("a sweep needs at least one M value")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "schemes", tuple(
            Scheme.parse(s) if isinstance(s, str) else s for s in self.schemes))
        object.__setattr__(self, "M_values", tuple(int(m) for m in self.M_values))
        if self.db:
            object.__setattr__(self, "ps", db_to_linear(self.ps))
            object.__setattr__(self, "total_relay_power", db_to_linear(self.total_relay_power))
            object.__setattr__(self, "db", False)
        if not (self.ps > 0 and self.total_relay_power > 0):
            raise ConfigError("powers must be > 0")

    def instances(self):
        for M in self.M_values:
            yield ChannelParams.from_total_relay_power(M, self.ps, self.total_relay_power, self.rho)


COLUMNS = (
    "M", "ps", "pr", "rho", "scheme", "rate", "units", "bc_cut", "mac_cut",
    "alpha1", "alpha2", "beta1", "beta2",
    "ps_af1_frac", "pr_af1_frac", "ps_af2_frac", "pr_af2_frac",
    "hop_split", "t1", "t2", "runtime_ms",
)


@dataclass(frozen=True)
class SweepRow:
    """One CSV row: the instance, the scheme's rate and a configuration summary."""

    M: int
    ps: float
    pr: float
    rho: float
    scheme: str
    rate: float
    units: str
    bc_cut: float | None = None
    mac_cut: float | None = None
    alpha1: float | None = None
    alpha2: float | None = None
    beta1: float | None = None
    beta2: float | None = None
    ps_af1_frac: float | None = None
    pr_af1_frac: float | None = None
    ps_af2_frac: float | None = None
    pr_af2_frac: float | None = None
    hop_split: float | None = None
    t1: float | None = None
    t2: float | None = None
    runtime_ms: float | None = None

    @classmethod
    def from_report(cls, p: ChannelParams, rep: RateReport, runtime_ms=None) -> "SweepRow":
        extra = {}
        a = rep.allocation
        if isinstance(a, CadfAllocation):
            s1, s2 = a.splits
            extra.update(
                alpha1=a.alpha[0], alpha2=a.alpha[1], beta1=a.beta1, beta2=a.beta2,
                ps_af1_frac=s1.ps_af / p.Ps, pr_af1_frac=s1.pr_af / p.Pr,
                ps_af2_frac=s2.ps_af / p.Ps, pr_af2_frac=s2.pr_af / p.Pr,
            )
        if rep.plan is not None:
            extra.update(t1=rep.plan.t1, t2=rep.plan.t2)
        return cls(p.M, p.Ps, p.Pr, p.rho, rep.scheme.value, rep.rate, rep.units.value,
                   rep.bc_cut, rep.mac_cut, hop_split=rep.hop_split, runtime_ms=runtime_ms, **extra)

    def cells(self) -> list:
        return [_fmt(getattr(self, c)) for c in COLUMNS]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return "%.12g" % float(v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def worker_count() -> int:
    """Worker processes from ``RELAY_RATES_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("RELAY_RATES_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"RELAY_RATES_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("RELAY_RATES_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def _row_task(task):
    kind, args, timings = task
    t0 = time.perf_counter()
    if kind == "single":
        scheme, p, mode = args
        reps = [(p, evaluate(scheme, p, mode))]
    else:
        reps = _fig9_point(args)
    ms = (time.perf_counter() - t0) * 1e3 if timings else None
    return [SweepRow.from_report(q, rep, ms) for q, rep in reps]


def _run_tasks(tasks, workers):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_row_task, tasks))
    else:
        chunks = [_row_task(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


_SCHEME_ORDER = {s: k for k, s in enumerate(Scheme)}


def _sort(rows, key="M"):
    return sorted(rows, key=lambda r: (getattr(r, key), r.pr, _SCHEME_ORDER[Scheme(r.scheme)]))


def run_sweep(spec: SweepSpec, timings: bool = False, workers: int | None = None) -> list:
    workers = worker_count() if workers is None else workers
    tasks = [("single", (s, p, spec.mode), timings) for p in spec.instances() for s in spec.schemes]
    return _sort(_run_tasks(tasks, workers))


# ---------------------------------------------------------------------------
# figures

FIG9_M = 2
FIG9_PS_DB = 20.0
FIG9_DB = tuple(range(-10, 41, 2))


def _fig9_point(m2pr_db):
    p = ChannelParams(FIG9_M, db_to_linear(FIG9_PS_DB), db_to_linear(m2pr_db) / FIG9_M**2, 1.0)
    cfg = TimeShareConfig()
    af = optimize_timeshare(Scheme.AF_DF, p, cfg)
    rf = optimize_timeshare(Scheme.RF_DF, p, cfg)
    cadf = optimize_timeshare(Scheme.CADF_DF, p, cfg, seed_plans=[af.plan, rf.plan])
    pure = [evaluate(s, p) for s in (Scheme.CADF, Scheme.AF, Scheme.DF, Scheme.RF)]
    return [(p, r) for r in [cadf, rf, af] + pure]


FIGURES = {
    "fig5": dict(mode="mismatch", rho=0.5, ps=300.0, total=10.0),
    "fig6": dict(mode="mismatch", rho=2.0, ps=10.0, total=300.0),
    "fig7": dict(mode="half_duplex", rho=1.0, ps=300.0, total=10.0),
    "fig8": dict(mode="half_duplex", rho=1.0, ps=10.0, total=300.0),
    "fig9": dict(mode="timeshare"),
}


def figure_rows(name: str, timings: bool = False, workers: int | None = None) -> list:
    """Rows of one figure table, sorted by (M or relay power, scheme)."""
    if name not in FIGURES:
        raise ConfigError(f"unknown figure {name!r}; expected one of {', '.join(FIGURES)}")
    workers = worker_count() if workers is None else workers
    spec = FIGURES[name]
    if name == "fig9":
        tasks = [("fig9", db, timings) for db in FIG9_DB]
        return _sort(_run_tasks(tasks, workers), key="pr")
    sweep = SweepSpec(MISMATCH_SCHEMES, M_SWEEP, spec["ps"], spec["total"], spec["rho"], spec["mode"])
    return run_sweep(sweep, timings, workers)


# ---------------------------------------------------------------------------
# randomized verification suites


def draw_params(rng, ps_above_one: bool = False) -> ChannelParams:
    """Log-uniform powers in [0.1, 1e4] (``Ps`` in (1, 1e4] on request),
    log-uniform ``rho`` in [0.1, 10] and ``M`` uniform on 1..64."""
    lo = 0.0 if ps_above_one else -1.0
    ps = 10.0 ** rng.uniform(lo, 4.0)
    if ps_above_one and ps <= 1.0:
        ps = math.nextafter(1.0, 2.0)
    pr = 10.0 ** rng.uniform(-1.0, 4.0)
    rho = 10.0 ** rng.uniform(-1.0, 1.0)
    M = int(rng.integers(1, 65))
    return ChannelParams(M, ps, pr, rho)


def draw_split(rng, p: ChannelParams) -> BandPowerSplit:
    return BandPowerSplit.from_af(p, rng.uniform(0.0, p.Ps), rng.uniform(0.0, p.Pr))


def draw_allocation(rng, p: ChannelParams) -> CadfAllocation:
    g = min(p.rho, 1.0)
    x, y = sorted(rng.uniform(0.0, 1.0, 2))
    a1, a2 = g * x, g * (y - x)
    s = a1 + a2
    return CadfAllocation((a1, a2), p.rho - s, 1.0 - s, (draw_split(rng, p), draw_split(rng, p)))


@dataclass
class _Tally:
    failures: int = 0
    worst: float = math.inf
    extra: dict = field(default_factory=dict)

    def add(self, margin, ok):
        self.worst = min(self.worst, margin)
        if not ok:
            self.failures += 1


def _suite_prop1(rng, n, t):
    for _ in range(n):
        p = draw_params(rng)
        a = draw_allocation(rng, p)
        r25 = cadf_rate_eq25(p, a).rate
        r11 = cadf_rate_eq11(p, a).rate
        errs = [abs(r25 - r11) / max(abs(r25), 1e-300)]
        for frac, s in zip(a.alpha, a.splits):
            _, w = successive_corner_check(p, s)
            errs.append(w["rel_err"])
            c = mac_region(p, frac, s)
            errs.append(max(c.r_df - c.df_bound, 0.0) / max(c.sum, 1e-300))
        e = max(errs)
        t.add(-e, e <= 1e-12)


def _suite_theorem3(rng, n, t):
    for _ in range(n):
        w = verify_theorem3(draw_params(rng, ps_above_one=True))
        t.add(min(w.margins.values()), w.holds)


def _suite_prop2(rng, n, t):
    for _ in range(n):
        p = draw_params(rng)
        ok, w = verify_prop2_structure(p, (draw_split(rng, p), draw_split(rng, p)))
        t.add(w["grid_value"] - w["vertex_value"], ok)


def _suite_oracle(rng, n, t):
    top = -math.inf
    for _ in range(n):
        p = draw_params(rng)
        gap = optimize_cadf(p).rate - brute_force_cadf(p, 13).rate
        top = max(top, gap)
        t.add(gap, -1e-9 <= gap <= 1e-2)
    t.extra["max_gap"] = top


def _suite_baselines(rng, n, t):
    res = 0.0
    for _ in range(n):
        p = draw_params(rng)
        cut = rate_cutset(p)
        rates = [rate_df(p), rate_af(p)]
        sol = solve_cf_fixed_point(p)
        res = max(res, sol.residual)
        rates.append(p.rho * capacity(sol.p_cf))
        if p.Ps > 1.0:
            rates.append(rate_rf(p))
        m = min(cut - r for r in rates)
        t.add(m, m >= -1e-9 and sol.residual <= 1e-10)
    t.extra["max_cf_residual"] = res


SUITES = {
    "prop1": _suite_prop1,
    "theorem3": _suite_theorem3,
    "prop2": _suite_prop2,
    "oracle": _suite_oracle,
    "baselines": _suite_baselines,
}


def run_suite(name: str, samples: int, seed: int) -> dict:
    """Run one property suite over seeded random draws.

    The margin is the slack of the checked inequality (a negative relative
    error for the identity suite); ``worst_margin`` is its minimum.
    """
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    if int(samples) != samples or samples < 1:
        raise ConfigError("samples must be a positive integer")
    rng = np.random.default_rng(seed)
    t = _Tally()
    SUITES[name](rng, int(samples), t)
    out = {"suite": name, "samples": int(samples), "seed": int(seed), "failures": t.failures,
           "worst_margin": t.worst}
    out.update(t.extra)
    return out
