"""Command-line front end: ``rate``, ``sweep``, ``figure`` and ``verify``.

Exit codes: 0 success, 1 verification failures, 2 usage or configuration
errors, 3 a scheme's precondition does not hold.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import ChannelParams, PreconditionError, RelayRatesError, db_to_linear

EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_PRECONDITION = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_config(path) -> dict:
    """Parse a ``key=value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise RelayRatesError(f"cannot read config file {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise RelayRatesError(f"{path}:{lineno}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _power_flags(p):
    p.add_argument("--ps", type=float, help="source power per dimension")
    p.add_argument("--pr", type=float, help="power of each relay per dimension")
    p.add_argument("--total-relay-power", type=float, help="M * Pr; Pr is derived per M")
    p.add_argument("--rho", type=float, default=1.0, help="bandwidth expansion factor")
    p.add_argument("--db", action="store_true", help="read power flags in dB")
    p.add_argument("--mode", default="mismatch", choices=("mismatch", "half_duplex", "timeshare"))


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="relay-rates", description="Achievable rates for the Gaussian parallel relay channel.")
    ap.add_argument("--config", help="key=value file mirroring the flags; flags win")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    r = sub.add_parser("rate", help="rate of one scheme at one channel instance (JSON)")
    r.add_argument("--scheme")
    r.add_argument("--relays", type=int)
    _power_flags(r)

    s = sub.add_parser("sweep", help="rates over a list of M values (CSV)")
    s.add_argument("--schemes", help="comma-separated scheme names")
    s.add_argument("--relays", help="comma-separated M values")
    _power_flags(s)
    s.add_argument("--out", help="CSV path (default: stdout)")
    s.add_argument("--timings", action="store_true", help="fill the runtime_ms column")

    f = sub.add_parser("figure", help="write figure tables as CSV")
    f.add_argument("name", help="fig5..fig9 or all")
    f.add_argument("--out-dir", default=".")
    f.add_argument("--timings", action="store_true", help="fill the runtime_ms column")

    v = sub.add_parser("verify", help="randomized property suite (JSON summary)")
    v.add_argument("--suite")
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    ap.commands = {"rate": r, "sweep": s, "figure": f, "verify": v}
    return ap


def _parse(argv):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        values = read_config(args.config)
        sp = ap.commands.get(args.command)
        if sp is not None:
            known = {a.dest: a for a in sp._actions}
            defaults = {}
            for key, raw in values.items():
                if key not in known:
                    raise RelayRatesError(f"unknown config key {key!r}")
                act = known[key]
                if act.const is True:  # store_true flag
                    defaults[key] = raw.lower() in ("1", "true", "yes", "on")
                else:
                    defaults[key] = act.type(raw) if act.type else raw
            sp.set_defaults(**defaults)
        args = ap.parse_args(argv)
    if args.command is None:
        ap.error("a command is required")
    return ap, args


def _require(ap, args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        ap.error("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _powers(ap, args, M):
    ps = db_to_linear(args.ps) if args.db else args.ps
    if (args.pr is None) == (args.total_relay_power is None):
        ap.error("give exactly one of --pr and --total-relay-power")
    if args.pr is not None:
        pr = db_to_linear(args.pr) if args.db else args.pr
    else:
        tot = db_to_linear(args.total_relay_power) if args.db else args.total_relay_power
        pr = tot / M
    return ps, pr


def _cmd_rate(ap, args):
    from .experiments import evaluate

    _require(ap, args, "scheme", "relays", "ps")
    ps, pr = _powers(ap, args, args.relays)
    p = ChannelParams(args.relays, ps, pr, args.rho)
    rep = evaluate(args.scheme, p, args.mode)
    doc = {"M": p.M, "Ps": p.Ps, "Pr": p.Pr, "rho": p.rho, "mode": args.mode}
    doc.update(rep.to_dict())
    print(json.dumps(doc, sort_keys=True))
    return 0


def _cmd_sweep(ap, args):
    from .experiments import SweepSpec, rows_to_csv, run_sweep

    _require(ap, args, "schemes", "relays", "ps", "total_relay_power")
    spec = SweepSpec(
        tuple(x for x in args.schemes.split(",") if x),
        tuple(int(x) for x in args.relays.split(",") if x),
        args.ps, args.total_relay_power, args.rho, args.mode, db=args.db,
    )
    text = rows_to_csv(run_sweep(spec, timings=args.timings))
    _emit(text, args.out)
    return 0


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise RelayRatesError(f"cannot write {path}: {exc.strerror}") from None


def _cmd_figure(ap, args):
    from .experiments import FIGURES, figure_rows, rows_to_csv

    names = list(FIGURES) if args.name == "all" else [args.name]
    if any(n not in FIGURES for n in names):
        ap.error(f"unknown figure {args.name!r}; expected one of {', '.join(FIGURES)} or all")
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise RelayRatesError(f"cannot create {out}: {exc.strerror}") from None
    for n in names:
        path = out / f"{n}.csv"
        _emit(rows_to_csv(figure_rows(n, timings=args.timings)), path)
        print(path)
    return 0


def _cmd_verify(ap, args):
    from .experiments import SUITES, run_suite

    _require(ap, args, "suite")
    if args.suite not in SUITES:
        ap.error(f"unknown suite {args.suite!r}; expected one of {', '.join(SUITES)}")
    if args.samples < 1:
        ap.error("--samples must be >= 1")
    summary = run_suite(args.suite, args.samples, args.seed)
    print(json.dumps(summary, sort_keys=True))
    passed = summary["samples"] - summary["failures"]
    print(f"{args.suite}: {passed}/{summary['samples']} passed, worst margin {summary['worst_margin']:.6g}",
          file=sys.stderr)
    return 0 if summary["failures"] == 0 else EXIT_VERIFY_FAILED


def _set_threads():
    from .experiments import worker_count

    try:
        import numba
    except ImportError:  # pragma: no cover
        return
    n = min(worker_count(), numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(max(n, 1))


def main(argv=None) -> int:
    try:
        ap, args = _parse(argv)
        _set_threads()
        cmd = {"rate": _cmd_rate, "sweep": _cmd_sweep, "figure": _cmd_figure, "verify": _cmd_verify}
        return cmd[args.command](ap, args)
    except PreconditionError as exc:
        print(f"relay-rates: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except RelayRatesError as exc:
        print(f"relay-rates: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
