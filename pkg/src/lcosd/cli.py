"""
Command-line front end: Monte Carlo simulation, random-coding prediction,
parameter tuning, and cardinality-distribution studies, all emitting CSV.

Exit codes: 0 on success, 2 for configuration errors (bad flags, unreadable
or invalid inputs), 3 for runtime failures.  Options may come from an
optional plain-text ``key = value`` config file; command-line flags win.
The worker count defaults to the LCOSD_WORKERS environment variable.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import analysis, sim
from .decoder import DecoderConfig
from .channel import sigma_from_ebn0
from .errors import ParseError, RankDeficient, UnreachableTarget
from .gf2 import LinearCode, load_alist, random_code

CSV_VERSION = "1"


class ConfigError(Exception):
    pass


def _parse_grid(text: str) -> list[float]:
    """Either comma-separated values or start:stop:step (stop inclusive)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {text!r} is not start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError("grid step must be positive")
        out = []
        v = start
        while v <= stop + 1e-9:
            out.append(round(v, 9))
            v += step
        return out
    return [float(p) for p in text.split(",") if p]


def _parse_int_list(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p]


def _load_code(args) -> LinearCode:
    if args.alist:
        try:
            with open(args.alist, "r", encoding="utf-8") as fh:
                return load_alist(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read alist file: {exc}") from None
        except (ParseError, RankDeficient) as exc:
            raise ConfigError(f"invalid alist file: {exc}") from None
    if args.random_code:
        try:
            n, k, seed = (int(p) for p in args.random_code.split(","))
        except ValueError:
            raise ConfigError("--random-code wants n,k,seed") from None
        return random_code(n, k, seed)
    raise ConfigError("provide a code via --alist or --random-code")


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Splice `key = value` file entries in front of the real flags."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ConfigError("--config needs a file path")
    path = argv[idx + 1]
    rest = argv[:idx] + argv[idx + 2 :]
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    injected = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {line!r} is not key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        injected.extend([f"--{key.replace('_', '-')}", value])
    # flags after the injected ones override them
    return [rest[0]] + injected + rest[1:]


def _writer(args):
    if args.output and args.output != "-":
        fh = open(args.output, "w", newline="", encoding="utf-8")
    else:
        fh = sys.stdout
    return fh, csv.writer(fh)


def _fmt(x: float) -> str:
    return f"{x:.10g}"


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    code = _load_code(args)
    if not 0 <= args.delta <= code.n - code.k:
        raise ConfigError(f"delta must be in 0..{code.n - code.k}")
    config = DecoderConfig(
        delta=args.delta, l_max=args.lmax, lga=args.lga, stopping=args.stopping
    )
    if args.stopping == "sai":
        # record the per-point static thresholds the run will use
        from .decoder import tau_sai

        for db in args.ebn0:
            tau = tau_sai(code.n, code.k, args.delta, sigma_from_ebn0(db, code.rate))
            print(f"# tau_sai({db} dB) = {tau:.6g}", file=sys.stderr)
    fh, out = _writer(args)  # fail fast on an unwritable destination
    records = sim.run_fer_grid(
        code,
        args.ebn0,
        config,
        max_frames=args.max_frames,
        max_errors=args.max_errors,
        master_seed=args.seed,
        workers=args.workers,
        track_mld_lb=args.mld_lb,
    )
    header = ["ebn0_db", "frames", "errors", "fer", "l_avg", "ml_certified", "seconds"]
    if args.mld_lb:
        header.append("mld_lb_fer")
    out.writerow(header)
    for rec in records:
        row = [
            _fmt(rec.ebn0_db),
            rec.frames,
            rec.frame_errors,
            _fmt(rec.fer),
            _fmt(rec.l_avg),
            _fmt(rec.ml_certified_fraction),
            _fmt(rec.wall_seconds),
        ]
        if args.mld_lb:
            row.append(_fmt(rec.mld_lb_fer))
        out.writerow(row)
    if fh is not sys.stdout:
        fh.close()
    return 0


def _validate_shape(n: int, k: int, delta: int):
    if not 0 < k < n:
        raise ConfigError(f"need 0 < k < n, got (n, k) = ({n}, {k})")
    if not 0 <= delta <= n - k:
        raise ConfigError(f"delta must be in 0..{n - k}")


def cmd_predict(args) -> int:
    _validate_shape(args.n, args.k, args.delta)
    fh, out = _writer(args)
    out.writerow(["ebn0_db", "l_max", "eps_mrb", "cond_rank", "upper_bound"])
    for i, db in enumerate(args.ebn0):
        sigma = sigma_from_ebn0(db, args.k / args.n)
        cards = analysis.sample_cardinalities(
            args.n, args.k, args.delta, sigma, args.samples, args.seed + i,
            method=args.method, counting_cap=args.counting_cap,
        )
        curve = analysis.list_fer(
            args.n, args.k, args.delta, sigma, args.lmax, args.samples, args.seed + i,
            cards=cards,
        )
        for l_max in sorted(curve.entries):
            point = curve.entries[l_max]
            out.writerow(
                [
                    _fmt(db),
                    l_max,
                    _fmt(point.eps),
                    _fmt(analysis.conditional_rank(curve, l_max)),
                    _fmt(analysis.fer_upper_bound(curve, l_max, args.mld_fer)),
                ]
            )
    if fh is not sys.stdout:
        fh.close()
    return 0


def cmd_tune(args) -> int:
    _validate_shape(args.n, args.k, max(args.delta_min, 0))
    _validate_shape(args.n, args.k, args.delta_max)
    if args.delta_min > args.delta_max:
        raise ConfigError("delta range is empty")
    deltas = list(range(args.delta_min, args.delta_max + 1))
    model = analysis.TimeModel(rho1=args.rho1, rho2=args.rho2, rho3=args.rho3)
    sigma = sigma_from_ebn0(args.ebn0_point, args.k / args.n)
    rows = []
    for i, delta in enumerate(deltas):
        cards = analysis.sample_cardinalities(
            args.n, args.k, delta, sigma, args.samples, args.seed + i
        )
        try:
            l_star = analysis.min_list_size(
                args.n, args.k, delta, sigma, args.target_fer, args.samples,
                args.seed + i, cards=cards,
            )
        except UnreachableTarget:
            rows.append((delta, None, None, None))
            continue
        curve = analysis.list_fer(
            args.n, args.k, delta, sigma, [l_star], args.samples, args.seed + i,
            cards=cards,
        )
        l_avg_pred = analysis.conditional_rank(curve, l_star) + 1.0
        t_avg = analysis.decode_time(args.n, args.k, delta, l_avg_pred, model)
        t_max = analysis.decode_time(args.n, args.k, delta, l_star, model)
        rows.append((delta, l_star, t_avg, t_max))
    reachable = [r for r in rows if r[1] is not None]
    best_delta = min(reachable, key=lambda r: r[3])[0] if reachable else None
    fh, out = _writer(args)
    out.writerow(["delta", "l_star", "t_avg_seconds", "t_max_seconds", "is_argmin"])
    for delta, l_star, t_avg, t_max in rows:
        if l_star is None:
            out.writerow([delta, "unreachable", "", "", 0])
        else:
            out.writerow(
                [delta, l_star, _fmt(t_avg), _fmt(t_max), int(delta == best_delta)]
            )
    if fh is not sys.stdout:
        fh.close()
    return 0


def cmd_count_dist(args) -> int:
    _validate_shape(args.n, args.k, args.delta)
    thresholds = [float(t) for t in args.thresholds.split(",")]
    fh, out = _writer(args)
    out.writerow(["ebn0_db", "threshold", "ccdf_counting", "ccdf_saddlepoint"])
    for i, db in enumerate(args.ebn0):
        sigma = sigma_from_ebn0(db, args.k / args.n)
        counted = analysis.sample_cardinalities(
            args.n, args.k, args.delta, sigma, args.samples, args.seed + i,
            method="counting", counting_cap=args.counting_cap,
        )
        approx = analysis.sample_cardinalities(
            args.n, args.k, args.delta, sigma, args.samples, args.seed + i,
            method="saddlepoint",
        )
        ccdf_cnt = analysis.cardinality_ccdf(counted, thresholds)
        ccdf_sp = analysis.cardinality_ccdf(approx, thresholds)
        for t, c, s in zip(thresholds, ccdf_cnt, ccdf_sp):
            out.writerow([_fmt(db), _fmt(t), _fmt(c), _fmt(s)])
    if fh is not sys.stdout:
        fh.close()
    return 0


# ---------------------------------------------------------------------------
# Argument wiring.
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--output", default="-", help="CSV output path ('-' = stdout)")
    p.add_argument("--config", help="key = value config file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcosd",
        description="Soft-decision decoding with local constraints: simulate, predict, tune.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo FER / search-count runs")
    p.add_argument("--alist", help="parity check matrix in alist format")
    p.add_argument("--random-code", help="n,k,seed for a random binary linear code")
    p.add_argument("--ebn0", type=_parse_grid, required=True, help="dB grid: list or start:stop:step")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--lmax", type=int, required=True)
    p.add_argument("--stopping", choices=["trivial", "dai", "sai"], default="dai")
    p.add_argument("--lga", choices=["slva", "tfpt"], default="slva")
    p.add_argument("--max-frames", type=int, default=10000)
    p.add_argument("--max-errors", type=int, default=100)
    p.add_argument("--workers", type=int, default=sim.default_workers())
    p.add_argument("--mld-lb", action="store_true", help="also count maximum-likelihood errors")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("predict", help="random-coding list-FER prediction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--lmax", type=_parse_int_list, required=True, help="comma list of list sizes")
    p.add_argument("--ebn0", type=_parse_grid, required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--method", choices=["saddlepoint", "counting"], default="saddlepoint")
    p.add_argument("--counting-cap", type=int, default=10**6)
    p.add_argument("--mld-fer", type=float, default=0.0, help="optimal-decoder FER for the bound column")
    _add_common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("tune", help="minimum list size and time model per constraint degree")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ebn0-point", type=float, required=True)
    p.add_argument("--target-fer", type=float, required=True)
    p.add_argument("--delta-min", type=int, required=True)
    p.add_argument("--delta-max", type=int, required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--rho1", type=float, default=analysis.TimeModel.reference().rho1)
    p.add_argument("--rho2", type=float, default=analysis.TimeModel.reference().rho2)
    p.add_argument("--rho3", type=float, default=analysis.TimeModel.reference().rho3)
    _add_common(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("count-dist", help="CCDF of the lighter-pattern count, both methods")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--ebn0", type=_parse_grid, required=True)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--thresholds", default="10,100,1000,10000")
    p.add_argument("--counting-cap", type=int, default=10000)
    _add_common(p)
    p.set_defaults(func=cmd_count_dist)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
