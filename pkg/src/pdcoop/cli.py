"""Command-line entry point (``pdcoop`` / ``python -m pdcoop``)."""

from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import sys

import numpy as np

from . import calibration, experiments, meta
from . import replicator as pot
from .config import PRESETS, RunConfig, load_config
from .experiments import fmt
from .game import GameParams
from .strategies import classify_tables

log = logging.getLogger("pdcoop")

ANALYTICS_COLUMNS = ("delta", "r", "s", "a", "b", "p_star", "ke_c", "ke_d",
                     "klr", "size_bad", "size_good", "d_ic")


def _write_rows(out, header, rows) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def _open_out(path):
    if path in (None, "-"):
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w", newline="", encoding="utf-8")


def cmd_analytics(args) -> int:
    games = [tuple(map(float, g.split(","))) for g in args.game or ()]
    if args.delta is not None or args.r is not None or args.s is not None:
        if None in (args.delta, args.r, args.s):
            raise ValueError("--delta, --r and --s must be given together")
        games.insert(0, (args.delta, args.r, args.s))
    if not games:
        raise ValueError("no game given; use --delta/--r/--s or --game d,r,s")
    rows = []
    for d, r, s in games:
        st = pot.stats(GameParams(r, s, d))
        rows.append((d, r, s, st.a, st.b, st.p_star, st.ke_c, st.ke_d,
                     st.klr, st.size_bad, st.size_good, st.d_ic))
    with _open_out(args.out) as fh:
        _write_rows(fh, ANALYTICS_COLUMNS, rows)
    return 0


def cmd_sample_s(args) -> int:
    rng = np.random.default_rng(args.seed)
    svals = experiments.stratified_s_sample(args.delta, args.r, rng)
    rows = [(k, pot.klr_from_ratio(args.delta, args.r, s), s)
            for k, s in zip(experiments.KLR_STRATA, svals)]
    with _open_out(args.out) as fh:
        _write_rows(fh, ("stratum", "klr", "s"), rows)
    return 0


def _run_config(args) -> RunConfig:
    cfg = PRESETS[args.preset]
    if args.config:
        cfg = load_config(args.config, cfg)
    return cfg.with_overrides(seed=args.seed, workers=args.workers, periods=args.periods,
                              replications=args.replications, init=args.init, out=args.out)


def cmd_simulate(args) -> int:
    cfg = _run_config(args)
    cells = experiments.build_grid(cfg.grid)
    log.info("running %d cells x %d replications x %d periods on %d workers",
             len(cells), cfg.grid.replications, cfg.periods, cfg.workers)
    results = experiments.run_grid(cells, cfg.periods, cfg.workers)
    with _open_out(cfg.results_path) as fh:
        fh.write(experiments.results_to_csv(results))
    return 0


def _table(text: str) -> np.ndarray:
    vals = [float(x) for x in text.split(",")]
    if len(vals) != 8:
        raise ValueError("a Q-table needs 8 comma-separated values (CC_C,CC_D,CD_C,...)")
    return np.array(vals).reshape(4, 2)


def cmd_classify(args) -> int:
    c = classify_tables(_table(args.row), _table(args.col))
    d = c.dynamics
    print(f"label,{c.label.value}")
    print(f"cooperative,{int(c.cooperative)}")
    print(f"row_policy,{c.row}")
    print(f"col_policy,{c.col}")
    print(f"row_ties,{''.join('1' if t else '0' for t in c.row.ties)}")
    print(f"col_ties,{''.join('1' if t else '0' for t in c.col.ties)}")
    print("start,cycle,row_sucker,col_sucker")
    for start, cyc, (fr, fc) in zip(("CC", "CD", "DC", "DD"), d.cycles, d.sucker):
        print(f"{start},{'>'.join(st.name for st in cyc)},{fmt(fr)},{fmt(fc)}")
    return 0


def cmd_aggregate(args) -> int:
    rows = experiments.read_results(args.results)
    spec = experiments.AggregationSpec(args.radius, args.grid_points, args.statistic)
    recs = experiments.aggregate_neighborhood(rows, spec)
    with _open_out(args.out) as fh:
        fh.write(experiments.aggregation_to_csv(recs))
    return 0


def cmd_bins(args) -> int:
    rows = experiments.read_results(args.results)
    recs = experiments.bin_by_unit_klr(rows, x=args.x)
    cols = ("alpha", "d_ic", "bin_lo", "midpoint", "mean", "count")
    with _open_out(args.out) as fh:
        _write_rows(fh, cols, [[rec[c] for c in cols] for rec in recs])
    return 0


def cmd_calibrate(args) -> int:
    rows = experiments.read_results(args.results)
    res = calibration.calibrate(rows, args.d_ic_min)
    if not res:
        raise ValueError("no eligible series in results")
    with _open_out(args.out) as fh:
        _write_rows(fh, ("alpha", "K", "c", "mse", "cells_used"),
                    [(r.alpha, r.K, r.c, r.mse, r.cells_used) for r in res])
    return 0


def cmd_frontier(args) -> int:
    K = args.K if args.K is not None else experiments.correction_factor(args.alpha)
    deltas = np.linspace(args.delta_min, args.delta_max, args.n)
    recs = experiments.frontier_curves(args.r, deltas, K, args.epsilon)
    cols = ("delta", "r", "s_klr", "s_sizebad")
    with _open_out(args.out) as fh:
        _write_rows(fh, cols, [[rec[c] for c in cols] for rec in recs])
    return 0


def cmd_meta_verify(args) -> int:
    checks = meta.verify_treatment_stats()
    cols = ("study", "n", "delta", "r", "s", "published_klr", "klr", "klr_residual",
            "published_size_good", "size_good", "size_good_residual",
            "published_d_ic", "d_ic", "d_ic_residual", "ok")
    rows = []
    for c in checks:
        t = c.treatment
        rows.append((t.study, t.n, t.delta, t.r, t.s, t.published_klr, c.klr, c.klr_residual,
                     t.published_size_good, c.size_good, c.size_good_residual,
                     t.published_d_ic, c.d_ic, c.d_ic_residual, int(c.within())))
    with _open_out(args.out) as fh:
        _write_rows(fh, cols, rows)
    bad = sum(not c.within() for c in checks)
    if bad:
        print(f"{bad} of {len(checks)} rows outside tolerance", file=sys.stderr)
        return 1 if args.strict else 0
    return 0


def cmd_meta_correlate(args) -> int:
    rates = meta.read_human_rates(args.rates)
    results = experiments.read_results(args.results)
    recs = meta.correlate(rates, results, args.k)
    cols = ("game_index", "treatments", "pearson")
    with _open_out(args.out) as fh:
        _write_rows(fh, cols, [[rec[c] for c in cols] for rec in recs])
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pdcoop", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    a = sub.add_parser("analytics", help="potential indices for one or more games")
    a.add_argument("--delta", type=float)
    a.add_argument("--r", type=float)
    a.add_argument("--s", type=float)
    a.add_argument("--game", action="append", metavar="D,R,S")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analytics)

    a = sub.add_parser("sample-s", help="stratified s draws for one (delta, r)")
    a.add_argument("--delta", type=float, required=True)
    a.add_argument("--r", type=float, required=True)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out")
    a.set_defaults(func=cmd_sample_s)

    a = sub.add_parser("simulate", help="run a grid of Q-learning cells")
    a.add_argument("--config")
    a.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    a.add_argument("--seed", type=int)
    a.add_argument("--workers", type=int)
    a.add_argument("--periods", type=int)
    a.add_argument("--replications", type=int)
    a.add_argument("--init", choices=("optimistic", "pessimistic"))
    a.add_argument("--out")
    a.set_defaults(func=cmd_simulate)

    a = sub.add_parser("classify", help="label a pair of final Q-tables")
    a.add_argument("--row", required=True, help="8 values: CC_C,CC_D,CD_C,CD_D,DC_C,DC_D,DD_C,DD_D")
    a.add_argument("--col", required=True)
    a.set_defaults(func=cmd_classify)

    a = sub.add_parser("aggregate", help="open-ball medians over (offset, d_ic)")
    a.add_argument("--results", required=True)
    a.add_argument("--statistic", choices=("median", "mean"), default="median")
    a.add_argument("--radius", type=float, default=0.05)
    a.add_argument("--grid-points", type=int, default=50)
    a.add_argument("--out")
    a.set_defaults(func=cmd_aggregate)

    a = sub.add_parser("bins", help="mean share per unit log-ratio bin")
    a.add_argument("--results", required=True)
    a.add_argument("--x", choices=("klr", "offset"), default="klr")
    a.add_argument("--out")
    a.set_defaults(func=cmd_bins)

    a = sub.add_parser("calibrate", help="estimate K(alpha) from results")
    a.add_argument("--results", required=True)
    a.add_argument("--d-ic-min", type=float, default=0.35)
    a.add_argument("--out")
    a.set_defaults(func=cmd_calibrate)

    a = sub.add_parser("frontier", help="KLR and sizeBAD isolines in the (delta, s) plane")
    a.add_argument("--r", type=float, required=True)
    a.add_argument("--alpha", type=float, default=0.01)
    a.add_argument("--epsilon", type=float, default=0.01)
    a.add_argument("--K", type=float)
    a.add_argument("--n", type=int, default=37)
    a.add_argument("--delta-min", type=float, default=0.5)
    a.add_argument("--delta-max", type=float, default=0.98)
    a.add_argument("--out")
    a.set_defaults(func=cmd_frontier)

    m = sub.add_parser("meta", help="laboratory treatment table")
    msub = m.add_subparsers(dest="meta_command", metavar="SUBCOMMAND")
    a = msub.add_parser("verify", help="recompute the table's derived columns")
    a.add_argument("--strict", action="store_true", help="exit 1 if any row is off")
    a.add_argument("--out")
    a.set_defaults(func=cmd_meta_verify)
    a = msub.add_parser("correlate", help="correlate human and simulated rates")
    a.add_argument("--rates", required=True)
    a.add_argument("--results", required=True)
    a.add_argument("--k", type=int, default=100)
    a.add_argument("--out")
    a.set_defaults(func=cmd_meta_correlate)
    m.set_defaults(func=None, parser=m)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    func = getattr(args, "func", None)
    if func is None:
        (getattr(args, "parser", None) or parser).print_usage(sys.stderr)
        return 2
    try:
        return func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"pdcoop: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
