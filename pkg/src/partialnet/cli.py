"""Command-line front end for the experiment suite.

Subcommands: phase-sweep, counterexample, dominance, hopdist.  Every run
is deterministic given --seed; the seed is echoed in a comment header of
each CSV so outputs are reproducible byte for byte.

Exit codes: 0 success (or informational report), 2 usage error (argparse),
3 a required check failed (--require-monotone), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np
from scipy.optimize import brentq

from . import connectivity, forwarding, hopdistance
from .distributions import correlation, is_stochastically_monotone
from .forwarding import PRESETS
from .geometry import format_snapshot, sample_topology, Region
from .markov import (CORRELATION, EXPECTATION, CounterexampleSpec,
                     absorption_time_cdf, build_chain, cdf_pair_csv,
                     correlation_counterexample_delta,
                     correlation_counterexample_joint,
                     counterexample_model,
                     expectation_counterexample_delta,
                     mean_absorption_times, mean_times_csv,
                     position_marginals)

EXIT_CHECK_FAILED = 3
EXIT_IO = 4


def _parse_grid(text: str) -> list[float]:
    """Grid spec: "lo:hi:count" or a comma-separated list."""
    if ":" in text:
        lo, hi, count = text.split(":")
        return list(np.linspace(float(lo), float(hi), int(count)))
    return [float(x) for x in text.split(",") if x.strip()]


def _write_out(path: str, content: str) -> None:
    if path == "-":
        sys.stdout.write(content)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _preset(name: str):
    return PRESETS[name]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_phase_sweep(args) -> int:
    grid = _parse_grid(args.grid)
    points = connectivity.phase_sweep(args.n, args.r0, grid, args.m, args.seed,
                                      threads=args.threads)
    _write_out(args.out, connectivity.sweep_to_csv(points, seed=args.seed))
    dest = sys.stderr if args.out == "-" else sys.stdout
    for pt in points:
        regime = connectivity.classify_regime(pt.c_hat, pt.r_hat)
        print(f"d={pt.d:g}: C={pt.c_hat:.3f} R={pt.r_hat:.3f} -> {regime.label}",
              file=dest)
    if args.dump_snapshot:
        region = Region.torus(
            float(np.sqrt(connectivity.area_for_degree(args.n, args.r0, grid[0]))))
        snap = sample_topology(args.n, region, args.r0, args.seed)
        _write_out(args.dump_snapshot, format_snapshot(snap))
    return 0


def _counterexample_spec(args, p: float) -> CounterexampleSpec:
    if args.case == CORRELATION:
        return CounterexampleSpec(CORRELATION, p)
    return CounterexampleSpec(EXPECTATION, p, args.alpha)


def cmd_counterexample(args) -> int:
    ps = _parse_grid(args.p_grid) if args.p_grid else [args.p]
    if args.case == EXPECTATION and not (0.5 < args.alpha < 1.0):
        print(f"warning: expected alternate length is monotone only for "
              f"alpha in (1/2, 1); alpha={args.alpha:g} breaks the premise",
              file=sys.stderr)

    def delta(p: float) -> float:
        if args.case == CORRELATION:
            return correlation_counterexample_delta(p)
        return expectation_counterexample_delta(p, args.alpha)

    print(f"case: {args.case}  seed={args.seed}")
    spec0 = _counterexample_spec(args, ps[0])
    model0 = counterexample_model(spec0, _preset(args.preset))
    exps = [model0.alt.entry(h).mean() for h in range(1, model0.h_max + 1)]
    print("E[alternate length | h] =", ", ".join(f"{e:.6g}" for e in exps))
    mono = is_stochastically_monotone(model0.alt)
    print(f"family stochastically monotone: {mono.monotone}"
          + (f" (witness h0={mono.witness[0]}, h1={mono.witness[1]}, t={mono.witness[2]})"
             if mono.witness else ""))
    if args.case == CORRELATION:
        rho = correlation(correlation_counterexample_joint())
        print(f"correlation of (start length, alternate length): {rho:.12f}")

    print("closed-form mean-time difference T_2 - T_3:")
    for p in ps:
        print(f"  p={p:.6g}: delta={delta(p):+.6g}")
    signs = [delta(p) for p in ps]
    for lo, hi, dlo, dhi in zip(ps, ps[1:], signs, signs[1:]):
        if dlo > 0 >= dhi or dlo >= 0 > dhi:
            root = brentq(delta, lo, hi, xtol=1e-12)
            print(f"  sign change bracketed in ({lo:.6g}, {hi:.6g}); root at p={root:.12f}")

    print("chain mean delivery times per preset (intermediate forwarding):")
    for name in sorted(PRESETS):
        lines = []
        for p in ps:
            chain = build_chain(counterexample_model(_counterexample_spec(args, p),
                                                     PRESETS[name]),
                                forwarding.INTERMEDIATE)
            times = mean_absorption_times(chain)
            ts = ", ".join(f"T_{h}={times[h]:.6g}" for h in sorted(times))
            flag = "  [T_3 < T_2]" if times.get(3, 0) < times.get(2, 0) - 1e-9 else ""
            lines.append(f"    p={p:.6g}: {ts}{flag}")
        print(f"  preset {name}:")
        print("\n".join(lines))
    if args.dump_means:
        chain = build_chain(counterexample_model(_counterexample_spec(args, ps[0]),
                                                 _preset(args.preset)),
                            forwarding.INTERMEDIATE)
        _write_out(args.dump_means,
                   mean_times_csv(mean_absorption_times(chain), seed=args.seed))
    return 0


def cmd_dominance(args) -> int:
    try:
        spec = forwarding.load_run_spec(args.model)
    except OSError as exc:
        print(f"error: cannot read {args.model}: {exc}", file=sys.stderr)
        return EXIT_IO
    model = spec.model
    a1 = args.a1 if args.a1 is not None else spec.a1
    runs = args.runs if args.runs is not None else spec.runs
    seed = args.seed if args.seed_given else spec.seed

    alt_mono = is_stochastically_monotone(model.alt)
    wait_mono = (is_stochastically_monotone(model.wait)
                 if model.wait is not None else None)
    premise = alt_mono.monotone and (wait_mono is None or wait_mono.monotone)
    print(f"model: p={model.p:g} h_max={model.h_max} "
          f"preset={forwarding.preset_name(model.convention)} a1={a1} seed={seed}")
    print(f"alt family monotone: {alt_mono.monotone}; wait family monotone: "
          f"{'n/a' if wait_mono is None else wait_mono.monotone}")
    if not premise:
        print("PREMISE FAILED: families are not stochastically monotone; "
              "dominance is not predicted. Diagnostics only.")

    # exact side
    chain_s = build_chain(model, forwarding.SOURCE)
    chain_i = build_chain(model, forwarding.INTERMEDIATE)
    taus = args.tau_max
    marg_s = position_marginals(chain_s, a1, taus)
    marg_i = position_marginals(chain_i, a1, taus)
    grid = np.arange(0, model.h_max + 1)
    worst_pos = max(float(np.max(s.cdf_at(grid) - i.cdf_at(grid)))
                    for s, i in zip(marg_s, marg_i))
    cdf_s = absorption_time_cdf(chain_s, a1, args.horizon_exact)
    cdf_i = absorption_time_cdf(chain_i, a1, args.horizon_exact)
    worst_cdf = float(np.max(cdf_s.cdf - cdf_i.cdf))
    if args.dump_cdf:
        _write_out(args.dump_cdf, cdf_pair_csv(cdf_s, cdf_i, seed=seed))
    print(f"exact: worst position-CDF violation over tau<= {taus}: {worst_pos:.3e}")
    print(f"exact: worst delivery-CDF violation over t <= {args.horizon_exact}: {worst_cdf:.3e}")

    # empirical side
    report = forwarding.verify_dominance_empirical(model, a1, runs, seed,
                                                   horizon=spec.horizon,
                                                   threads=args.threads)
    print(f"empirical ({runs} coupled runs): max violation {report.max_violation:+.4f}, "
          f"band {report.band:.4f}, censored source/intermediate: "
          f"{report.censored_source}/{report.censored_intermediate}")
    if report.passed is not None:
        print(f"empirical check {'PASSED' if report.passed else 'FAILED'}")

    if args.out != "-":
        traces = {}
        for policy in (forwarding.SOURCE, forwarding.INTERMEDIATE):
            traces[policy] = [forwarding.simulate_packet(
                model, policy, a1, forwarding.keyed_seed(seed, i), spec.horizon)
                for i in range(min(runs, args.csv_runs))]
        _write_out(args.out, forwarding.runs_to_csv(traces, seed=seed))

    exact_ok = worst_pos <= 1e-9 and worst_cdf <= 1e-9
    if premise:
        print(f"exact check {'PASSED' if exact_ok else 'FAILED'}")
        if not exact_ok or report.passed is False:
            return EXIT_CHECK_FAILED
    if args.require_monotone and not premise:
        return EXIT_CHECK_FAILED
    return 0


def cmd_hopdist(args) -> int:
    study = hopdistance.estimate_hop_given_distance(
        args.r0, args.density, args.radius,
        bin_edges=hopdistance.default_bin_edges(args.radius, args.bins),
        trials=args.trials, pairs_per_trial=args.pairs, seed=args.seed,
        threads=args.threads)
    f_d = hopdistance.distance_density_disk(args.radius, study.bin_edges,
                                            args.fd_samples, seed=args.seed)
    report = hopdistance.verify_conjecture(study, f_d)
    _write_out(args.out, hopdistance.study_to_csv(study, seed=args.seed))
    print(json.dumps(report.to_dict(), indent=2))
    lc_bins = study.low_confidence_bins()
    if lc_bins:
        print(f"low-confidence distance bins (<{hopdistance.MIN_CELL_SAMPLES} "
              f"samples): {lc_bins}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="partialnet",
        description="Connectivity, forwarding, and delivery-time experiments "
                    "on partially-connected networks.")
    parser.add_argument("--config", help="JSON file with default option values "
                                          "(explicit flags override)")
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers: dict[str, argparse.ArgumentParser] = {}

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--out", default="-", help="output path ('-' = stdout)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--preset", choices=sorted(PRESETS), default="bare",
                       help="slot-accounting preset")

    ps = sub.add_parser("phase-sweep", help="connectivity phase behavior over a degree grid")
    common(ps)
    ps.add_argument("--n", type=int, default=100)
    ps.add_argument("--r0", type=float, default=1.0)
    ps.add_argument("--grid", default="1:24:24", help='"lo:hi:count" or comma list')
    ps.add_argument("--m", type=int, default=1000, help="trials per grid point")
    ps.add_argument("--dump-snapshot", default=None,
                    help="write the first topology as a text dump")
    ps.set_defaults(func=cmd_phase_sweep)

    ce = sub.add_parser("counterexample", help="delivery-time non-monotonicity studies")
    common(ce)
    ce.add_argument("--case", choices=[CORRELATION, EXPECTATION], required=True)
    ce.add_argument("--p", type=float, default=1.0 / 3.0)
    ce.add_argument("--p-grid", default=None, help='"lo:hi:count" or comma list')
    ce.add_argument("--alpha", type=float, default=0.625)
    ce.add_argument("--dump-means", default=None,
                    help='write "h,T_mean" CSV for the first p under --preset')
    ce.set_defaults(func=cmd_counterexample)

    dom = sub.add_parser("dominance", help="exact + empirical forwarding-dominance checks")
    common(dom)
    dom.add_argument("--model", required=True, help="run-spec file")
    dom.add_argument("--a1", type=int, default=None, help="override start length")
    dom.add_argument("--runs", type=int, default=None, help="override run count")
    dom.add_argument("--tau-max", type=int, default=200)
    dom.add_argument("--horizon-exact", type=int, default=2000)
    dom.add_argument("--csv-runs", type=int, default=1000,
                     help="per-run CSV row cap")
    dom.add_argument("--dump-cdf", default=None,
                     help='write "t,F_source,F_intermediate" CSV of the exact chains')
    dom.add_argument("--require-monotone", action="store_true",
                     help="exit nonzero when the monotonicity premise fails")
    dom.set_defaults(func=cmd_dominance)

    hd = sub.add_parser("hopdist", help="hop count vs distance study on a disk")
    common(hd)
    hd.add_argument("--r0", type=float, default=2.0)
    hd.add_argument("--density", type=float, default=1.25)
    hd.add_argument("--radius", type=float, default=10.0)
    hd.add_argument("--bins", type=int, default=hopdistance.DEFAULT_BINS)
    hd.add_argument("--trials", type=int, default=hopdistance.DEFAULT_TRIALS)
    hd.add_argument("--pairs", type=int, default=hopdistance.DEFAULT_PAIRS_PER_TRIAL)
    hd.add_argument("--fd-samples", type=int, default=2_000_000)
    hd.set_defaults(func=cmd_hopdist)

    subparsers.update({"phase-sweep": ps, "counterexample": ce,
                       "dominance": dom, "hopdist": hd})
    return parser, subparsers


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    # config file supplies defaults; explicit flags win by normal parsing
    if "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        try:
            with open(cfg_path, "r", encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            print(f"error: cannot read config {cfg_path}: {exc}", file=sys.stderr)
            return EXIT_IO
        for sp in subparsers.values():
            known = {a.dest for a in sp._actions}
            sp.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()
                               if k.replace("-", "_") in known})
    args = parser.parse_args(argv)
    args.seed_given = any(a.startswith("--seed") for a in argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
