"""Command-line entry point.

Subcommands:
    list      show the built-in scenario catalog
    run       execute an SNR sweep, write a CSV, print the asymptotic profile
    design    print a designed kernel and its projected pair geometry
    analyze   slope/gain fit on an existing run CSV
"""

from __future__ import annotations

import argparse
import csv
import sys

from .bounds import AsymptoteFit, fit_asymptote, multiclass_asymptotics
from .linalg import effective_rank
from .measurement import DesignImpossibleError, EmptyDesignError, projected_pair_geometry
from .montecarlo import SweepResult, snr_sweep
from .scenarios import ScenarioConfig, build_kernel, build_source, list_scenarios
from .source import pair_geometry

CSV_COLUMNS = ["scenario", "kernel", "M", "snr_db", "sigma2", "perr_mc",
               "ci_low", "ci_high", "perr_ub", "n_trials", "seed"]


def _fmt(x: float) -> str:
    return f"{float(x):.17e}"


def write_sweep_csv(path: str, result: SweepResult, m: int) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in result.records:
            est = rec.estimate
            writer.writerow([
                result.scenario, result.kernel_label, m,
                _fmt(rec.snr_db), _fmt(rec.sigma2), _fmt(est.p_err),
                _fmt(est.ci_low), _fmt(est.ci_high), _fmt(rec.union_bound),
                est.n_trials, est.seed,
            ])


def read_sweep_csv(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise ValueError(
                f"{path}: unexpected CSV schema {reader.fieldnames}, "
                f"expected {CSV_COLUMNS}")
        return list(reader)


def _parse_snr(spec: str):
    try:
        start, stop, step = (float(p) for p in spec.split(":"))
    except ValueError:
        raise ValueError(f"SNR grid must look like A:B:STEP, got {spec!r}")
    if step <= 0 or stop < start:
        raise ValueError("SNR grid needs step > 0 and stop >= start")
    values = []
    v = start
    while v <= stop + 1e-9:
        values.append(round(v, 12))
        v += step
    return values


def _pair_label(pairs) -> str:
    return ", ".join(f"({i + 1},{j + 1})" for i, j in pairs)


def _print_fit(fit: AsymptoteFit) -> None:
    if fit.floored:
        print(f"fitted: floor (slope {fit.d_hat:+.4f})")
    else:
        print(f"fitted: d_hat={fit.d_hat:.4f} gain_hat={fit.gain_hat:.6e}")


def cmd_list(_args) -> int:
    catalog = list_scenarios()
    for name, cfg in catalog.items():
        src = build_source(cfg)
        class_ranks = ",".join(
            str(effective_rank(c.covariance)) for c in src.classes)
        pair_ranks = "; ".join(
            f"({i + 1},{j + 1}):{pair_geometry(src, i, j).rank_joint}"
            for i in range(src.num_classes - 1)
            for j in range(i + 1, src.num_classes))
        print(f"{name}: L={src.num_classes} N={src.dim} "
              f"class_ranks=[{class_ranks}] joint_ranks=[{pair_ranks}] "
              f"kernel={cfg.kernel.kind}(M={cfg.kernel.m}) "
              f"snr={cfg.snr.start_db:g}:{cfg.snr.stop_db:g}:{cfg.snr.step_db:g} "
              f"trials={cfg.trials}")
    return 0


def _resolve_scenario(name: str) -> ScenarioConfig:
    catalog = list_scenarios()
    if name not in catalog:
        raise KeyError(
            f"unknown scenario {name!r}; available: {', '.join(sorted(catalog))}")
    return catalog[name]


def cmd_run(args) -> int:
    cfg = _resolve_scenario(args.scenario)
    trials = args.trials if args.trials is not None else cfg.trials
    if trials < 1:
        raise ValueError("trial count must be at least 1")
    seed = args.seed if args.seed is not None else cfg.seed
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    grid = _parse_snr(args.snr) if args.snr else cfg.snr.values()
    src = build_source(cfg)
    kernel = build_kernel(cfg, src, m=args.m, kind=args.kernel)

    profile = multiclass_asymptotics(kernel, src)
    print(f"scenario: {cfg.name}  kernel: {kernel.describe()}  M={kernel.m}")
    print(f"analytic profile: {profile.describe()}")
    if profile.governing_pairs and src.num_classes > 2:
        print(f"governed by class pair(s) {_pair_label(profile.governing_pairs)}")

    result = snr_sweep(src, kernel, grid, trials, seed, scenario=cfg.name)
    out = args.out or f"{cfg.name}.csv"
    write_sweep_csv(out, result, kernel.m)
    print(f"wrote {len(result.records)} records to {out}")

    curve = [(rec.sigma2, rec.union_bound) for rec in result.records
             if rec.union_bound > 0.0]
    if len(curve) >= 2 and max(s for s, _ in curve) / min(s for s, _ in curve) >= 100.0:
        _print_fit(fit_asymptote(curve))
    else:
        print("fitted: skipped (bound curve does not span two positive decades)")
    return 0


def cmd_design(args) -> int:
    cfg = _resolve_scenario(args.scenario)
    src = build_source(cfg)
    try:
        kernel = build_kernel(cfg, src, m=args.m, kind="designed")
    except DesignImpossibleError as exc:
        pair = exc.pair if exc.pair is not None else (0, 1)
        print(f"design impossible: classes {_pair_label([pair])} have fully "
              "overlapping covariance images (no non-overlapping dimensions)",
              file=sys.stderr)
        return 1
    except EmptyDesignError as exc:
        print(f"design failed: {exc}", file=sys.stderr)
        return 1
    print(f"# designed kernel for {cfg.name}: {kernel.describe()}, "
          f"{kernel.m} x {kernel.n}")
    for row in kernel.phi:
        print(",".join(_fmt(v) for v in row))
    for i in range(src.num_classes - 1):
        for j in range(i + 1, src.num_classes):
            g = projected_pair_geometry(kernel, src, i, j)
            print(f"# pair ({i + 1},{j + 1}): r_i={g.rank_i} r_j={g.rank_j} "
                  f"r_ij={g.rank_joint} v_i={g.pdet_i:.6e} v_j={g.pdet_j:.6e} "
                  f"v_ij={g.pdet_joint:.6e}")
    return 0


def cmd_analyze(args) -> int:
    rows = read_sweep_csv(args.infile)
    if not rows:
        raise ValueError(f"{args.infile}: no data rows")
    ub_curve = [(float(r["sigma2"]), float(r["perr_ub"])) for r in rows
                if float(r["perr_ub"]) > 0.0]
    if len(ub_curve) < 2:
        raise ValueError("bound column has fewer than two positive points")
    fit = fit_asymptote(ub_curve)
    print(f"bound fit over two lowest decades of {args.infile}:")
    _print_fit(fit)
    sig_min = min(s for s, _ in ub_curve)
    mc_window = [(float(r["sigma2"]), float(r["perr_mc"])) for r in rows
                 if float(r["perr_mc"]) > 0.0
                 and float(r["sigma2"]) <= sig_min * 100.0 * (1 + 1e-9)]
    if len(mc_window) >= 2:
        import numpy as np

        slope, _ = np.polyfit(np.log([s for s, _ in mc_window]),
                              np.log([p for _, p in mc_window]), 1)
        print(f"monte-carlo slope over same window: {slope:.4f} "
              f"({len(mc_window)} points)")
    else:
        print("monte-carlo slope: skipped (fewer than two positive points in window)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compclass",
        description="Compressive classification of Gaussian mixtures: "
                    "sweeps, bounds, and kernel designs.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="show the built-in scenario catalog")

    p_run = sub.add_parser("run", help="run an SNR sweep and write a CSV")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--m", type=int, default=None,
                       help="override the number of measurements")
    p_run.add_argument("--kernel", choices=["random", "designed"], default=None,
                       help="override the kernel type")
    p_run.add_argument("--trials", type=int, default=None,
                       help="Monte Carlo trials per grid point")
    p_run.add_argument("--seed", type=int, default=None, help="master seed")
    p_run.add_argument("--snr", default=None, metavar="A:B:STEP",
                       help="SNR grid in dB, e.g. 0:60:2")
    p_run.add_argument("--out", default=None, help="output CSV path")

    p_design = sub.add_parser("design", help="print a designed kernel")
    p_design.add_argument("--scenario", required=True)
    p_design.add_argument("--m", type=int, required=True)

    p_an = sub.add_parser("analyze", help="slope/gain fit on an existing CSV")
    p_an.add_argument("--in", dest="infile", required=True)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"list": cmd_list, "run": cmd_run,
                "design": cmd_design, "analyze": cmd_analyze}
    try:
        return handlers[args.command](args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
