"""Command line entry point: ``erratic <subcommand> [flags]``.

Exit status: 0 on success, 1 when a statistical or exact gate fails, 2 on a
configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import fragmentation, limit_laws, moments, noisy_sort
from .harness import (
    ConfigError,
    EmpiricalDistribution,
    ExperimentConfig,
    REGIMES,
    run_np0,
    run_oracle_suite,
    run_regime,
    stream,
)

EXIT_OK, EXIT_GATE, EXIT_CONFIG = 0, 1, 2
LAWS = ("X_lambda", "X_hat", "X_c", "theta", "xi")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="master seed (default 0)")
    parser.add_argument("--config", help="JSON config file; flags override its fields")
    parser.add_argument("--out", help="output file (or stem for compare); stdout when omitted")
    parser.add_argument("--replicates", type=int, help="number of replicates or draws")
    parser.add_argument("--depth", type=int, help="fragmentation depth K")
    parser.add_argument("--pool-size", type=int, dest="pool_size", help="X_c pool size S")
    parser.add_argument("--generations", type=int, help="X_c pool generations m")
    parser.add_argument("--format", choices=("csv", "json"), help="output format")
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="erratic", description="Quicksort with erring comparisons.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draws of I(n,p) and X_{n,p} for one cell")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--p", type=float)
    grp.add_argument("--lam", type=float, help="use p = lam / n")
    p.add_argument("--sort", choices=("quicksort", "mergesort"), default="quicksort")

    p = sub.add_parser("sample", help="draws of a limit law, sorted, one per line")
    _common(p)
    p.add_argument("--law", choices=LAWS, default="X_lambda")
    p.add_argument("--lam", type=float, default=2.0)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--u", type=float, default=0.5, help="position argument of theta")

    p = sub.add_parser("moments", help="exact g, psi, P and lam^n E[X^n] tables")
    _common(p)
    p.add_argument("--order", type=int, default=4)

    p = sub.add_parser("oracle", help="exact enumeration against Monte Carlo")
    _common(p)
    p.add_argument("--max-n", type=int, default=6, dest="max_n")

    p = sub.add_parser("compare", help="sweep a regime and compare with its limit law")
    _common(p)
    p.add_argument("--regime", choices=REGIMES)
    p.add_argument("--n", type=int, nargs="+", dest="n_values")
    p.add_argument("--c", type=float, nargs="+", dest="c_values")
    p.add_argument("--lam", type=float, nargs="+", dest="lambda_values")
    p.add_argument("--p-exponent", type=float, dest="p_exponent")
    p.add_argument("--exploratory", choices=("np0",), help="ungated data for n p -> 0")

    p = sub.add_parser("rho", help="the constant rho and the merge-sort series")
    _common(p)

    p = sub.add_parser("fragtree", help="dump one fragmentation tree")
    _common(p)
    return parser


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    for name in ("seed", "replicates", "depth", "pool_size", "generations", "format", "out",
                 "regime", "n_values", "c_values", "lambda_values", "p_exponent"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def _emit(text: str, out) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def _table(columns, rows, fmt) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(columns, r)) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def cmd_simulate(args, cfg) -> int:
    if args.n < 1:
        raise ConfigError("--n must be positive")
    p = args.p if args.p is not None else args.lam / args.n
    if not 0 < p <= 1:
        raise ConfigError("p must lie in (0, 1]")
    rng = stream(cfg.seed, "simulate", args.n)
    if args.sort == "quicksort":
        inv = noisy_sort.quicksort_inversions(args.n, p, rng, cfg.replicates)
    else:
        inv = noisy_sort.mergesort_inversions(args.n, p, rng, cfg.replicates)
    x = inv / (float(args.n) ** 2 * p)
    d = EmpiricalDistribution.of(x)
    if cfg.format == "json":
        text = json.dumps({"n": args.n, "p": p, "sort": args.sort, "seed": cfg.seed,
                           "mean": d.mean(), "var": d.variance(), "se_mean": d.std_error(),
                           "inversions": inv.tolist()}, indent=2) + "\n"
    else:
        text = _table(["inversions", "x"], [[int(i), repr(float(v))] for i, v in zip(inv, x)], "csv")
    _emit(text, cfg.out)
    logging.info("mean X = %.6f (se %.2g)", d.mean(), d.std_error())
    return EXIT_OK


def cmd_sample(args, cfg) -> int:
    rng = stream(cfg.seed, "sample", args.law)
    R = cfg.replicates
    if args.law == "X_lambda":
        x = limit_laws.sample_X_lambda(args.lam, cfg.depth, rng, R)
    elif args.law == "X_hat":
        x = fragmentation.sample_X_hat(cfg.depth, rng, R)
    elif args.law == "X_c":
        pool = limit_laws.sample_Xc_pool(args.c, cfg.pool_size, cfg.generations, rng)
        x = pool.samples if R >= pool.samples.size else pool.draw(R, rng)
    elif args.law == "theta":
        x = limit_laws.sample_theta(args.lam, args.u, rng, R)
    else:
        x = limit_laws.sample_xi(args.lam, rng, R)
    x = np.sort(x)
    if cfg.format == "json":
        text = json.dumps({"law": args.law, "seed": cfg.seed, "samples": x.tolist()}) + "\n"
    else:
        text = "".join(f"{v!r}\n" for v in x.tolist())
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_moments(args, cfg) -> int:
    if not 0 <= args.order <= moments.MAX_ORDER:
        raise ConfigError(f"--order must lie in 0..{moments.MAX_ORDER}")
    tables = moments.moment_tables(args.order)
    if cfg.format == "json":
        text = json.dumps(tables, indent=1) + "\n"
    else:
        rows = []
        for name, polys in tables.items():
            for n, pairs in enumerate(polys):
                for k, (num, den) in enumerate(pairs):
                    if num:
                        rows.append([name, n, k, str(Fraction(num, den))])
        text = _table(["table", "n", "power", "coefficient"], rows, "csv")
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_oracle(args, cfg) -> int:
    runs = args.replicates if args.replicates is not None else 10**6
    if not 2 <= args.max_n <= 7:
        raise ConfigError("--max-n must lie in 2..7")
    report = run_oracle_suite(range(2, args.max_n + 1), runs=runs, seed=cfg.seed)
    _emit(report.to_json() + "\n" if cfg.format == "json" else report.to_csv(), cfg.out)
    for row in report.failures():
        logging.error("oracle failure: %s", row)
    return EXIT_OK if report.passed else EXIT_GATE


def cmd_compare(args, cfg) -> int:
    if args.exploratory == "np0":
        n_values = cfg.n_values if args.n_values or args.config else [10**3, 10**4]
        _emit(run_np0(n_values, cfg.replicates, cfg.seed), cfg.out)
        return EXIT_OK
    cfg.validate()
    out, cfg.out = cfg.out, None
    result = run_regime(cfg)
    if out:
        for path in result.write(out, cfg.format):
            logging.info("wrote %s", path)
    else:
        sys.stdout.write(result.to_json() + "\n" if cfg.format == "json" else result.to_csv())
    return EXIT_OK if result.passed else EXIT_GATE


def cmd_rho(args, cfg) -> int:
    rho = limit_laws.solve_rho()
    rows = [["rho", repr(rho)], ["rho_residual", repr(limit_laws.rho_equation(rho))],
            ["mergesort_series", repr(moments.mergesort_series(1e-12))]]
    _emit(_table(["name", "value"], rows, cfg.format), cfg.out)
    return EXIT_OK


def cmd_fragtree(args, cfg) -> int:
    depth = args.depth if args.depth is not None else 6
    tree = fragmentation.build_tree(depth, stream(cfg.seed, "fragtree"))
    if cfg.format == "json":
        text = tree.to_json() + "\n"
    else:
        rows = [[k, j, repr(float(y))] for k, lv in enumerate(tree.levels) for j, y in enumerate(lv)]
        text = _table(["level", "index", "cut"], rows, "csv")
    _emit(text, cfg.out)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sample": cmd_sample,
    "moments": cmd_moments,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "rho": cmd_rho,
    "fragtree": cmd_fragtree,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = _config(args)
        if cfg.seed < 0 or cfg.replicates < 1 or not 0 <= cfg.depth <= fragmentation.MAX_DEPTH:
            raise ConfigError("seed must be >= 0, replicates >= 1, depth in 0..30")
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
