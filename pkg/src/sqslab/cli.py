"""Command line entry point: ``sqslab verify | experiment | fourier | sample``.

Exit codes: 0 pass, 1 invariant or bound failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .fourier import TableError, parseval_gap, read_table_csv, wht
from .harness import (
    SELECTORS,
    ConfigError,
    ExperimentConfig,
    _Shared,
    report_json,
    run_experiment,
    run_trial,
    verify_lemmas,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sqslab", description="Statistical query sampling experiments.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check counting and concentration lemmas")
    v.add_argument("selector", choices=SELECTORS)
    v.add_argument("--n", type=int)
    v.add_argument("--p", type=int)
    v.add_argument("--xi", type=float)
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=int, default=0)

    e = sub.add_parser("experiment", help="run a JSON experiment config")
    e.add_argument("config")
    e.add_argument("--seed", type=int)
    e.add_argument("--out")
    e.add_argument("--trials", type=int)

    f = sub.add_parser("fourier", help="Walsh-Hadamard spectrum of a +-1 table")
    f.add_argument("table")
    f.add_argument("--out", required=True)

    s = sub.add_parser("sample", help="run single sampler trials and print them as JSON lines")
    s.add_argument("config")
    s.add_argument("--seed", type=int)
    s.add_argument("--trials", type=int, default=1)
    return ap


def _load(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if getattr(args, "trials", None) is not None:
        cfg.trials = args.trials
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "verify":
            report = verify_lemmas(args.selector, args.n, args.p, args.xi, args.trials, args.seed)
            sys.stdout.write(report_json(report))
            return EXIT_OK if report["passed"] else EXIT_FAIL
        if args.command == "experiment":
            cfg = _load(args)
            res = run_experiment(cfg, out=args.out)
            sys.stdout.write(res.summary_text())
            return EXIT_FAIL if res.summary["bound_satisfied"] is False else EXIT_OK
        if args.command == "fourier":
            g = read_table_csv(args.table)
            spec = wht(g)
            spec.to_csv(args.out)
            print(json.dumps({"n": spec.n, "energy": spec.energy(), "parseval_gap": parseval_gap(g, spec)}))
            return EXIT_OK
        if args.command == "sample":
            cfg = _load(args)
            shared = _Shared(cfg)
            for t in range(cfg.trials):
                rec = dataclasses.asdict(run_trial(cfg, shared, t))
                rec.pop("optimal_success")
                print(json.dumps(rec, sort_keys=True))
            return EXIT_OK
    except (ConfigError, TableError, FileNotFoundError) as exc:
        print(f"sqslab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
