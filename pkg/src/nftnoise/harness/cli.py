"""Command line entry point ``nftnoise``.

Subcommands::

    nftnoise list
    nftnoise validate --config configs/e9.yaml
    nftnoise run --config configs/e9.yaml --out results --workers 4 --seed 7

Exit codes: 0 pass, 1 threshold failure, 2 configuration error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from ..errors import ConfigError
from .config import ExperimentConfig
from .experiments import list_experiments
from .runner import EXIT_CONFIG, EXIT_PASS, run_experiment

log = logging.getLogger("nftnoise")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nftnoise", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = p.add_subparsers(dest="command", required=True)

    ls = sub.add_parser("list", help="list experiments and their figure mapping")
    ls.add_argument("--json", action="store_true", help="machine-readable output")

    val = sub.add_parser("validate", help="check a config file without running it")
    val.add_argument("-c", "--config", required=True, help="YAML or JSON config path")

    run = sub.add_parser("run", help="run an experiment")
    run.add_argument("-c", "--config", required=True, help="YAML or JSON config path")
    run.add_argument("-o", "--out", help="output directory (overrides output_dir)")
    run.add_argument("-w", "--workers", type=int, help="parallel worker processes")
    run.add_argument("-s", "--seed", type=int, help="override the master seed")
    return p


def _load(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config)
    if args.command == "run":
        cfg = cfg.with_overrides(seed=args.seed, workers=args.workers, output_dir=args.out)
    return cfg


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "list":
        entries = list_experiments()
        if args.json:
            print(json.dumps(entries, indent=2))
        else:
            for e in entries:
                print(f"{e['id']:<4} {e['figures']:<12} {e['title']}")
        return EXIT_PASS
    try:
        cfg = _load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        print(f"{args.config}: ok ({cfg.experiment_id}, hash {cfg.hash()[:12]})")
        return EXIT_PASS
    log.info("running %s with seed %d on %d worker(s)", cfg.experiment_id, cfg.seed, cfg.workers)
    outcome = run_experiment(cfg)
    for c in outcome.result.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}")
    if outcome.error:
        print(f"error: {outcome.error}", file=sys.stderr)
    print(f"artifacts: {outcome.directory}")
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
