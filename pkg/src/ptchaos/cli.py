"""Command-line entry point: one subcommand per experiment."""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .errors import ArgumentError, ClassificationError, ConsistencyError, ResourceError, SectorViolationError
from .experiments import EXPERIMENTS, RunConfig, run, validate

EXIT_OK, EXIT_CONFIG, EXIT_RESOURCE, EXIT_NUMERICAL = 0, 2, 3, 4
WORKERS_ENV = "PTCHAOS_WORKERS"

log = logging.getLogger("ptchaos")


def _floats(text):
    """'a,b,c' or an inclusive range 'start:stop:step'."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(round((stop - start) / step))
            return [round(start + i * step, 12) for i in range(n + 1)]
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list 'a,b' or a range 'start:stop:step', got {text!r}")


def _ints(text):
    try:
        if ":" in text:
            a, b = (int(x) for x in text.split(":"))
            return list(range(a, b + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers 'a,b' or 'a:b', got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptchaos", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="YAML run configuration")
        p.add_argument("--model", dest="models", action="append", help="model preset (repeatable)")
        p.add_argument("--L", type=_ints, help="system size(s)")
        p.add_argument("--N", type=int, help="particle number (default L/2)")
        p.add_argument("--n-B", dest="n_B", type=_ints, help="number(s) of interventions")
        p.add_argument("--dt", type=float, help="interval between interventions")
        p.add_argument("--dt-grid", type=_floats, help="interval sweep")
        p.add_argument("--kind", dest="kinds", choices=["deterministic", "projective", "both"])
        p.add_argument("--f", type=float, help="cut fraction L_R1/L")
        p.add_argument("--f-grid", type=_floats)
        p.add_argument("--n-B1", dest="n_B1", type=int)
        p.add_argument("--bins", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--t-max", dest="t_max", type=float)
        p.add_argument("--workers", type=int)
        p.add_argument("--out", help="output table path (TSV)")
        p.add_argument("--validate", action="store_true", help="check the configuration and exit")
    return parser


OVERRIDES = ("models", "L", "N", "n_B", "dt", "dt_grid", "kinds", "f", "f_grid", "n_B1", "bins", "samples",
             "seed", "t_max", "workers", "out")


def make_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    cfg.experiment = args.experiment
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            cfg.workers = int(env)
        except ValueError:
            raise ArgumentError(f"{WORKERS_ENV} must be an integer, got {env!r}")
    for key in OVERRIDES:
        value = getattr(args, key)
        if value is not None:
            setattr(cfg, key, value)
    return cfg.normalised()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = make_config(args)
        if args.validate:
            diags = validate(cfg)
            for d in diags:
                print(d)
            errors = [d for d in diags if d.level == "error"]
            if not errors:
                return EXIT_OK
            return EXIT_RESOURCE if all(d.code == "resource" for d in errors) else EXIT_CONFIG
        table = run(cfg)
        if not cfg.out:
            sys.stdout.write(table.render())
        else:
            log.info("wrote %d rows to %s", len(table.rows), cfg.out)
    except (ArgumentError, ClassificationError, SectorViolationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ConsistencyError as exc:
        print(f"numerical consistency failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
