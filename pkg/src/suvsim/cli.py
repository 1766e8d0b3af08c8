"""Command-line interface.

    suvsim run <experiment> [--config FILE] [--seed N] [--n-traj N]
                            [--out DIR] [--noise KIND] [--scheme NAME]

Runs a named experiment preset and writes its CSV artifacts and manifest
into the output directory. Command-line options override config-file
values, which override the experiment defaults.
"""
from __future__ import annotations

import argparse
import sys

from ._version import __version__
from .config import Experiment, make_config, parse_config_file
from .dynamics import Scheme
from .errors import SimulationError
from .harness import run_experiment
from .noise import NoiseKind

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="suvsim",
        description="Stochastic state-reduction trajectory simulator for a "
        "two-state system driven by colored noise.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a named experiment preset")
    run_p.add_argument(
        "experiment",
        choices=[e.value for e in Experiment],
        help="experiment preset to run",
    )
    run_p.add_argument("--config", metavar="FILE", help="key = value settings file")
    run_p.add_argument("--seed", type=int, metavar="N", help="master seed override")
    run_p.add_argument(
        "--n-traj", type=int, dest="n_traj", metavar="N", help="ensemble size override"
    )
    run_p.add_argument("--out", metavar="DIR", help="output directory override")
    run_p.add_argument(
        "--noise",
        choices=[k.value for k in NoiseKind if k is not NoiseKind.NONE],
        help="noise process override",
    )
    run_p.add_argument(
        "--scheme",
        choices=[s.value for s in Scheme],
        help="integration scheme override",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_values = parse_config_file(args.config) if args.config else None
        cfg = make_config(
            args.experiment,
            file_values,
            master_seed=args.seed,
            n_traj=args.n_traj,
            output_dir=args.out,
            noise=args.noise,
            scheme=args.scheme,
        )
        manifest = run_experiment(cfg)
    except (SimulationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for name in [*manifest["files"], "run_manifest.json"]:
        print(f"wrote {cfg.output_dir}/{name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
