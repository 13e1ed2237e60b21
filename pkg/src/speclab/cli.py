"""Command-line front end for the experiment harness.

Every subcommand resolves its config as defaults < config-file section <
flags, prints the per-record verdicts, writes CSV/SVG/manifest artifacts
under ``--out``, and exits nonzero exactly when some record or scan-level
check failed (or the run itself errored).
"""

from __future__ import annotations

import argparse
import sys

from .experiments import EXPERIMENTS, ExperimentError, load_config, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speclab",
        description="Spectral laboratory for singular-data transport experiments.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="EXPERIMENT")
    descriptions = {
        "assumption1-scan": "band-depth scan of the singular image of the indicator datum",
        "linear-inflation": "forced-transport inflation across an eps ladder",
        "euler-inflation": "perturbed 2D flow: forced vs unforced vorticity growth",
        "exp-growth": "2.5-D scalar-gradient exponential growth across resolutions",
        "c1-inflation": "pressure-Hessian L^p structure of the C1 velocity datum",
        "commutator-scan": "commutator norm-ratio law across flow-map sizes",
        "calibrate": "re-measure the cheap frozen constants into a snapshot",
    }
    for name in EXPERIMENTS:
        cmd = sub.add_parser(name, help=descriptions.get(name, name))
        cmd.add_argument("--config", help="flat key-value config file")
        cmd.add_argument("--out", help="artifact directory (default from config)")
        cmd.add_argument(
            "--resolution", type=int, help="grid points per side (power of two)"
        )
        cmd.add_argument("--period", type=float, help="torus side length")
        cmd.add_argument("--dt", type=float, help="solver time step")
        cmd.add_argument(
            "--quiet", action="store_true", help="suppress per-record output"
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        "resolution": args.resolution,
        "period": args.period,
        "dt": args.dt,
        "out_dir": args.out,
    }
    try:
        cfg = load_config(args.experiment, path=args.config, overrides=overrides)
        result = run_experiment(cfg, quiet=args.quiet)
    except ExperimentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 1 if result.failed else 0


if __name__ == "__main__":
    sys.exit(main())
