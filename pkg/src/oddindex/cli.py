"""Command line driver.

Exit status: 0 when every record matches, 1 when some record does not,
2 for an invalid configuration and 3 when a computation raises.
Environment variables are never consulted.
"""

import argparse
import sys

from .errors import IndexTheoryError
from .experiments import EXPERIMENTS, FORMATS, GEOMETRIES, ExperimentConfig, UsageError, run_experiment
from .report import emit_report

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3


def build_parser():
    p = argparse.ArgumentParser(
        prog="oddindex",
        description="Verify index identities for reflections and cylinder boundary problems.",
    )
    p.add_argument("--experiment", choices=EXPERIMENTS, default="full-suite")
    p.add_argument("--geometry", choices=GEOMETRIES, default=None,
                   help="circle/point/abstract/torus/monopole (default depends on the experiment)")
    p.add_argument("--d", type=int, default=1, help="index of the abstract fibre")
    p.add_argument("--charge", type=int, default=1, help="monopole charge")
    p.add_argument("--cutoff", type=int, default=8, help="Fourier cutoff K on the circle")
    p.add_argument("--length", type=float, default=0.5, help="cylinder length")
    p.add_argument("--grid", type=int, default=400, help="finite-difference grid points")
    p.add_argument("--tol-rank", type=float, default=1e-8)
    p.add_argument("--tol-consistency", type=float, default=1e-7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200, help="random diagrams for snake-lemma")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    return p


def config_from_args(args):
    return ExperimentConfig(
        experiment=args.experiment,
        geometry=args.geometry,
        d=args.d,
        charge=args.charge,
        cutoff=args.cutoff,
        length=args.length,
        grid=args.grid,
        tol_rank=args.tol_rank,
        tol_consistency=args.tol_consistency,
        seed=args.seed,
        trials=args.trials,
        format=args.format,
    )


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args).validate()
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        records = run_experiment(cfg)
    except IndexTheoryError as exc:
        print(f"error in stage {exc.stage or 'unknown'}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    data = emit_report(records, cfg.format)
    if not data.endswith(b"\n"):
        data += b"\n"
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK if all(r.match for r in records) else EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
