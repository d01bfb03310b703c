"""Command-line front end: ``qent scatter | profile | bell-curve | plot-script``."""

from __future__ import annotations

import argparse
import contextlib
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, csvio
from .belldiag import bell_r_infinity_curve, default_grid
from .entropy import EntropyFamily
from .errors import InvalidConfig, NumericalError, QentError
from .montecarlo import DEFAULT_Q, RunConfig, default_workers, profiles_from_records, run_profiles, sample_table
from .sampler import EnsembleKind
from .stats import DEFAULT_BINS

SEED_ENV = "QENT_SEED"
EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _resolve_seed(flag):
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env, 0)
    except ValueError:
        raise InvalidConfig(f"{SEED_ENV}={env!r} is not an integer") from None


def _config(args, **overrides) -> RunConfig:
    kwargs = dict(
        samples=args.samples,
        seed=_resolve_seed(args.seed),
        bins=getattr(args, "bins", DEFAULT_BINS),
        workers=args.workers or default_workers(),
        q_list=args.q or list(DEFAULT_Q),
        family=args.family,
        ensemble=args.ensemble,
    )
    kwargs.update(overrides)
    return RunConfig(**kwargs)


@contextlib.contextmanager
def _output(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def cmd_scatter(args) -> int:
    config = _config(args)
    table = sample_table(config)
    with _output(args.out) as fh:
        csvio.write_scatter(fh, config, table)
    return EXIT_OK


def _profiles_from_scatter(path, args):
    meta = csvio.read_metadata(path)
    header, data = csvio.read_table(path)
    channels = [h for h in header if h not in ("c2", "eof")]
    values = data[:, [header.index(ch) for ch in channels]].T
    profiles = profiles_from_records(
        data[:, header.index("c2")], values, channels, args.bins, half_width=args.deriv_half_width
    )
    for p in profiles:
        family, _, q = p.metadata["channel"].rpartition("_q")
        p.metadata = {
            **{k: v for k, v in meta.items() if k not in ("kind", "units")},
            "bins": args.bins,
            "family": family,
            "q": q,
            "channel": p.metadata["channel"],
            "quantity": args.quantity,
            "source": os.fspath(path),
        }
    return profiles


def cmd_profile(args) -> int:
    if args.from_scatter:
        profiles = _profiles_from_scatter(args.from_scatter, args)
    else:
        profiles = run_profiles(_config(args), args.quantity, args.deriv_half_width)
    if args.out is None or str(args.out) == "-":
        for p in profiles:
            csvio.write_profile(sys.stdout, p)
        return EXIT_OK
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for p in profiles:
        target = outdir / csvio.profile_filename(p)
        with open(target, "w", newline="") as fh:
            csvio.write_profile(fh, p)
        print(target)
    return EXIT_OK


def cmd_bell_curve(args) -> int:
    grid = np.array(args.grid, dtype=float) if args.grid else default_grid(args.points)
    points = bell_r_infinity_curve(grid)
    with _output(args.out) as fh:
        csvio.write_bell_curve(fh, points)
    return EXIT_OK


def cmd_plot_script(args) -> int:
    text = csvio.plot_script(args.inputs, title=args.title)
    with _output(args.out) as fh:
        fh.write(text)
    return EXIT_OK


def _add_run_options(p, with_bins=True):
    p.add_argument("--samples", type=int, default=200_000, help="number of sampled states (default 200000)")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=None, help=f"master seed; overrides ${SEED_ENV}")
    if with_bins:
        p.add_argument("--bins", type=int, default=DEFAULT_BINS, help="number of C^2 bins (default 50)")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
    p.add_argument("--q", action="append", help="entropic order; repeatable; accepts 1 and inf")
    p.add_argument("--family", choices=[f.value for f in EntropyFamily], default=EntropyFamily.RENYI.value)
    p.add_argument("--ensemble", choices=[e.value for e in EnsembleKind], default=EnsembleKind.FULL.value)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qent", description="Two-qubit entanglement vs q-entropy Monte Carlo.")
    parser.add_argument("--version", action="version", version=f"qent {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("scatter", help="one row per sampled state")
    _add_run_options(p)
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("profile", help="binned mean/dispersion/derivative/ratio versus C^2")
    _add_run_options(p)
    p.add_argument("--quantity", choices=["mean", "dispersion", "derivative", "ratio"], default="mean")
    p.add_argument(
        "--deriv-half-width",
        type=int,
        default=1,
        help="bins on each side for the derivative fit (1 = three-point differences)",
    )
    p.add_argument("--from-scatter", metavar="CSV", help="bin an existing scatter file instead of sampling")
    p.add_argument("--out", help="output directory, one CSV per q (default: all to stdout)")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("bell-curve", help="analytic R_inf(C^2) for Bell-diagonal states")
    p.add_argument("--grid", type=float, action="append", help="C^2 value in (0, 1]; repeatable")
    p.add_argument("--points", type=int, default=200, help="size of the default uniform grid")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_bell_curve)

    p = sub.add_parser("plot-script", help="emit a matplotlib script for qent CSV files")
    p.add_argument("inputs", nargs="+", help="CSV files produced by the other subcommands")
    p.add_argument("--title")
    p.add_argument("--out", help="script path (default stdout)")
    p.set_defaults(func=cmd_plot_script)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"qent: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (QentError, ValueError) as exc:
        print(f"qent: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"qent: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
