"""Command-line interface: ``topomix {decompose,tde,pipeline,bench}``.

Data goes to stdout (or ``--output``), diagnostics to stderr.  Exit codes:
0 on success, 2 for bad input, 3 for numeric or contract failures.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bandwidth import (
    DEFAULT_BANDWIDTH_COUNT,
    DEFAULT_HI_FRACTION,
    DEFAULT_LO_FRACTION,
    DEFAULT_MEASURE,
    MeasureKind,
    default_bandwidth_grid,
    estimate_ucat,
    select_bandwidth,
    ucat_profile,
)
from .bench import FkmSpec, evaluate_recovery, stats_to_csv
from .errors import InputError, NumericError
from .grid_density import Grid, kde, resample
from .mixture_opt import tme
from .pipeline import DEFAULT_CELLS, PipelineConfig, panels, reblur_tme
from .serialize import (
    MixtureDocument,
    looks_like_density,
    parse_density,
    parse_sample,
    stacked_csv,
)

log = logging.getLogger("topomix")

EXIT_INPUT = 2
EXIT_NUMERIC = 3


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _provenance(args, **config) -> dict:
    return {
        "input": getattr(args, "input", None),
        "seed": args.seed,
        "config": config,
        "version": __version__,
    }


def cmd_decompose(args) -> int:
    text = _read_input(args.input)
    n_cells = args.grid or DEFAULT_CELLS
    if args.bandwidth is not None:
        x = parse_sample(text)
        lo, hi = x.min() - 3 * args.bandwidth, x.max() + 3 * args.bandwidth
        f = kde(x, args.bandwidth, Grid.from_span(lo, hi, n_cells))
    else:
        if not looks_like_density(text):
            raise InputError("expected x,value rows (pass --bandwidth to decompose a sample)")
        f = parse_density(text)
        # only coarsen; small inputs keep their own cells
        if args.grid is not None or f.grid.n_cells > n_cells:
            f = resample(f, Grid(f.grid.x0, f.grid.dx * f.grid.n_cells / n_cells, n_cells))
        f = f.normalized()
    report = tme(f)
    doc = MixtureDocument.build(
        report.mixture,
        provenance=_provenance(
            args, bandwidth=args.bandwidth, n_cells=f.grid.n_cells,
            iterations=report.iterations, converged=report.converged,
        ),
    )
    _emit(args, doc.to_json())
    return 0


def _bandwidths(args, x):
    count = args.bandwidths or DEFAULT_BANDWIDTH_COUNT
    return default_bandwidth_grid(x, count, DEFAULT_LO_FRACTION, DEFAULT_HI_FRACTION)


def cmd_tde(args) -> int:
    x = parse_sample(_read_input(args.input))
    grid = _bandwidths(args, x)
    eval_grid = None
    if args.grid is not None:
        h_max = grid.values[-1]
        eval_grid = Grid.from_span(x.min() - 3 * h_max, x.max() + 3 * h_max, args.grid)
    profile = ucat_profile(x, grid, eval_grid, threads=args.threads)
    m_hat = estimate_ucat(profile, args.measure)
    result = select_bandwidth(profile, m_hat, args.measure)
    out = result.as_dict()
    if args.profile:
        out["profile"] = [
            {"h": float(h), "ucat": int(u)} for h, u in zip(profile.bandwidths.values, profile.ucats)
        ]
    _emit(args, json.dumps(out, indent=2))
    return 0


def cmd_pipeline(args) -> int:
    x = parse_sample(_read_input(args.input))
    config = PipelineConfig(
        measure=args.measure,
        n_bandwidths=args.bandwidths or DEFAULT_BANDWIDTH_COUNT,
        n_cells=args.grid or DEFAULT_CELLS,
        threads=args.threads,
    )
    result = reblur_tme(x, config)
    prov = _provenance(
        args, measure=MeasureKind(config.measure).value,
        n_bandwidths=config.n_bandwidths, n_cells=config.n_cells,
    )
    if args.all_panels:
        mixtures = panels(result, config.rtol)
    else:
        mixtures = {"reblurred": result.reblurred}
    docs = [
        MixtureDocument.build(m, result.tde, result.delta_h, prov, panel=name).to_dict()
        for name, m in mixtures.items()
    ]
    if args.plot:
        Path(args.plot).write_text(stacked_csv(mixtures))
    _emit(args, json.dumps(docs if args.all_panels else docs[0], indent=2))
    return 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def cmd_bench(args) -> int:
    rows = []
    for k in args.k:
        for m in args.m:
            stats = evaluate_recovery(
                FkmSpec(k, m), args.n, args.trials, args.measure, args.seed, args.threads
            )
            log.info("k=%d m=%d hit rate %.2f", k, m, stats.hit_rate)
            rows.append(stats)
    if args.format == "csv":
        _emit(args, stats_to_csv(rows).rstrip("\n"))
    else:
        _emit(args, json.dumps([s.as_dict() for s in rows], indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write data here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="random seed (recorded in provenance)")
    common.add_argument("--threads", type=int, default=1, help="parallelism hint for profile/bench")
    common.add_argument(
        "--measure", type=MeasureKind, choices=list(MeasureKind), default=DEFAULT_MEASURE,
        help="measure on bandwidths (default: %(default)s)",
    )
    common.add_argument("--bandwidths", type=int, help="number of proposed bandwidths")
    common.add_argument("--grid", type=int, help="number of grid cells")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="topomix", description="Unimodal mixture decompositions of 1-D densities.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", parents=[common], help="TME of a density or of a KDE")
    d.add_argument("input", help="x,value density CSV, or sample CSV with --bandwidth ('-' for stdin)")
    d.add_argument("--bandwidth", type=float, help="treat input as a sample and use this KDE bandwidth")
    d.set_defaults(func=cmd_decompose)

    t = sub.add_parser("tde", parents=[common], help="persistence-based bandwidth selection")
    t.add_argument("input", help="sample CSV ('-' for stdin)")
    t.add_argument("--profile", action="store_true", help="include the (h, ucat) profile")
    t.set_defaults(func=cmd_tde)

    pl = sub.add_parser("pipeline", parents=[common], help="deblurred/reblurred mixture from a sample")
    pl.add_argument("input", help="sample CSV ('-' for stdin)")
    pl.add_argument("--all-panels", action="store_true",
                    help="emit sweep, TME, deblurred and reblurred decompositions")
    pl.add_argument("--plot", help="write stacked-area CSV here")
    pl.set_defaults(func=cmd_pipeline)

    b = sub.add_parser("bench", parents=[common], help="ucat recovery on the f_km family")
    b.add_argument("--k", type=_int_list, default=[3], help="comma-separated k values")
    b.add_argument("--m", type=_int_list, default=[1], help="comma-separated m values")
    b.add_argument("--n", type=int, default=500)
    b.add_argument("--trials", type=int, default=20)
    b.add_argument("--format", choices=["json", "csv"], default="json")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except InputError as e:
        print(f"topomix: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericError, ArithmeticError, FloatingPointError) as e:
        print(f"topomix: numeric error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
