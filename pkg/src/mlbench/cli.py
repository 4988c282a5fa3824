"""Command line: ``mlbench generate | evaluate | sweep``.

Exit codes: 0 success, 2 invalid input, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config
from .core import ShapeError
from .io import FormatError, read_partition, write_csv, write_manifest, write_network, write_partition, write_sweep_csv
from .metrics import per_layer_mean_nmi

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 2, 3

log = logging.getLogger("mlbench")


def _load(args):
    config = load_config(args.config)
    if args.seed is not None:
        try:
            config = config.with_seed(args.seed)
        except ValueError as exc:
            raise ConfigError(f"--seed: {exc}") from None
    return config


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    from .pipeline import generate

    config = _load(args)
    out = _outdir(args.out)
    bench = generate(config)
    write_partition(bench.planted, out / "partition.tsv")
    for k, S in enumerate(bench.partitions[1:], start=1):
        write_partition(S, out / f"partition-chain-{k}.tsv")
    write_network(bench.network, out / "network.tsv")
    write_manifest(out / "manifest.json", config.to_dict(), config.seed, __version__)
    log.info("wrote %d state nodes, %d edges to %s", bench.shape.n_state_nodes, bench.network.n_edges, out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    planted = read_partition(args.planted)
    found = [read_partition(f) for f in args.found]
    for path, f in zip(args.found, found):
        if f.shape.sizes != planted.shape.sizes or f.shape.n != planted.shape.n:
            raise ShapeError(f"{path}: shape {f.shape.n} x {f.shape.sizes} differs from planted "
                             f"{planted.shape.n} x {planted.shape.sizes}")
    found = [planted.with_labels(f.labels) for f in found]
    summary = per_layer_mean_nmi(planted, found)
    coords = [",".join(map(str, c)) for c in planted.shape.layer_coords()]
    rows = list(zip(coords, summary.per_layer.tolist())) + [("mean", summary.mean)]
    if args.out:
        out = Path(args.out)
        if out.suffix.lower() != ".csv":
            out = _outdir(out) / "evaluation.csv"
        write_csv(out, ("layer", "nmi"), rows)
    else:
        write_csv(sys.stdout, ("layer", "nmi"), rows)
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .pipeline import sweep

    config = _load(args)
    if config.sweep is None:
        raise ConfigError("sweep: missing section")
    if args.runs is not None and args.runs < 1:
        raise ConfigError("--runs: must be at least 1")
    out = _outdir(args.out)
    rows = sweep(config, runs=args.runs, progress=log.info)
    write_sweep_csv(rows, out / "sweep.csv")
    write_manifest(out / "manifest.json", config.to_dict(), config.seed, __version__,
                   {"runs": args.runs if args.runs is not None else config.sweep.runs})
    log.info("wrote %d rows to %s", len(rows), out / "sweep.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlbench", description="Multilayer network benchmark generator")
    parser.add_argument("--version", action="version", version=f"mlbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--quiet", action="store_true", help="suppress progress messages")

    g = sub.add_parser("generate", help="sample a planted partition and a network")
    g.add_argument("--config", required=True)
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common(g)
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("evaluate", help="per-layer NMI of found partitions against a planted one")
    e.add_argument("planted")
    e.add_argument("found", nargs="+")
    e.add_argument("--out", help="CSV file or directory (default: stdout)")
    common(e)
    e.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("sweep", help="run detectors over a (mu, omega, rule) grid")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--seed", type=int, help="master seed (overrides the config)")
    s.add_argument("--runs", type=int, help="detector runs per grid point (overrides the config)")
    common(s)
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, FormatError, ShapeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
