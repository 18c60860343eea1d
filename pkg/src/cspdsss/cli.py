"""Command line entry point: ``cspdsss run ...``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import harness
from .chipmap import ChipTableError

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_CAPPED = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cspdsss", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a BER sweep and write CSV")
    run.add_argument("--config", help="flat YAML/JSON file of SimConfig fields")
    run.add_argument("--method", choices=("classic", "cs", "both"))
    run.add_argument("--kappa", type=float)
    run.add_argument("--ebn0", help="dB grid: 'a,b,c' or 'start:stop:step' (inclusive)")
    run.add_argument("--min-errors", type=int)
    run.add_argument("--max-bits", type=int)
    run.add_argument("--packet-bits", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--path", choices=harness.PATH_MODELS)
    run.add_argument("--oversample", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--chipmap", help="alternative chip-table file")
    run.add_argument("--out", help="CSV output file (default stdout)")
    run.add_argument("--theory", action="store_true", help="append theory BER columns")
    run.add_argument("--no-timing", action="store_true", help="write elapsed_s as 0 for reproducible output")
    run.add_argument("-v", "--verbose", action="store_true")
    return parser


def _config(args) -> tuple[harness.SimConfig, tuple[str, ...]]:
    method = args.method
    both = method == "both"
    overrides = dict(
        method="cs" if both else method,
        kappa=args.kappa,
        ebn0_grid_db=args.ebn0,
        min_errors=args.min_errors,
        max_bits=args.max_bits,
        packet_bits=args.packet_bits,
        seed=args.seed,
        path_model=args.path,
        oversample=args.oversample,
        workers=args.workers,
        chipmap=args.chipmap,
    )
    if args.config:
        cfg = harness.load_config(args.config, **overrides)
    else:
        cfg = harness.make_config(None, **overrides)
    methods = ("classic", "cs") if both else (cfg.method,)
    return cfg, methods


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg, methods = _config(args)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        records, _ = harness.run_sweep(
            cfg, methods, out=out, theory_columns=args.theory, timing=not args.no_timing
        )
    except (ChipTableError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME if not isinstance(exc, ChipTableError) else EXIT_CONFIG
    except KeyboardInterrupt:
        print("interrupted; partial results written", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_CAPPED if any(r.capped for r in records) else EXIT_OK
