"""Command-line entry point: ``lonsim <stage> [--config PATH] [--seed U64] [--jobs N] [--out DIR]``.

Exit codes: 0 ok, 2 configuration error, 3 missing upstream artifact,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .exceptions import LonsimError
from .pipeline import STAGE_FUNCS, ConfigError, MissingArtifactError, cmd_verify, load_config, run_all

EXIT_OK, EXIT_CONFIG, EXIT_MISSING, EXIT_INVARIANT = 0, 2, 3, 4


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _jobs(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("--jobs must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON configuration file")
    common.add_argument("--seed", type=_u64, metavar="U64", help="master seed (overrides the config)")
    common.add_argument("--jobs", type=_jobs, default=1, metavar="N", help="worker processes (default 1)")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
    common.add_argument("-q", "--quiet", action="store_true", help="only report errors")

    parser = argparse.ArgumentParser(prog="lonsim", description="Local optima network landscape analysis pipeline.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "generate": "write random problem instances",
        "sample": "sample RAW, monotonic and compressed LONs",
        "features": "node and graph features, CDD, RCC, trajectories",
        "embed": "footprints, instance space and node embeddings",
        "sim": "similarity matrix over footprints",
        "eval": "simulated annealing success rates versus similarity",
        "report": "collect tables and write the run manifest",
        "all": "run every stage in order",
        "verify": "oracle cross-checks on small instances",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text.capitalize() + ".")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config, {"master_seed": args.seed, "output": args.out})
        if args.command == "verify":
            checks = cmd_verify(cfg, args.jobs)
            for name, ok, detail in checks:
                print(f"{'PASS' if ok else 'FAIL'} {name}" + (f" ({detail})" if detail and not ok else ""))
            return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_INVARIANT
        if args.command == "all":
            run_all(cfg, args.jobs)
        else:
            STAGE_FUNCS[args.command](cfg, args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingArtifactError as exc:
        print(f"missing artifact: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except LonsimError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
