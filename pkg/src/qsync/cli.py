"""Command-line interface.

    qsync <command> [--config FILE] [--preset NAME] [--out PATH]
                    [--workers N] [--seed S] [--resume]

Exit codes: 0 success, 1 configuration error, 2 solver failure,
3 verification failure (verify-nogo only).  QSYNC_WORKERS overrides the
worker count.
"""

import argparse
import json
import sys

from .config import COMMANDS, ConfigError, load_config, parse_config
from .liouville import IntegrationError, SteadyStateError
from .presets import PRESETS, preset_config
from .runners import run_config

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_CHECK = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsync",
        description="Lindblad dynamics of dissipative interacting qubits: "
        "evolution, steady states, no-go verification and synchronization sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} command")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--preset", choices=PRESETS, help="start from a named experiment preset")
        p.add_argument("--out", help="output path (overrides the config)")
        p.add_argument("--workers", type=int, help="worker processes for sweeps")
        p.add_argument("--seed", type=int, help="seed override")
        p.add_argument("--resume", action="store_true", help="resume an interrupted sweep")
    return parser


def _assemble_config(args):
    if not args.config and not args.preset:
        raise ConfigError("<cli>", "provide --config, --preset or both")
    overrides = {}
    if args.config:
        if args.preset:
            with open(args.config, encoding="utf-8") as fh:
                overrides = json.load(fh)
        else:
            config = load_config(args.config)
    if args.preset:
        doc = preset_config(args.preset, overrides, seed=args.seed or 0)
        doc.setdefault("command", args.command)
        config = parse_config(json.dumps(doc))
    if config.command != args.command:
        raise ConfigError("command", f"config says {config.command!r}, CLI says {args.command!r}")
    if args.out:
        config.output_path = args.out
        config.raw["output_path"] = args.out
    if args.workers:
        config.workers = max(1, args.workers)
    if args.seed is not None:
        config.seed = args.seed
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _assemble_config(args)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        summary = run_config(config, resume=args.resume)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SteadyStateError, IntegrationError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    print(json.dumps(summary, indent=2, sort_keys=True, default=float))
    if config.command == "verify-nogo" and not summary.get("passed", False):
        print("verify-nogo: FAILED", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
