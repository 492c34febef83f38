"""Command line entry point.

Subcommands:
  run      execute an experiment config (or a named preset) and write outputs
  verify   run the built-in self-check suite
  presets  list the bundled experiment presets

Exit codes: 0 on success, 1 when a run or check fails an invariant, 2 for
config errors.
"""

import argparse
import json
import sys

from . import experiments, verify
from .config import ConfigError, load_config, parse_config


def build_parser():
    parser = argparse.ArgumentParser(prog="qssprep")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from a config file or preset")
    run.add_argument("--config", help="path to a JSON experiment config")
    run.add_argument("--preset", choices=sorted(experiments.PRESETS),
                     help="use a bundled config instead of --config")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--out", default="out", help="output directory (default: out)")
    run.add_argument("--jobs", type=int, default=1, help="worker threads for independent runs")

    ver = sub.add_parser("verify", help="run the built-in self-check suite")
    ver.add_argument("--n", type=int, default=8, help="chain size for the checks (default: 8)")

    sub.add_parser("presets", help="list bundled presets")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)

    if args.command == "presets":
        for name in sorted(experiments.PRESETS):
            print(f"{name}: {experiments.PRESETS[name]['description']}")
        return 0

    if args.command == "verify":
        return 0 if verify.run_verification(n=args.n) else 1

    if args.config and args.preset:
        print("error: pass either --config or --preset, not both", file=sys.stderr)
        return 2
    try:
        if args.preset:
            raw = experiments.preset_config(args.preset)
        elif args.config:
            raw = load_config(args.config).raw
        else:
            print("error: one of --config or --preset is required", file=sys.stderr)
            return 2
        if args.seed is not None:
            raw = dict(raw)
            raw["seed"] = args.seed
        config = parse_config(raw)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        manifest = experiments.run_experiment(config, args.out, jobs=args.jobs)
    except (AssertionError, ValueError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({"out": args.out, "analyses": sorted(manifest["analyses"])}, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
