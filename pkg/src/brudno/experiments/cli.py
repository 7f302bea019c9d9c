"""Command line: ``brudno run|validate|list-examples``.

Exit status is 0 when every check passes, 1 when a check fails and 2 for
configuration or resource errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from ..errors import ResourceLimitError
from . import config as cfgmod
from .runner import run, write_artifacts

log = logging.getLogger("brudno")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def _load(args):
    path = cfgmod.resolve(args.config)
    raw = cfgmod.read_yaml(path) or {}
    if args.seed_override is not None and isinstance(raw, dict):
        raw["seed"] = args.seed_override
    return cfgmod.build(raw, name=path.stem, source_path=str(path))


def cmd_run(args) -> int:
    try:
        cfg = _load(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except cfgmod.ConfigError as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("running %s (%s)", cfg.name, cfg.kind)
    try:
        result = run(cfg, jobs=args.jobs)
    except ResourceLimitError as exc:
        print(f"error: resource limit {exc.cap_name} = {exc.cap}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    target = write_artifacts(result, args.out)
    for c in result.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")
    print(f"{'passed' if result.passed else 'FAILED'}; artifacts in {target}")
    return EXIT_OK if result.passed else EXIT_FAILED


def cmd_validate(args) -> int:
    try:
        path = cfgmod.resolve(args.config)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raw = cfgmod.read_yaml(path)
    if raw is None:
        raw = {}
    diags = cfgmod.validate(raw)
    for d in diags:
        print(d)
    if not diags:
        print(f"{path}: ok")
    return EXIT_CONFIG if diags else EXIT_OK


def cmd_list(args) -> int:
    for name, path in cfgmod.shipped_configs().items():
        raw = cfgmod.read_yaml(path) or {}
        print(f"{name:34s} {raw.get('kind', '?'):20s} {raw.get('description', '')}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brudno", description="Gacs complexity and entropy experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("--config", required=True, help="YAML file, or the name of a shipped example")
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sampled parts")
    p.add_argument("--seed-override", type=int, default=None, help="replace the config seed")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="check a config and list every problem")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("list-examples", help="list the shipped example configs")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
