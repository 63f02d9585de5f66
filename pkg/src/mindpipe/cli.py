"""Command-line interface: one subcommand per stage plus run-all and cache.

Exit codes: 0 success, 1 stage failure, 2 configuration or usage error.
Every config knob can be overridden by a flag; flags win over the file.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__, pipeline
from .config import load_config
from .errors import ConfigError, MindpipeError

logger = logging.getLogger(__name__)

_STAGE_COMMANDS = (
    "ingest",
    "filter",
    "extract",
    "aggregate",
    "diagnose",
    "recommend",
    "interact",
    "report",
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="YAML config file")
    parser.add_argument("--backend-kind", choices=["mock", "http"], default=None)
    parser.add_argument("--base-url", default=None)
    parser.add_argument("--model", default=None)
    parser.add_argument("--api-key-env", default=None)
    parser.add_argument("--rps", type=float, default=None)
    parser.add_argument("--concurrency", type=int, default=None)
    parser.add_argument("--max-attempts", type=int, default=None)
    parser.add_argument("--prompts-dir", default=None)
    parser.add_argument("--lexicon", default=None, help="safety lexicon file")
    parser.add_argument("--cache-dir", default=None)
    parser.add_argument("--cohort-size", type=int, default=None)
    parser.add_argument("--event-content-budget", type=int, default=None)
    parser.add_argument("--word-budget-slack", type=float, default=None)


def _overrides(args: argparse.Namespace) -> dict:
    return {
        "backend.kind": args.backend_kind,
        "backend.base_url": args.base_url,
        "backend.model": args.model,
        "backend.api_key_env": args.api_key_env,
        "limits.rps": args.rps,
        "limits.concurrency": args.concurrency,
        "retry.max_attempts": args.max_attempts,
        "paths.prompts_dir": args.prompts_dir,
        "paths.lexicon": args.lexicon,
        "paths.cache_dir": args.cache_dir,
        "pipeline.cohort_size": args.cohort_size,
        "pipeline.event_content_budget": args.event_content_budget,
        "pipeline.word_budget_slack": args.word_budget_slack,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mindpipe",
        description="Turn social-media dump files into per-user mental-health profiles.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="parse dump files and select the cohort")
    ingest.add_argument("--input", type=Path, nargs="+", required=True)
    ingest.add_argument("--out", type=Path, required=True, help="run directory")
    _add_config_flags(ingest)

    for name in _STAGE_COMMANDS[1:]:
        stage = sub.add_parser(name, help=f"run the {name} stage on a run directory")
        stage.add_argument("--run", type=Path, required=True)
        _add_config_flags(stage)

    run_all = sub.add_parser("run-all", help="run every stage, resuming intact ones")
    run_all.add_argument("--input", type=Path, nargs="*", default=None)
    run_all.add_argument("--out", type=Path, required=True, help="run directory")
    _add_config_flags(run_all)

    cache = sub.add_parser("cache", help="report cache entries, bytes, last hit ratio")
    cache.add_argument("--run", type=Path, default=None)
    cache.add_argument("--cache-dir", type=Path, default=None)
    return parser


def _run_single_stage(name: str, run_dir: Path, config, input_paths=None) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    with pipeline.RunLock(run_dir):
        manifest = pipeline.load_manifest(run_dir)
        if manifest is None:
            manifest = pipeline.new_manifest(
                config, [str(p) for p in (input_paths or [])]
            )
        else:
            manifest["config"] = config.snapshot()
            manifest["config_digest"] = pipeline.config_digest(config)
            if input_paths:
                manifest["input_paths"] = [str(p) for p in input_paths]
        pipeline.execute_stage(name, run_dir, config, manifest, input_paths=input_paths)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        if args.command == "cache":
            if args.run is None and args.cache_dir is None:
                parser.error("cache requires --run or --cache-dir")
            try:
                entries, size, ratio = pipeline.cache_stats(args.run, args.cache_dir)
            except FileNotFoundError as exc:
                print(str(exc), file=sys.stderr)
                return 2
            ratio_text = "n/a" if ratio is None else f"{ratio:.3f}"
            print(f"entries={entries} bytes={size} last_run_hit_ratio={ratio_text}")
            return 0

        config = load_config(args.config, _overrides(args))

        if args.command == "ingest":
            _run_single_stage("ingest", args.out, config, input_paths=args.input)
        elif args.command == "run-all":
            pipeline.run_all(config, args.input, args.out)
        else:
            _run_single_stage(args.command, args.run, config)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except MindpipeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
