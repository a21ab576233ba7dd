"""
weylwalk lab - Main Entry Point.

Usage:
    # Headline tail experiment with the recipe's defaults
    uv run weylwalk tail --seed 7

    # Override budgets from a config file and flags
    uv run weylwalk limit-dist --seed 7 --config runs/limit.yaml --particles 100000

    # Print the chamber constants
    uv run weylwalk constants --seed 1 --samples 10000000

Exit codes: 0 success, 2 statistical acceptance failure, 3 degenerate run,
64 usage error, 1 unexpected error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from weylwalk_recipes import RecipeConfig, RecipeRegistry

from .config import ExperimentKind, build_config, read_config_file
from .experiments import EXIT_ERROR, EXIT_USAGE, run
from .settings import Settings

logger = logging.getLogger(__name__)

# subcommand -> experiment kind; the recipe of the same kind supplies defaults
COMMANDS: dict[str, ExperimentKind] = {
    "tail": ExperimentKind.TAIL,
    "v-props": ExperimentKind.V_PROPERTIES,
    "limit-dist": ExperimentKind.LIMIT_DIST,
    "dyson-compare": ExperimentKind.DYSON_COMPARE,
    "heavy-tail": ExperimentKind.HEAVY_TAIL,
    "constants": ExperimentKind.CONSTANTS,
}


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 64."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="Root seed (required unless the config file sets it)")
    common.add_argument("--config", type=Path, help="Flat YAML config file (schema_version: 1)")
    common.add_argument("--out", type=Path, help="Output directory (overrides WEYLWALK_OUT_DIR)")
    common.add_argument(
        "--workers", "--threads", dest="workers", type=int, help="Worker processes (overrides WEYLWALK_WORKERS)"
    )
    common.add_argument("--particles", type=int, help="Particles per splitting level or sampler")
    common.add_argument("--samples", type=int, help="Monte Carlo sample budget")
    common.add_argument("--recipe", help="Recipe name (defaults to the recipe of the subcommand's kind)")
    common.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (overrides WEYLWALK_LOG_LEVEL)",
    )

    parser = _Parser(prog="weylwalk", description="Monte Carlo experiments for random walks in the Weyl chamber")
    subcommands = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    subcommands.required = True
    for name, kind in COMMANDS.items():
        subcommands.add_parser(name, parents=[common], help=f"run the {kind.value} experiment")
    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stdout)],
    )


def _recipe(registry: RecipeRegistry, name: str | None, kind: ExperimentKind) -> RecipeConfig | None:
    if name:
        return registry.load(name)
    return registry.for_kind(kind.value)


def _overrides(args: argparse.Namespace, settings: Settings, kind: ExperimentKind) -> dict[str, Any]:
    return {
        "kind": kind.value,
        "seed": args.seed,
        "out_dir": args.out or settings.out_dir,
        "workers": args.workers,
        "particles": args.particles,
        "samples": args.samples,
    }


def main(argv: list[str] | None = None) -> None:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    settings = Settings()
    _configure_logging(args.log_level or settings.log_level)

    kind = COMMANDS[args.command]
    registry = RecipeRegistry(settings.recipes_dir)
    try:
        recipe = _recipe(registry, args.recipe, kind)
        file_values = read_config_file(args.config) if args.config else None
        config = build_config(
            recipe.defaults if recipe else None,
            file_values,
            _overrides(args, settings, kind),
            env_workers=settings.workers,
        )
    except (ValidationError, ValueError, FileNotFoundError) as e:
        logger.error(f"Invalid configuration: {e}")
        sys.exit(EXIT_USAGE)

    try:
        result = run(config, recipe)
    except Exception as e:
        logger.exception(f"Unexpected error during {kind.value} run: {e}")
        sys.exit(EXIT_ERROR)

    report = result.run_dir / "report.md"
    if report.exists():
        print(report.read_text(encoding="utf-8"))
    sys.exit(result.exit_code)


if __name__ == "__main__":
    main()
