"""Command-line entry point and check orchestrator."""

import argparse
import asyncio
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import structlog
from pydantic import ValidationError

from core.config import get_settings
from core.exceptions import ConfigError
from core.logging import setup_logging
from schemas.reports import CheckReport
from schemas.run_config import RunConfig
from services.report_writer import ReportWriter

from .base_check import CheckOutcome
from .checks import CHECKS

logger = structlog.get_logger(__name__)

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


class VerificationOrchestrator:
    """Runs subcommand checks and collects their outcomes."""

    def __init__(self):
        self.checks = {name: check_class() for name, check_class in CHECKS.items()}

    def run_single_check(self, config: RunConfig) -> Dict[str, Any]:
        """Run the check for one config."""
        name = config.subcommand
        if name not in self.checks:
            raise ValueError(f"Unknown subcommand: {name}")

        logger.info(f"Starting check: {name}")
        result = self.checks[name].run(config)
        logger.info(
            f"Check finished: {name}",
            status=result["status"]
        )
        return result

    def run_all(self, configs: List[RunConfig]) -> List[Dict[str, Any]]:
        """Run several configs one after another."""
        logger.info("Starting checks", total=len(configs))

        results = [self.run_single_check(config) for config in configs]

        successful = sum(1 for r in results if r.get("status") == "completed")
        logger.info(
            "Checks completed",
            successful=successful,
            total=len(results)
        )
        return results

    async def run_all_async(self, configs: List[RunConfig], max_workers: Optional[int] = None) -> List[Dict[str, Any]]:
        """Run several configs in worker threads; results keep the input order."""
        limit = asyncio.Semaphore(max_workers or get_settings().max_workers)
        logger.info("Starting async checks", total=len(configs))

        async def bounded(config: RunConfig) -> Dict[str, Any]:
            async with limit:
                return await asyncio.to_thread(self.run_single_check, config)

        tasks = [asyncio.create_task(bounded(config)) for config in configs]
        return list(await asyncio.gather(*tasks))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hwc", description="Formal Hitchin-Witten connection checks")
    parser.add_argument("--log-level", default=None)
    parser.add_argument("--log-format", choices=["json", "console"], default=None)
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    def common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--config", type=Path, help="JSON file; its keys override flags")
        sub.add_argument("--k", type=int)
        sub.add_argument("--seed", type=int)
        sub.add_argument("--samples", type=int)
        sub.add_argument("--output-dir", dest="output_dir")

    def ordered(sub: argparse.ArgumentParser, *flags: str) -> None:
        for flag in flags:
            sub.add_argument(flag, dest="max_order", type=int)

    coeffs = subparsers.add_parser("coeffs", help="emit the coefficient table")
    common(coeffs)
    ordered(coeffs, "--max-order")
    coeffs.add_argument("--diagonal", choices=["zero", "random"])
    coeffs.add_argument("--diagonal-values", dest="diagonal_values", nargs="+")

    algebra = subparsers.add_parser("verify-algebra", help="commutation relations and confluence")
    common(algebra)
    ordered(algebra, "--max-order")
    algebra.add_argument("--adiff-order", dest="adiff_order", type=int)

    recursion = subparsers.add_parser("verify-recursion", help="symbolic recursion")
    common(recursion)
    ordered(recursion, "--max-order")
    recursion.add_argument("--random-tables", dest="random_tables", type=int)
    recursion.add_argument("--diagonal-values", dest="diagonal_values", nargs="+")

    trivialisation = subparsers.add_parser("verify-trivialisation", help="exp(r Delta) trivialisation")
    common(trivialisation)
    ordered(trivialisation, "--order")
    trivialisation.add_argument("--numeric", action="store_true", default=None)
    trivialisation.add_argument("--N", type=int)
    trivialisation.add_argument("--s", type=float)
    trivialisation.add_argument("--step", type=float)
    trivialisation.add_argument("--sigma", type=float, nargs=2)
    trivialisation.add_argument("--sigma-end", dest="sigma_end", type=float, nargs=2)

    forms = subparsers.add_parser("verify-forms", help="graded bracket identities and formal curvature")
    common(forms)
    ordered(forms, "--max-order")

    landau = subparsers.add_parser("landau", help="numerical experiments in the Landau model")
    common(landau)
    landau.add_argument("--experiment", required=False)
    ordered(landau, "--L")
    landau.add_argument("--N", type=int)
    landau.add_argument("--sigma", type=float, nargs=2)
    landau.add_argument("--sigma-end", dest="sigma_end", type=float, nargs=2)
    landau.add_argument("--direction", type=float, nargs=2)
    landau.add_argument("--second-direction", dest="second_direction", type=float, nargs=2)
    landau.add_argument("--s", type=float)
    landau.add_argument("--s-grid", dest="s_grid", type=float, nargs="+")
    landau.add_argument("--h", type=float)
    landau.add_argument("--h-mixed", dest="h_mixed", type=float)
    landau.add_argument("--step", type=float)
    landau.add_argument("--f")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Flags first, then the config file on top; raise ConfigError on anything invalid."""
    values = {
        key: value
        for key, value in vars(args).items()
        if value is not None and key not in ("config", "log_level", "log_format")
    }
    if getattr(args, "config", None) is not None:
        try:
            file_values = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config file {args.config}: {e}") from e
        if not isinstance(file_values, dict):
            raise ConfigError(f"config file {args.config} must hold a JSON object")
        values.update(file_values)
    try:
        return RunConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def run(config: RunConfig, orchestrator: Optional[VerificationOrchestrator] = None) -> CheckReport:
    """Run one config and write its reports."""
    orchestrator = orchestrator or VerificationOrchestrator()
    result = orchestrator.run_single_check(config)
    outcome: CheckOutcome = result["outcome"]
    report = CheckReport.from_results(config, outcome.results)
    ReportWriter(config.output_dir).write(report, outcome.table_rows, outcome.series_rows)
    return report


def print_summary(report: CheckReport) -> None:
    print("\n" + "=" * 50)
    print(f"{report.config.subcommand.upper()} SUMMARY")
    print("=" * 50)
    for result in report.results:
        status = "passed" if result.passed else "FAILED"
        print(f"{result.name}: {status} (residual {result.residual})")
        if "error" in result.details:
            print(f"  Error: {result.details['error']}")
    print("=" * 50)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level, args.log_format)

    try:
        config = load_config(args)
    except ConfigError as e:
        logger.error("Invalid configuration", error=str(e))
        print(f"invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG

    report = run(config)
    print_summary(report)
    return EXIT_PASSED if report.status == "passed" else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
