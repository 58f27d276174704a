"""Base class for verification checks."""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List

import structlog

from core.logging import CheckLogger
from schemas.reports import CheckResult
from schemas.run_config import RunConfig

logger = structlog.get_logger(__name__)


@dataclass
class CheckOutcome:
    """Results plus the rows destined for table.csv and series.csv."""

    results: List[CheckResult]
    table_rows: List[Dict[str, Any]] = field(default_factory=list)
    series_rows: List[Dict[str, Any]] = field(default_factory=list)

    def extend(self, other: "CheckOutcome") -> None:
        self.results.extend(other.results)
        self.table_rows.extend(other.table_rows)
        self.series_rows.extend(other.series_rows)


class BaseCheck(ABC):
    """Base class for all subcommand checks."""

    name: str = "check"

    def __init__(self):
        self.check_logger = CheckLogger(logger)

    @abstractmethod
    def execute(self, config: RunConfig) -> CheckOutcome:
        """Compute every contract of the subcommand."""
        pass

    def run(self, config: RunConfig) -> Dict[str, Any]:
        """Run the check; an exception becomes a failed result instead of propagating."""
        self.check_logger.log_started(self.name, k=config.k)

        try:
            outcome = self.execute(config)
            passed = all(r.passed for r in outcome.results)
            for result in outcome.results:
                self.check_logger.log_result(result.name, result.passed, result.residual)

            return {
                "check": self.name,
                "status": "completed" if passed else "failed",
                "outcome": outcome,
            }

        except Exception as e:
            error_msg = str(e)
            logger.error(
                "Check raised",
                check=self.name,
                error_type=type(e).__name__,
                error=error_msg
            )

            failure = CheckResult(
                name=self.name,
                passed=False,
                residual=None,
                details={"error": error_msg, "error_type": type(e).__name__},
            )
            return {
                "check": self.name,
                "status": "failed",
                "error": error_msg,
                "outcome": CheckOutcome([failure]),
            }
