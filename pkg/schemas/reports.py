"""Report models written to report.json."""

from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field

from .run_config import RunConfig


class CheckResult(BaseModel):
    """One contract of a subcommand."""

    name: str
    passed: bool
    residual: Optional[Union[float, str]] = None
    threshold: Optional[float] = None
    details: Dict[str, Any] = Field(default_factory=dict)


class CheckReport(BaseModel):
    """Everything one invocation produced, with the config that produced it."""

    config: RunConfig
    results: List[CheckResult]
    status: Literal["passed", "failed"]

    @classmethod
    def from_results(cls, config: RunConfig, results: List[CheckResult]) -> "CheckReport":
        status = "passed" if results and all(r.passed for r in results) else "failed"
        return cls(config=config, results=results, status=status)

    @property
    def failed(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]
