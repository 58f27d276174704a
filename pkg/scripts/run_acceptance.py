#!/usr/bin/env python3
"""
Acceptance run.

Runs every subcommand with the acceptance parameters, writes each run's reports
under one directory and prints a pass/fail summary.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from cli.main import VerificationOrchestrator, run  # noqa: E402
from core.logging import setup_logging  # noqa: E402
from schemas.run_config import RunConfig  # noqa: E402

LEVELS = (1, 2, 3)
CURVE_FUNCTIONS = ("x", "y", "x**2", "x**2 + y**2", "x*y")
SIGMA_POINTS = ([0.0, 1.0], [0.3, 1.2])


def symbolic_cases() -> List[Dict[str, Any]]:
    cases = []
    for k in LEVELS:
        cases += [
            {"subcommand": "coeffs", "k": k, "max_order": 20},
            {"subcommand": "verify-recursion", "k": k, "max_order": 6, "random_tables": 3},
            {"subcommand": "verify-trivialisation", "k": k, "max_order": 6},
            {"subcommand": "verify-algebra", "k": k, "max_order": 12, "adiff_order": 8, "samples": 10_000},
        ]
    cases += [
        {"subcommand": "coeffs", "k": 2, "max_order": 12, "diagonal": "random"},
        {"subcommand": "verify-forms", "k": 1, "max_order": 6, "samples": 500},
    ]
    return cases


def numeric_cases() -> List[Dict[str, Any]]:
    cases = []
    for k in (1, 2, 4):
        cases.append({"subcommand": "landau", "experiment": "commutation", "k": k, "N": 50})
    cases.append({"subcommand": "landau", "experiment": "dtdelta", "k": 1, "N": 40})
    cases.append({"subcommand": "landau", "experiment": "dtdelta", "k": 1, "N": 40, "direction": [0.0, 1.0]})
    for sigma in SIGMA_POINTS:
        for f in CURVE_FUNCTIONS:
            cases.append({"subcommand": "landau", "experiment": "first-step", "k": 2, "N": 30, "sigma": sigma, "f": f})
        for f in ("x", "x**2 + y**2"):
            for L in (0, 1, 2):
                cases.append({"subcommand": "landau", "experiment": "decay", "k": 1, "N": 60,
                              "sigma": sigma, "f": f, "max_order": L})
    cases += [
        {"subcommand": "landau", "experiment": "flatness", "k": 1, "N": 40, "s": 5.0, "sigma": [0.3, 1.2]},
        {"subcommand": "landau", "experiment": "trivialisation", "k": 1, "N": 60, "s": 4.0},
        {"subcommand": "verify-trivialisation", "k": 1, "max_order": 4, "numeric": True, "N": 60, "s": 4.0},
        {"subcommand": "landau", "experiment": "obstruction", "k": 1, "N": 40, "s": 3.0, "f": "x"},
        {"subcommand": "landau", "experiment": "symbols", "k": 1, "samples": 100},
        {"subcommand": "landau", "experiment": "spectrum", "k": 2, "N": 20},
    ]
    return cases


class AcceptanceRunner:
    def __init__(self, output_dir: str):
        self.output_dir = Path(output_dir)
        self.orchestrator = VerificationOrchestrator()
        self.results: Dict[str, Any] = {"overall_status": "RUNNING", "symbolic": {}, "numeric": {}}

    def _run_section(self, section: str, cases: List[Dict[str, Any]]) -> None:
        for index, case in enumerate(cases):
            label = f"{index:02d}_{case['subcommand']}_{case.get('experiment', '')}_k{case.get('k', 1)}".rstrip("_")
            config = RunConfig.model_validate({**case, "output_dir": str(self.output_dir / section / label)})
            report = run(config, self.orchestrator)
            failed = [r.name for r in report.failed]
            self.results[section][label] = {"status": "PASS" if not failed else "FAIL", "failed": failed}
            icon = "✅" if not failed else "❌"
            print(f"  {icon} {label}: {'PASS' if not failed else 'FAIL ' + ', '.join(failed)}")

    def run_acceptance(self, numeric: bool = True) -> int:
        print("Starting acceptance run")
        print("=" * 80)
        print("Symbolic checks")
        self._run_section("symbolic", symbolic_cases())
        if numeric:
            print("Numerical checks")
            self._run_section("numeric", numeric_cases())

        statuses = [item["status"] for section in ("symbolic", "numeric") for item in self.results[section].values()]
        self.results["overall_status"] = "PASS" if all(s == "PASS" for s in statuses) else "FAIL"
        print("=" * 80)
        print(f"OVERALL STATUS: {self.results['overall_status']} ({statuses.count('PASS')}/{len(statuses)})")

        self.output_dir.mkdir(parents=True, exist_ok=True)
        summary_path = self.output_dir / "acceptance_results.json"
        summary_path.write_text(json.dumps(self.results, indent=2, sort_keys=True) + "\n")
        print(f"Detailed results saved to: {summary_path}")
        return 0 if self.results["overall_status"] == "PASS" else 1


def main():
    parser = argparse.ArgumentParser(description="Run the acceptance checks")
    parser.add_argument("--output-dir", default="reports/acceptance")
    parser.add_argument("--symbolic-only", action="store_true")
    args = parser.parse_args()

    setup_logging(log_format="console", level="WARNING")
    runner = AcceptanceRunner(args.output_dir)
    sys.exit(runner.run_acceptance(numeric=not args.symbolic_only))


if __name__ == "__main__":
    main()
