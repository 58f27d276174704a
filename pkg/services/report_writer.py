"""Write report.json, table.csv and series.csv."""

from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
import structlog

from schemas.reports import CheckReport

logger = structlog.get_logger(__name__)

FLOAT_FORMAT = "%.16e"


class ReportWriter:
    """Writes one run's outputs into a directory; nothing time-dependent goes in."""

    def __init__(self, output_dir: str):
        self.output_dir = Path(output_dir)

    def _write_csv(self, name: str, rows: List[Dict[str, Any]]) -> Optional[Path]:
        if not rows:
            return None
        path = self.output_dir / name
        pd.DataFrame.from_records(rows).to_csv(path, index=False, float_format=FLOAT_FORMAT)
        return path

    def write(
        self,
        report: CheckReport,
        table_rows: Optional[List[Dict[str, Any]]] = None,
        series_rows: Optional[List[Dict[str, Any]]] = None,
    ) -> Dict[str, Path]:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        written = {}

        report_path = self.output_dir / "report.json"
        report_path.write_text(report.model_dump_json(indent=2) + "\n")
        written["report"] = report_path

        for key, name, rows in (("table", "table.csv", table_rows), ("series", "series.csv", series_rows)):
            path = self._write_csv(name, rows or [])
            if path is not None:
                written[key] = path

        logger.info(
            "Reports written",
            output_dir=str(self.output_dir),
            files=sorted(written),
            status=report.status
        )
        return written
