import json
import logging
import os
from datetime import datetime
from typing import Any, Dict, Optional

import pandas as pd

from fairlie.config import ensure_directories, settings
from fairlie.models import ExperimentReport

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6g"


class ReportService:
    """CSV reports: a '#'-prefixed metadata block followed by the data section."""

    def build(
        self,
        command: str,
        data: pd.DataFrame,
        config: Optional[Dict[str, Any]] = None,
        seed: Optional[int] = None,
        solver: Optional[str] = None,
        sampler: Optional[str] = None,
    ) -> ExperimentReport:
        return ExperimentReport(
            command=command,
            config=config or {},
            seed=seed,
            solver=solver,
            sampler=sampler,
            created_at=datetime.now().timestamp(),
            data=data,
        )

    def render(self, report: ExperimentReport) -> str:
        meta = {
            "command": report.command,
            "config": json.dumps(report.config, sort_keys=True, default=str),
            "seed": report.seed,
            "solver": report.solver,
            "sampler": report.sampler,
            "version": report.version,
            "created_at": datetime.fromtimestamp(report.created_at).isoformat(),
        }
        header = "".join(f"# {key}: {value}\n" for key, value in meta.items() if value is not None)
        body = report.data.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return header + body

    def data_section(self, text: str) -> str:
        return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))

    def default_path(self, command: str, seed: Optional[int] = None) -> str:
        ensure_directories()
        suffix = f"-seed{seed}" if seed is not None else ""
        return os.path.join(settings.REPORT_DIR, f"{command}{suffix}.csv")

    def write(self, report: ExperimentReport, path: Optional[str] = None) -> str:
        path = path or self.default_path(report.command, report.seed)
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        try:
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(self.render(report))
        except Exception as e:
            logger.error(f"[Report] Error writing {path}: {e}", exc_info=True)
            raise
        logger.info(f"[Report] Wrote {len(report.data)} rows to {path}")
        return path


report_service = ReportService()
