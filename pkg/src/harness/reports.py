import csv
import io
import math
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field

from shared.exceptions import DataValidationError
from shared.file_transporter import save_json, save_string_to_file


Z_95 = 1.96

REPORT_FIELDS = (
    'method', 'n_way', 'k_shot', 'episodes', 'mean_accuracy', 'ci95_halfwidth',
    'accuracy_pct', 'ci95_pct', 'seed', 'fingerprint',
)


class EvalReport(BaseModel):
    method: str
    n_way: int
    k_shot: int
    episodes: int = Field(..., ge=0)
    mean_accuracy: float = Field(..., ge=0.0, le=1.0)
    ci95_halfwidth: float = Field(..., ge=0.0)
    seed: int
    fingerprint: str
    wall_time: float | None = None

    def payload(self, with_timing: bool = False) -> dict:
        """Fixed key order and fixed precision so equal runs give equal bytes"""
        data = {
            'method': self.method,
            'n_way': self.n_way,
            'k_shot': self.k_shot,
            'episodes': self.episodes,
            'mean_accuracy': round(self.mean_accuracy, 8),
            'ci95_halfwidth': round(self.ci95_halfwidth, 8),
            'accuracy_pct': f'{100.0 * self.mean_accuracy:.4f}',
            'ci95_pct': f'{100.0 * self.ci95_halfwidth:.4f}',
            'seed': self.seed,
            'fingerprint': self.fingerprint,
        }
        if with_timing and self.wall_time is not None:
            data['wall_time'] = round(self.wall_time, 3)
        return data


def mean_and_ci95(accuracies: np.ndarray) -> tuple[float, float]:
    """Mean and 1.96 * sample std / sqrt(N); the interval is 0 below two episodes."""
    accuracies = np.asarray(accuracies, dtype=np.float64)
    count = accuracies.size
    if count == 0:
        return 0.0, 0.0
    mean = float(accuracies.mean())
    if count < 2:
        return mean, 0.0
    return mean, float(Z_95 * accuracies.std(ddof=1) / math.sqrt(count))


def reports_to_csv(reports: list[EvalReport], with_timing: bool = False) -> str:
    fields = list(REPORT_FIELDS) + (['wall_time'] if with_timing else [])
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(fields)
    for report in reports:
        payload = report.payload(with_timing)
        writer.writerow([payload.get(field, '') for field in fields])
    return buffer.getvalue()


def format_summary(report: EvalReport) -> str:
    return f'{report.method} {report.n_way}-way {report.k_shot}-shot: ' \
           f'{100.0 * report.mean_accuracy:.2f} +- {100.0 * report.ci95_halfwidth:.2f} ({report.episodes} episodes)'


def write_reports(reports: list[EvalReport], path: Path, report_format: str = 'json', with_timing: bool = False) -> None:
    """One report is written as a JSON object, several as a list under "reports"."""
    path = Path(path)
    if report_format == 'csv':
        save_string_to_file(path, reports_to_csv(reports, with_timing))
    elif report_format == 'json':
        payloads = [report.payload(with_timing) for report in reports]
        save_json(path, payloads[0] if len(payloads) == 1 else {'reports': payloads})
    else:
        raise DataValidationError(f'unknown report format: {report_format}', 'format')
