"""
Report collector for VoiceGuard
Serializes per-utterance anonymization reports into reports.jsonl in manifest order
"""

import json
from collections import Counter
from pathlib import Path
from typing import Any, Dict, Iterable, List, Union

from loguru import logger

PathLike = Union[str, Path]


class ReportCollector:
    """
    Single writer for per-utterance reports

    Workers return report dictionaries; the collector orders them by the
    manifest and writes one JSON object per line.
    """

    def __init__(self, order: Iterable[str]):
        """
        Initialize collector

        Args:
            order: Utterance ids in manifest order
        """
        self.order = list(order)
        self._reports: Dict[str, Dict[str, Any]] = {}

    def add(self, report: Dict[str, Any]) -> None:
        utterance_id = report['utterance_id']
        if utterance_id in self._reports:
            logger.warning(f"Report for {utterance_id} received twice; keeping the latest")
        self._reports[utterance_id] = report

    def extend(self, reports: Iterable[Dict[str, Any]]) -> None:
        for report in reports:
            self.add(report)

    @property
    def reports(self) -> List[Dict[str, Any]]:
        """Collected reports in manifest order"""
        return [self._reports[u] for u in self.order if u in self._reports]

    @property
    def errors(self) -> List[Dict[str, Any]]:
        return [r for r in self.reports if r.get('status') != 'ok']

    def summary(self) -> Dict[str, Any]:
        """Aggregated failure summary"""
        errors = self.errors
        by_type = Counter(report.get('error_type', 'Unknown') for report in errors)
        return {
            'total': len(self.reports),
            'ok': len(self.reports) - len(errors),
            'errors': len(errors),
            'error_types': dict(sorted(by_type.items())),
        }

    def write(self, path: PathLike) -> Path:
        """Write reports.jsonl (empty file for an empty corpus)"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w') as f:
            for report in self.reports:
                f.write(json.dumps(report, sort_keys=False))
                f.write("\n")
        return path


def read_reports(path: PathLike) -> List[Dict[str, Any]]:
    """Load a reports.jsonl file"""
    with open(path, 'r') as f:
        return [json.loads(line) for line in f if line.strip()]
