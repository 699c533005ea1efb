"""
Logging and Monitoring Module for VoiceGuard
Loguru sink setup and the per-utterance report collector
"""

from .logger import setup_logging
from .report_writer import ReportCollector, read_reports

__all__ = [
    'setup_logging',
    'ReportCollector',
    'read_reports',
]
