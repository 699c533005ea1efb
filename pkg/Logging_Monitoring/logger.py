"""
Logging setup for VoiceGuard
Installs loguru sinks from the logging section of config.yaml
"""

import sys

from loguru import logger

from backend.config import LoggingConfig

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan> | {extra[utterance_id]}{message}"
)


def _utterance_prefix(record) -> None:
    utterance_id = record["extra"].get("utterance_id")
    record["extra"]["utterance_id"] = f"[{utterance_id}] " if utterance_id else ""


def setup_logging(cfg: LoggingConfig = None) -> None:
    """
    Replace loguru's default sink with a stderr sink at the configured level and,
    when logging.file is set, a rotating file sink

    Args:
        cfg: Logging configuration
    """
    cfg = cfg or LoggingConfig()
    level = cfg.level.upper()
    logger.remove()
    logger.configure(patcher=_utterance_prefix)
    logger.add(sys.stderr, level=level, format=LOG_FORMAT)
    if cfg.file:
        logger.add(
            cfg.file,
            level=level,
            format=LOG_FORMAT,
            rotation=cfg.rotation,
            retention=cfg.retention,
            enqueue=True,
        )
    logger.debug(f"Logging configured at {level}" + (f", file {cfg.file}" if cfg.file else ""))
