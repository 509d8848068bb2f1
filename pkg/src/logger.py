"""
Logging configuration module
Centralized JSON logging for the library and the command-line front end
"""

import logging
import os
import sys
from pathlib import Path
from typing import IO, Optional

from pythonjsonlogger import jsonlogger


LOG_LEVEL_ENV = "FOLIATION_LOG_LEVEL"
PACKAGE_LOGGER = "src"


class CustomJsonFormatter(jsonlogger.JsonFormatter):
    """JSON formatter that adds level, logger, module and function fields"""

    def add_fields(self, log_record, record, message_dict):
        super(CustomJsonFormatter, self).add_fields(log_record, record, message_dict)
        log_record['level'] = record.levelname
        log_record['logger'] = record.name
        log_record['module'] = record.module
        log_record['function'] = record.funcName


def resolve_log_level(configured: str) -> str:
    """The environment override wins over the configured level"""
    return os.environ.get(LOG_LEVEL_ENV, configured).upper()


def setup_logging(
    log_level: str = "INFO",
    log_file: Optional[str] = None,
    app_name: str = PACKAGE_LOGGER,
    stream: Optional[IO[str]] = None,
) -> logging.Logger:
    """
    Configure logging with a JSON stream handler and optional file output

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional file path for logging
        app_name: Logger to configure; the package logger covers every module
        stream: Stream for the console handler (stderr keeps stdout free for results)

    Returns:
        Configured logger instance
    """
    level = getattr(logging, resolve_log_level(log_level), None)
    if not isinstance(level, int):
        raise ValueError(f"unknown log level: {log_level}")

    logger = logging.getLogger(app_name)
    logger.setLevel(level)
    logger.handlers.clear()
    logger.propagate = False

    console_handler = logging.StreamHandler(stream or sys.stderr)
    formatter = CustomJsonFormatter(
        '%(asctime)s %(levelname)s %(name)s %(message)s',
        rename_fields={'asctime': 'timestamp'}
    )
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance

    Args:
        name: Logger name (typically __name__)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)
