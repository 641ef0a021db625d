"""
Logging utilities for Bell Decoherence.
"""

import logging
import os
from typing import Optional

ROOT_LOGGER_NAME = 'BellDecoherence'


def setup_logging(level: str = 'INFO', log_file: Optional[str] = None) -> logging.Logger:
    """Set up logging configuration for the command-line runner."""
    handlers = [logging.StreamHandler()]  # stderr, keeps stdout free for CSV

    if log_file is not None:
        log_dir = os.path.dirname(os.path.abspath(log_file))
        os.makedirs(log_dir, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers
    )

    logger = logging.getLogger(ROOT_LOGGER_NAME)
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    logger.debug(f"Logging initialized - Level: {level}, File: {log_file}")

    return logger


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance for a specific module."""
    return logging.getLogger(f'{ROOT_LOGGER_NAME}.{name.rsplit(".", 1)[-1]}')
