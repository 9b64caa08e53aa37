from __future__ import annotations

import logging
from logging.handlers import RotatingFileHandler

from .constants import LOG_DIR


def setup_logging(level: int = logging.INFO, log_to_file: bool = True) -> None:
    formatter = logging.Formatter(
        "%(asctime)s [%(levelname)s] %(name)s: %(message)s", "%Y-%m-%d %H:%M:%S"
    )

    handlers = []
    if log_to_file:
        try:
            LOG_DIR.mkdir(parents=True, exist_ok=True)
            file_handler = RotatingFileHandler(
                LOG_DIR / "schubert_tables.log", maxBytes=2_000_000, backupCount=3
            )
            file_handler.setFormatter(formatter)
            handlers.append(file_handler)
        except OSError as exc:
            logging.getLogger(__name__).warning("Log-Datei nicht verfügbar: %s", exc)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    handlers.append(console_handler)

    logging.basicConfig(level=level, handlers=handlers)
