from __future__ import annotations

import logging
import sys

from .cli import run
from .config import apply_env_overrides, load_settings
from .logging_utils import setup_logging


LOGGER = logging.getLogger(__name__)


def main() -> int:
    settings = apply_env_overrides(load_settings())
    setup_logging(getattr(logging, settings.log_level.upper(), logging.INFO))
    return run(sys.argv[1:], settings=settings)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception as exc:
        logging.basicConfig(level=logging.ERROR)
        LOGGER.exception("Fehler im Hauptprogramm: %s", exc)
        sys.exit(1)
