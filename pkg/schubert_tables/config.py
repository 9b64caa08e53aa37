from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from .constants import (
    APP_DIR,
    CONFIG_FILE,
    DATA_DIR,
    DEFAULT_CACHE_SIZE,
    ENV_PREFIX,
    LOCALIZATION_MODES,
    OUTPUT_FORMATS,
)


LOGGER = logging.getLogger(__name__)


@dataclass
class EngineConfig:
    localization: str = "point"
    cache_size: int = DEFAULT_CACHE_SIZE


@dataclass
class Settings:
    fixtures_dir: str = str(DATA_DIR)
    output_format: str = "text"
    extended: bool = False
    threads: int = 1
    max_degree: Optional[int] = None
    timings: bool = False
    log_level: str = "INFO"
    engine: EngineConfig = field(default_factory=EngineConfig)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "fixtures_dir": self.fixtures_dir,
            "output_format": self.output_format,
            "extended": self.extended,
            "threads": self.threads,
            "max_degree": self.max_degree,
            "timings": self.timings,
            "log_level": self.log_level,
            "engine": vars(self.engine),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Settings":
        engine_cfg = data.get("engine", {})
        return cls(
            fixtures_dir=data.get("fixtures_dir", str(DATA_DIR)),
            output_format=data.get("output_format", "text"),
            extended=data.get("extended", False),
            threads=data.get("threads", 1),
            max_degree=data.get("max_degree"),
            timings=data.get("timings", False),
            log_level=data.get("log_level", "INFO"),
            engine=EngineConfig(**engine_cfg),
        )


def load_settings() -> Settings:
    APP_DIR.mkdir(parents=True, exist_ok=True)
    if CONFIG_FILE.exists():
        try:
            with CONFIG_FILE.open("r", encoding="utf-8") as f:
                data = json.load(f)
            return Settings.from_dict(data)
        except (json.JSONDecodeError, OSError, TypeError) as exc:
            LOGGER.warning("Einstellungen defekt, lade Defaults: %s", exc)
            _backup_corrupt_file(CONFIG_FILE)
    settings = Settings()
    save_settings(settings)
    return settings


def save_settings(settings: Settings) -> None:
    APP_DIR.mkdir(parents=True, exist_ok=True)
    with CONFIG_FILE.open("w", encoding="utf-8") as f:
        json.dump(settings.to_dict(), f, indent=2)


def _backup_corrupt_file(path: Path) -> None:
    if not path.exists():
        return
    try:
        backup_path = path.with_suffix(path.suffix + ".bak")
        counter = 1
        while backup_path.exists():
            backup_path = path.with_suffix(path.suffix + f".bak{counter}")
            counter += 1
        path.rename(backup_path)
        LOGGER.info("Defekte Datei gesichert unter %s", backup_path)
    except OSError as exc:
        LOGGER.warning("Backup fehlgeschlagen für %s: %s", path, exc)


def _parse_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on", "ja"):
        return True
    if value in ("0", "false", "no", "off", "nein", ""):
        return False
    raise ValueError(f"kein Wahrheitswert: {raw!r}")


def _parse_positive(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise ValueError(f"muss positiv sein: {raw!r}")
    return value


def _parse_choice(choices):
    def parse(raw: str) -> str:
        if raw not in choices:
            raise ValueError(f"erlaubt sind {', '.join(choices)}")
        return raw

    return parse


_ENV_FIELDS = {
    "FIXTURES": ("fixtures_dir", str),
    "FORMAT": ("output_format", _parse_choice(OUTPUT_FORMATS)),
    "EXTENDED": ("extended", _parse_bool),
    "THREADS": ("threads", _parse_positive),
    "MAX_DEGREE": ("max_degree", int),
    "TIMINGS": ("timings", _parse_bool),
    "LOG_LEVEL": ("log_level", str.upper),
}

_ENV_ENGINE_FIELDS = {
    "LOCALIZATION": ("localization", _parse_choice(LOCALIZATION_MODES)),
    "CACHE_SIZE": ("cache_size", _parse_positive),
}


def apply_env_overrides(settings: Settings, environ: Optional[Mapping[str, str]] = None) -> Settings:
    """Überschreibt Einstellungen aus SCHUBERT_TABLES_*-Variablen; ungültige Werte werden ignoriert."""

    environ = os.environ if environ is None else environ
    updates: Dict[str, Any] = {}
    engine_updates: Dict[str, Any] = {}
    for table, target in ((_ENV_FIELDS, updates), (_ENV_ENGINE_FIELDS, engine_updates)):
        for suffix, (attr, parse) in table.items():
            name = ENV_PREFIX + suffix
            if name not in environ:
                continue
            try:
                target[attr] = parse(environ[name])
            except ValueError as exc:
                LOGGER.warning("Umgebungsvariable %s ignoriert: %s", name, exc)
    engine = replace(settings.engine, **engine_updates)
    return replace(settings, engine=engine, **updates)
