"""Gemeinsame Fixtures der Testsuite."""

from __future__ import annotations

import random
import shutil
from pathlib import Path

import pytest

from schubert_tables.config import Settings
from schubert_tables.constants import DATA_DIR
from schubert_tables.fixtures import load_fixtures
from schubert_tables.pipeline import load_case


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def fixture_set(data_dir):
    return load_fixtures(data_dir)


@pytest.fixture(scope="session")
def settings() -> Settings:
    return Settings()


@pytest.fixture(scope="session")
def case_cache(fixture_set, settings):
    """Geladene Fälle, einmal pro Sitzung."""
    cache = {}

    def get(case_id: str):
        if case_id not in cache:
            cache[case_id] = load_case(case_id, fixture_set, settings)
        return cache[case_id]

    return get


@pytest.fixture(scope="session")
def f4_c3(case_cache):
    return case_cache("F4:C3")


@pytest.fixture(scope="session")
def f4_b3(case_cache):
    return case_cache("F4:B3")


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240517)


@pytest.fixture
def data_copy(tmp_path, data_dir) -> Path:
    """Beschreibbare Kopie der ausgelieferten Fixtures."""
    target = tmp_path / "data"
    shutil.copytree(data_dir, target)
    return target
