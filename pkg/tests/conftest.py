"""
Shared fixtures
"""

import logging
import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from config.settings import Settings
from core.samplers import RandomStream


@pytest.fixture
def settings(tmp_path, monkeypatch):
    """Settings isolated from any local .env, writing under tmp_path"""
    for key in list(os.environ):
        if key.startswith('NRZ_'):
            monkeypatch.delenv(key, raising=False)
    return Settings(
        _env_file=None,
        REPORTS_DIR=tmp_path / "reports",
        LOGS_DIR=tmp_path / "logs",
        JOBS=1,
        TRIAL_BLOCK_SIZE=50,
    )


@pytest.fixture
def stream():
    return RandomStream(20240601)


@pytest.fixture(autouse=True)
def _quiet_logging():
    logging.getLogger('Nielsen').setLevel(logging.WARNING)
    yield
