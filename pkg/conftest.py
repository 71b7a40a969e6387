"""
Shared pytest setup: every test runs against default settings with debug
logging off, whatever settings.json holds in the working copy
"""
import pytest

import config as settings_module
from logger import reset_logger


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: desk-scale experiment (minutes); deselect with -m "not slow"')


@pytest.fixture(autouse=True)
def default_settings(tmp_path, monkeypatch):
    monkeypatch.setattr(settings_module, 'SETTINGS_FILE', str(tmp_path / 'settings.json'))
    reset_logger(debug_enabled=False)
    yield
    reset_logger()
