"""Environment-driven settings."""
from __future__ import annotations

from pathlib import Path

import pytest

from app.settings import get_settings

ENV_NAMES = (
    "LSQSUBDIV_SEED",
    "LSQSUBDIV_OUTPUT_DIR",
    "LSQSUBDIV_LOG_LEVEL",
    "LSQSUBDIV_DEFAULT_K",
    "LSQSUBDIV_REGULARITY_ITERATIONS",
)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ENV_NAMES:
        monkeypatch.delenv(name, raising=False)


def test_defaults():
    settings = get_settings()
    assert settings.seed_override is None
    assert settings.output_dir == Path("results")
    assert settings.log_level == "INFO"
    assert (settings.default_K, settings.regularity_iterations) == (10, 16)


def test_overrides(monkeypatch):
    monkeypatch.setenv("LSQSUBDIV_SEED", "123")
    monkeypatch.setenv("LSQSUBDIV_OUTPUT_DIR", "/tmp/out")
    monkeypatch.setenv("LSQSUBDIV_LOG_LEVEL", "debug")
    monkeypatch.setenv("LSQSUBDIV_DEFAULT_K", "12")
    settings = get_settings()
    assert settings.seed_override == 123
    assert settings.output_dir == Path("/tmp/out")
    assert settings.log_level == "DEBUG"
    assert settings.default_K == 12


def test_blank_means_default(monkeypatch):
    monkeypatch.setenv("LSQSUBDIV_SEED", "  ")
    assert get_settings().seed_override is None


def test_bad_integer_names_the_variable(monkeypatch):
    monkeypatch.setenv("LSQSUBDIV_REGULARITY_ITERATIONS", "many")
    with pytest.raises(ValueError, match="LSQSUBDIV_REGULARITY_ITERATIONS"):
        get_settings()
