"""Shared pytest configuration."""

from __future__ import annotations

from typing import Iterator

import pytest

from app.config.settings import get_settings


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption("--runslow", action="store_true", default=False, help="run long end-to-end training checks")


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: long-running learning checks (enable with --runslow)")


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def _isolated_settings(monkeypatch: pytest.MonkeyPatch) -> Iterator[None]:
    monkeypatch.delenv("MTCN_SEED", raising=False)
    monkeypatch.delenv("MTCN_THREADS", raising=False)
    monkeypatch.delenv("MTCN_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("MTCN_METRICS", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
