"""Tests for environment settings, the run log and the metrics file."""

from __future__ import annotations

import logging
from pathlib import Path

import pytest
import pytest_mock

from app.config.settings import get_settings
from app.metrics.prometheus_exporter import export_metrics, training_epochs_total
from app.monitoring.logging import attach_run_log, detach_run_log


def test_settings_read_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("MTCN_SEED", "42")
    monkeypatch.setenv("MTCN_THREADS", "0")
    monkeypatch.setenv("MTCN_METRICS", "off")
    get_settings.cache_clear()

    settings = get_settings()

    assert settings.default_seed == 42
    assert settings.threads == 1
    assert settings.metrics_enabled is False
    assert get_settings() is settings


def test_run_log_mirrors_package_records(tmp_path: Path) -> None:
    handler = attach_run_log(tmp_path / "logs" / "train.log")
    try:
        logging.getLogger("app.training.loop").info("epoch=1 val_acc=50.00")
        logging.getLogger("elsewhere").warning("not ours")
    finally:
        detach_run_log(handler)
    logging.getLogger("app.training.loop").info("after detach")

    text = (tmp_path / "logs" / "train.log").read_text(encoding="utf-8")
    assert "epoch=1 val_acc=50.00" in text
    assert "not ours" not in text
    assert "after detach" not in text


def test_metrics_written_in_text_format(tmp_path: Path) -> None:
    training_epochs_total.inc()
    path = tmp_path / "metrics.prom"

    assert export_metrics(path)
    text = path.read_text(encoding="utf-8")
    assert "training_epochs_total" in text
    assert "_created" not in text


def test_metrics_can_be_disabled(tmp_path: Path, mocker: pytest_mock.MockerFixture) -> None:
    write = mocker.patch("app.metrics.prometheus_exporter.write_to_textfile", autospec=True)
    mocker.patch.dict("os.environ", {"MTCN_METRICS": "0"})
    get_settings.cache_clear()

    assert not export_metrics(tmp_path / "metrics.prom")
    write.assert_not_called()
