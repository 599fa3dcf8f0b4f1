"""Prometheus exporter helpers."""

from __future__ import annotations

from pathlib import Path

from prometheus_client import CollectorRegistry, Counter, Gauge, disable_created_metrics, write_to_textfile

from app.config.settings import get_settings

# ``_created`` samples carry wall-clock time; run artifacts must be reproducible.
disable_created_metrics()

registry = CollectorRegistry()

training_epochs_total = Counter(
    "training_epochs_total",
    "Total number of completed training epochs.",
    registry=registry,
)

training_samples_total = Counter(
    "training_samples_total",
    "Total number of samples seen by the optimizer.",
    registry=registry,
)

validation_accuracy_percent = Gauge(
    "validation_accuracy_percent",
    "Best validation accuracy of the last training run, or the mean over cross-validation folds.",
    registry=registry,
)

evaluated_samples_total = Counter(
    "evaluated_samples_total",
    "Number of test samples scored, per classification task.",
    ["task"],
    registry=registry,
)


def export_metrics(path: Path) -> bool:
    """Write the registry to ``path`` unless metrics are disabled in settings."""

    if not get_settings().metrics_enabled:
        return False
    path.parent.mkdir(parents=True, exist_ok=True)
    write_to_textfile(str(path), registry)
    return True
