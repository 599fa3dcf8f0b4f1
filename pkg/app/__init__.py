"""mtcn: microtubule image classification with a numpy CNN engine."""

from app.monitoring.logging import configure_logging

__version__ = "0.1.0"

configure_logging()
