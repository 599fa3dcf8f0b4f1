"""Command-line interface."""

from .config import RunConfig, parse_config, read_config_file
from .main import build_parser, main

__all__ = ["RunConfig", "build_parser", "main", "parse_config", "read_config_file"]
