"""Run configuration: ``key=value`` files overridden by command-line flags."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.config.settings import get_settings
from app.errors import ConfigParseError
from app.evaluation.tasks import TaskSpec
from app.model import ModelConfig, canonical_config
from app.training.config import TrainConfig

CANONICAL = "canonical"


class RunConfig(BaseModel):
    """Everything one subcommand needs; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True, protected_namespaces=())

    train: TrainConfig = Field(default_factory=TrainConfig)
    model: str = CANONICAL
    input_size: int = Field(default=300, ge=1)
    task: str = "3class"
    manifest: Path | None = None
    test_manifest: Path | None = None
    model_path: Path | None = None
    out: Path = Path("runs")
    threads: int = Field(default=1, ge=1)
    folds: int = Field(default=10, ge=2)
    budget: int = Field(default=10, ge=1)
    per_class: int = Field(default=100, ge=1)

    @property
    def seed(self) -> int:
        return self.train.seed

    def task_spec(self) -> TaskSpec:
        return TaskSpec.parse(self.task)

    def model_config_for(self, task: TaskSpec) -> ModelConfig:
        """Canonical topology for the task, or a JSON :class:`ModelConfig` file."""

        if self.model == CANONICAL:
            return canonical_config(task.num_classes, input_size=self.input_size, seed=self.seed)
        path = Path(self.model)
        try:
            config = ModelConfig.model_validate_json(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigParseError(f"cannot read model config {path}: {exc.strerror}") from exc
        except ValidationError as exc:
            raise ConfigParseError(f"invalid model config {path}: {_first_error(exc)}") from exc
        if config.num_classes != task.num_classes:
            raise ConfigParseError(f"model config {path} has {config.num_classes} classes; task {task.name} needs {task.num_classes}")
        return config

    def require(self, *names: str, exists: bool = True) -> None:
        """Fail before any work when a path option is missing or points nowhere."""

        for name in names:
            value = getattr(self, name)
            if value is None:
                raise ConfigParseError(f"{name} is required for this command")
            if exists and not Path(value).exists():
                raise ConfigParseError(f"{name} {value} does not exist")


TRAIN_KEYS = frozenset(TrainConfig.model_fields)
RUN_KEYS = frozenset(RunConfig.model_fields) - {"train"}


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    return f"{error['msg']} (got {error.get('input')!r})"


def _check_value(key: str, value: Any, *, line: int | None, source: str | None) -> None:
    if key in TRAIN_KEYS:
        target: type[BaseModel] = TrainConfig
    elif key in RUN_KEYS:
        target = RunConfig
    else:
        raise ConfigParseError(f"unknown key {key!r}", line=line, source=source)
    try:
        target.model_validate({key: value})
    except ValidationError as exc:
        raise ConfigParseError(f"bad value for {key}: {_first_error(exc)}", line=line, source=source) from exc


def read_config_file(path: Path) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment line."""

    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"cannot read config file: {exc.strerror}", source=str(path)) from exc
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigParseError("expected key=value", line=lineno, source=str(path))
        key, value = (part.strip() for part in stripped.split("=", 1))
        _check_value(key, value, line=lineno, source=str(path))
        values[key] = value
    return values


def parse_config(path: Path | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Settings defaults, then the config file, then flag ``overrides`` (``None`` values are skipped)."""

    settings = get_settings()
    merged: dict[str, Any] = {
        "seed": settings.default_seed,
        "threads": settings.threads,
        "out": settings.output_root,
    }
    if path is not None:
        merged.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        _check_value(key, value, line=None, source=f"--{key.replace('_', '-')}")
        merged[key] = value

    train_values = {key: merged.pop(key) for key in list(merged) if key in TRAIN_KEYS}
    try:
        return RunConfig(train=TrainConfig(**train_values), **merged)
    except ValidationError as exc:
        raise ConfigParseError(f"invalid configuration: {_first_error(exc)}") from exc
