"""The four classification tasks: all three classes, and each pair of classes."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from app.data.labels import ClassLabel
from app.errors import TaskError


class TaskKind(str, Enum):
    THREE_CLASS = "three_class"
    PAIR = "pair"


@dataclass(frozen=True, slots=True)
class TaskSpec:
    kind: TaskKind
    classes: tuple[ClassLabel, ...]

    def __post_init__(self) -> None:
        if self.kind is TaskKind.PAIR:
            if len(self.classes) != 2 or self.classes[0] is self.classes[1]:
                raise TaskError(f"a pair task needs two distinct classes, got {self.classes}")
            if self.classes[0].index > self.classes[1].index:
                raise TaskError("pair classes must be listed in class order (0, 0.1, 1)")
        elif self.classes != tuple(ClassLabel):
            raise TaskError("the three-class task covers exactly 0, 0.1 and 1")

    @classmethod
    def three_class(cls) -> TaskSpec:
        return cls(TaskKind.THREE_CLASS, tuple(ClassLabel))

    @classmethod
    def pair(cls, a: ClassLabel, b: ClassLabel) -> TaskSpec:
        return cls(TaskKind.PAIR, (ClassLabel(a), ClassLabel(b)))

    @classmethod
    def parse(cls, raw: str) -> TaskSpec:
        """``3class`` or ``<a>-<b>`` / ``<a>_vs_<b>`` such as ``0-0.1``."""

        text = raw.strip().lower()
        if text in {"3class", "3classes", "three_class", "all"}:
            return cls.three_class()
        for separator in ("_vs_", "-", ":"):
            if separator in text:
                left, _, right = text.partition(separator)
                try:
                    return cls.pair(ClassLabel.parse(left), ClassLabel.parse(right))
                except ValueError as exc:
                    raise TaskError(f"unknown task {raw!r}: {exc}") from exc
        raise TaskError(f"unknown task {raw!r}; use 3class, 0-0.1, 0-1 or 0.1-1")

    @property
    def name(self) -> str:
        if self.kind is TaskKind.THREE_CLASS:
            return "3class"
        return f"{self.classes[0].value}_vs_{self.classes[1].value}"

    @property
    def title(self) -> str:
        if self.kind is TaskKind.THREE_CLASS:
            return "3 classes"
        return f"{self.classes[0].value} vs {self.classes[1].value}"

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def includes(self, label: ClassLabel) -> bool:
        return label in self.classes

    def local_index(self, label: ClassLabel) -> int:
        """Position of ``label`` in the task's class list (the model output unit)."""

        try:
            return self.classes.index(label)
        except ValueError as exc:
            raise TaskError(f"class {label.value} is not part of task {self.name}") from exc


THREE_CLASS = TaskSpec.three_class()
PAIR_0_01 = TaskSpec.pair(ClassLabel.C0, ClassLabel.C01)
PAIR_0_1 = TaskSpec.pair(ClassLabel.C0, ClassLabel.C1)
PAIR_01_1 = TaskSpec.pair(ClassLabel.C01, ClassLabel.C1)
ALL_TASKS = (THREE_CLASS, PAIR_0_01, PAIR_0_1, PAIR_01_1)
