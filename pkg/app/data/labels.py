"""Treatment classes of the microtubule images."""

from __future__ import annotations

from enum import Enum

from app.errors import LabelError


class ClassLabel(str, Enum):
    """Untreated (``0``) and the two paclitaxel concentrations (``0.1``, ``1``)."""

    C0 = "0"
    C01 = "0.1"
    C1 = "1"

    @property
    def index(self) -> int:
        return _ORDER.index(self)

    @classmethod
    def parse(cls, raw: str) -> ClassLabel:
        try:
            return cls(raw.strip())
        except ValueError as exc:
            raise LabelError(f"unknown class label {raw!r}; expected one of 0, 0.1, 1") from exc

    @classmethod
    def from_index(cls, index: int) -> ClassLabel:
        return _ORDER[index]


_ORDER = (ClassLabel.C0, ClassLabel.C01, ClassLabel.C1)

LABEL_MAP_HEADER = "# labels: " + " ".join(f"{label.value}={label.name}" for label in _ORDER)
