"""Exception hierarchy shared by every package module.

The CLI catches :class:`MtcnError` and prints ``str(exc)`` as a one-line cause,
so messages are written to be actionable on their own.
"""

from __future__ import annotations


class MtcnError(Exception):
    """Base class for all expected failures."""


# tensor-core
class InvalidShapeError(MtcnError, ValueError):
    pass


class InvalidRangeError(MtcnError, ValueError):
    pass


class NumericError(MtcnError, ArithmeticError):
    """Non-finite value where a finite one is required."""


# nn-layers
class ShapeError(MtcnError, ValueError):
    pass


class CacheError(MtcnError, ValueError):
    """Backward pass received a cache that does not belong to its forward call."""


class InvalidRateError(MtcnError, ValueError):
    pass


class LabelError(MtcnError, ValueError):
    pass


# model
class TopologyError(MtcnError, ValueError):
    pass


class InvalidClassesError(MtcnError, ValueError):
    pass


class ModelFileError(MtcnError):
    """Base for model file load failures."""


class BadMagicError(ModelFileError):
    pass


class VersionMismatchError(ModelFileError):
    pass


class TruncatedModelError(ModelFileError):
    pass


class ChecksumError(ModelFileError):
    pass


# data-pipeline
class ImageFormatError(MtcnError, ValueError):
    """Base for graymap parse failures."""


class MagicNumberError(ImageFormatError):
    pass


class HeaderError(ImageFormatError):
    pass


class TruncatedImageError(ImageFormatError):
    pass


class ImageSizeError(MtcnError, ValueError):
    pass


class ManifestError(MtcnError, ValueError):
    pass


class LeakageError(ManifestError):
    """A source image (group) would be visible on both sides of a split."""


class DoubleAugmentationError(MtcnError, ValueError):
    pass


class StratificationError(MtcnError, ValueError):
    pass


class FoldError(MtcnError, ValueError):
    pass


# training
class TrainingConfigError(MtcnError, ValueError):
    pass


class DivergenceError(MtcnError, ArithmeticError):
    pass


class SearchError(MtcnError):
    pass


# evaluation-stats
class TaskError(MtcnError, ValueError):
    pass


class DivisionError(MtcnError, ZeroDivisionError):
    pass


class SheetError(MtcnError, ValueError):
    pass


class DomainError(MtcnError, ValueError):
    pass


# cli
class ConfigParseError(MtcnError, ValueError):
    """Configuration file or flag problem; ``line`` is 1-based when known."""

    def __init__(self, message: str, *, line: int | None = None, source: str | None = None) -> None:
        self.line = line
        self.source = source
        where = ""
        if source is not None and line is not None:
            where = f"{source}:{line}: "
        elif line is not None:
            where = f"line {line}: "
        elif source is not None:
            where = f"{source}: "
        super().__init__(f"{where}{message}")
