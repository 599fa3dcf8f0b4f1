"""Training loop, cross-validation and topology search."""

from .config import SearchSpace, TrainConfig
from .crossval import CrossValidationResult, cross_validate, cross_validate_async, fold_seed
from .loop import EpochRecord, StopReason, TrainReport, infer_task, train
from .search import MAX_ATTEMPTS, SearchResult, sample_config, topology_search

__all__ = [
    "MAX_ATTEMPTS",
    "CrossValidationResult",
    "EpochRecord",
    "SearchResult",
    "SearchSpace",
    "StopReason",
    "TrainConfig",
    "TrainReport",
    "cross_validate",
    "cross_validate_async",
    "fold_seed",
    "infer_task",
    "sample_config",
    "topology_search",
    "train",
]
