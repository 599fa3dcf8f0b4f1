"""Tasks, confusion matrices, expert voting, significance tests and reports."""

from .confusion import ConfusionMatrix, accuracy, check_model_task, evaluate, format_accuracy
from .fixtures import FixtureResult, cnn_ts_matrix, run_fixtures, voting_matrix
from .report import accuracy_summary, read_confusion, render_fixtures, render_report, write_confusion
from .stats import ProportionTest, from_accuracy, two_proportion_test
from .tasks import ALL_TASKS, PAIR_0_01, PAIR_0_1, PAIR_01_1, THREE_CLASS, TaskKind, TaskSpec
from .voting import ExpertSummary, RaterSheet, expert_summary, majority_vote, parse_sheets, parse_truth, read_sheets

__all__ = [
    "ALL_TASKS",
    "PAIR_01_1",
    "PAIR_0_01",
    "PAIR_0_1",
    "THREE_CLASS",
    "ConfusionMatrix",
    "ExpertSummary",
    "FixtureResult",
    "ProportionTest",
    "RaterSheet",
    "TaskKind",
    "TaskSpec",
    "accuracy",
    "accuracy_summary",
    "check_model_task",
    "cnn_ts_matrix",
    "evaluate",
    "expert_summary",
    "format_accuracy",
    "from_accuracy",
    "majority_vote",
    "parse_sheets",
    "parse_truth",
    "read_confusion",
    "read_sheets",
    "render_fixtures",
    "render_report",
    "run_fixtures",
    "two_proportion_test",
    "voting_matrix",
    "write_confusion",
]
