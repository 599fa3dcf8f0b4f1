"""Published confusion matrices and accuracy tables, and their consistency check.

Matrices are ``counts[predicted][true]`` in class order 0, 0.1, 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from app.evaluation.confusion import ConfusionMatrix, accuracy
from app.evaluation.stats import ProportionTest, from_accuracy, two_proportion_test
from app.evaluation.tasks import ALL_TASKS, PAIR_0_01, PAIR_0_1, PAIR_01_1, THREE_CLASS, TaskSpec

logger = logging.getLogger(__name__)

# Majority vote of three experts, 3 classes.
VOTING_THREE_CLASS = ((84, 6, 3), (16, 58, 53), (0, 36, 44))

# Majority vote of three experts, pairs.
VOTING_PAIRS = {
    PAIR_0_01: ((84, 6), (16, 94)),
    PAIR_0_1: ((84, 3), (16, 97)),
    PAIR_01_1: ((75, 70), (25, 30)),
}

# CNN with rotations and sharpening, 3 classes.
CNN_TS_THREE_CLASS = ((87, 27, 19), (10, 58, 28), (3, 15, 53))

# CNN with rotations and sharpening, pairs.
CNN_TS_PAIRS = {
    PAIR_0_01: ((91, 14), (9, 86)),
    PAIR_0_1: ((90, 8), (10, 92)),
    PAIR_01_1: ((71, 30), (29, 70)),
}

# Expert accuracy columns: average, best expert, voting.
EXPERT_TABLE = {
    THREE_CLASS: {"average": 60.88, "best": 62.67, "voting": 62.00},
    PAIR_0_01: {"average": 88.17, "best": 90.50, "voting": 89.00},
    PAIR_0_1: {"average": 89.34, "best": 93.00, "voting": 90.50},
    PAIR_01_1: {"average": 50.17, "best": 52.00, "voting": 51.00},
}

# Best expert, voting, plain CNN, CNN with rotations, CNN with rotations and sharpening.
COMPARISON_TABLE = {
    THREE_CLASS: {"best": 62.67, "voting": 62.00, "cnn": 57.67, "cnn_t": 59.00, "cnn_ts": 66.00},
    PAIR_0_01: {"best": 90.50, "voting": 89.00, "cnn": 79.50, "cnn_t": 84.00, "cnn_ts": 88.50},
    PAIR_0_1: {"best": 93.00, "voting": 90.50, "cnn": 88.00, "cnn_t": 90.50, "cnn_ts": 91.00},
    PAIR_01_1: {"best": 52.00, "voting": 51.00, "cnn": 55.00, "cnn_t": 56.00, "cnn_ts": 70.50},
}

TOLERANCE = 0.005


def voting_matrix(task: TaskSpec) -> ConfusionMatrix:
    rows = VOTING_THREE_CLASS if task == THREE_CLASS else VOTING_PAIRS[task]
    return ConfusionMatrix.from_rows(task, rows)


def cnn_ts_matrix(task: TaskSpec) -> ConfusionMatrix:
    rows = CNN_TS_THREE_CLASS if task == THREE_CLASS else CNN_TS_PAIRS[task]
    return ConfusionMatrix.from_rows(task, rows)


@dataclass(frozen=True, slots=True)
class FixtureCheck:
    task: TaskSpec
    column: str
    recomputed: float
    published: float

    @property
    def matches(self) -> bool:
        return abs(self.recomputed - self.published) < TOLERANCE


@dataclass(frozen=True, slots=True)
class SignificanceCheck:
    task: TaskSpec
    expert: float
    cnn: float
    test: ProportionTest


@dataclass(frozen=True, slots=True)
class FixtureResult:
    checks: tuple[FixtureCheck, ...]
    significance: tuple[SignificanceCheck, ...]

    @property
    def discrepancies(self) -> tuple[FixtureCheck, ...]:
        return tuple(check for check in self.checks if not check.matches)


def run_fixtures() -> FixtureResult:
    """Recompute every accuracy derivable from the published matrices and compare with the tables.

    Also tests the network against the best expert on each task with the
    pooled two-proportion test.
    """

    checks: list[FixtureCheck] = []
    significance: list[SignificanceCheck] = []
    for task in ALL_TASKS:
        voting = accuracy(voting_matrix(task))
        cnn_ts_cm = cnn_ts_matrix(task)
        cnn_ts = accuracy(cnn_ts_cm)
        checks.append(FixtureCheck(task, "voting", voting, EXPERT_TABLE[task]["voting"]))
        checks.append(FixtureCheck(task, "cnn_ts", cnn_ts, COMPARISON_TABLE[task]["cnn_ts"]))

        n = cnn_ts_cm.total
        best = COMPARISON_TABLE[task]["best"]
        test = two_proportion_test(from_accuracy(best, n), n, cnn_ts_cm.trace, n)
        significance.append(SignificanceCheck(task, best, cnn_ts, test))

    result = FixtureResult(checks=tuple(checks), significance=tuple(significance))
    for check in result.discrepancies:
        logger.warning(
            "Published %s accuracy for %s is %.2f but its confusion matrix gives %.2f",
            check.column,
            check.task.title,
            check.published,
            check.recomputed,
        )
    return result
