"""Tests for tasks, accuracy, voting, significance and the published-table check."""

from __future__ import annotations

import logging
import runpy
from pathlib import Path

import numpy as np
import pytest

from app.data import ClassLabel, Sample
from app.errors import DivisionError, DomainError, SheetError, TaskError
from app.evaluation import (
    ALL_TASKS,
    PAIR_0_01,
    PAIR_0_1,
    PAIR_01_1,
    THREE_CLASS,
    ConfusionMatrix,
    TaskSpec,
    accuracy,
    accuracy_summary,
    cnn_ts_matrix,
    evaluate,
    expert_summary,
    format_accuracy,
    from_accuracy,
    majority_vote,
    parse_sheets,
    parse_truth,
    read_confusion,
    render_fixtures,
    render_report,
    run_fixtures,
    two_proportion_test,
    voting_matrix,
    write_confusion,
)
from app.model import ConvSpec, DenseSpec, FlattenSpec, Model, ModelConfig, PoolSpec, build_model

C0, C01, C1 = ClassLabel.C0, ClassLabel.C01, ClassLabel.C1

SHEETS = """\
# sample\ttask\trater\tlabel
s1\t3class\tA\t0
s1\t3class\tB\t0
s1\t3class\tC\t1
s2\t3class\tA\t0.1
s2\t3class\tB\t1
s2\t3class\tC\t0
s3\t3class\tA\t1
s3\t3class\tB\t1
s3\t3class\tC\t1
"""

TRUTH = "s1\t0\ns2\t1\ns3\t1\n"


def test_task_parsing_and_names() -> None:
    assert TaskSpec.parse("3class") == THREE_CLASS
    assert TaskSpec.parse("0-0.1") == PAIR_0_01
    assert TaskSpec.parse("0_vs_1") == PAIR_0_1
    assert TaskSpec.parse("0.1:1") == PAIR_01_1
    assert PAIR_0_01.name == "0_vs_0.1"
    assert PAIR_01_1.title == "0.1 vs 1"
    assert THREE_CLASS.num_classes == 3
    assert PAIR_0_1.local_index(C1) == 1

    with pytest.raises(TaskError):
        TaskSpec.parse("1-0")
    with pytest.raises(TaskError):
        TaskSpec.parse("four")
    with pytest.raises(TaskError):
        PAIR_0_1.local_index(C01)


def test_accuracy_examples() -> None:
    assert accuracy(ConfusionMatrix.from_rows(PAIR_0_1, [[50, 0], [0, 50]])) == 100.0
    assert accuracy(ConfusionMatrix.from_rows(PAIR_0_1, [[25, 25], [25, 25]])) == 50.0
    assert format_accuracy(accuracy(ConfusionMatrix.from_rows(THREE_CLASS, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]))) == "100.00"
    assert format_accuracy(200 / 3) == "66.67"

    with pytest.raises(DivisionError):
        accuracy(ConfusionMatrix.empty(PAIR_0_01))


def test_confusion_matrix_validation() -> None:
    with pytest.raises(TaskError):
        ConfusionMatrix.from_rows(PAIR_0_1, [[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    with pytest.raises(TaskError):
        ConfusionMatrix.from_rows(PAIR_0_1, [[1, -1], [0, 1]])


def test_from_labels_counts_predicted_rows_and_true_columns() -> None:
    cm = ConfusionMatrix.from_labels(PAIR_0_1, [C0, C1, C1, C0], [C0, C0, C1, C01])
    np.testing.assert_array_equal(cm.counts, [[1, 0], [1, 1]])
    assert cm.per_class_totals() == {C0: 2, C1: 1}


def test_published_matrices_reproduce_table_accuracies() -> None:
    assert format_accuracy(accuracy(voting_matrix(THREE_CLASS))) == "62.00"
    assert format_accuracy(accuracy(voting_matrix(PAIR_0_01))) == "89.00"
    assert format_accuracy(accuracy(voting_matrix(PAIR_0_1))) == "90.50"
    assert format_accuracy(accuracy(cnn_ts_matrix(THREE_CLASS))) == "66.00"
    assert format_accuracy(accuracy(cnn_ts_matrix(PAIR_0_01))) == "88.50"
    assert format_accuracy(accuracy(cnn_ts_matrix(PAIR_0_1))) == "91.00"
    assert format_accuracy(accuracy(cnn_ts_matrix(PAIR_01_1))) == "70.50"
    for task in ALL_TASKS:
        assert cnn_ts_matrix(task).total == 100 * task.num_classes


def test_fixtures_flag_the_inconsistent_voting_entry(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.WARNING):
        result = run_fixtures()

    [mismatch] = result.discrepancies
    assert mismatch.task == PAIR_01_1
    assert mismatch.column == "voting"
    assert format_accuracy(mismatch.recomputed) == "52.50"
    assert mismatch.published == 51.00
    assert "0.1 vs 1" in caplog.text


def test_fixtures_significance_only_on_hardest_pair() -> None:
    result = run_fixtures()
    verdicts = {sig.task: sig.test.significant() for sig in result.significance}
    assert verdicts == {THREE_CLASS: False, PAIR_0_01: False, PAIR_0_1: False, PAIR_01_1: True}

    text = render_fixtures(result)
    assert "MISMATCH" in text
    assert text.count("significant") == 1


def test_two_proportion_test_reference_value() -> None:
    result = two_proportion_test(104, 200, 141, 200)
    assert result.z == pytest.approx(3.80, abs=0.01)
    assert result.p_value == pytest.approx(1.46e-4, rel=0.02)
    assert result.significant()


def test_two_proportion_test_equal_and_degenerate() -> None:
    same = two_proportion_test(50, 100, 50, 100)
    assert same.z == pytest.approx(0.0)
    assert same.p_value == pytest.approx(1.0)

    assert two_proportion_test(100, 100, 100, 100).p_value == 1.0
    assert two_proportion_test(0, 10, 0, 20).z == 0.0


@pytest.mark.parametrize("args", [(1, 0, 1, 1), (5, 4, 1, 4), (-1, 4, 1, 4)])
def test_two_proportion_test_domain_errors(args: tuple[int, int, int, int]) -> None:
    with pytest.raises(DomainError):
        two_proportion_test(*args)


def test_from_accuracy_recovers_counts() -> None:
    assert from_accuracy(52.0, 200) == 104
    assert from_accuracy(62.67, 300) == 188
    with pytest.raises(DomainError):
        from_accuracy(120.0, 10)


def test_majority_vote_and_tie_break() -> None:
    sheets = parse_sheets(SHEETS)
    assert [sheet.rater_id for sheet in sheets] == ["A", "B", "C"]

    voted = majority_vote(sheets, THREE_CLASS)
    assert voted == {"s1": C0, "s2": C01, "s3": C1}


def test_expert_summary() -> None:
    summary = expert_summary(parse_sheets(SHEETS), parse_truth(TRUTH), THREE_CLASS)
    assert summary.per_rater["B"] == pytest.approx(100.0)
    assert summary.per_rater["A"] == pytest.approx(200 / 3)
    assert summary.best == pytest.approx(100.0)
    assert summary.per_rater["C"] == pytest.approx(100 / 3)
    assert summary.average == pytest.approx((200 / 3 + 100.0 + 100 / 3) / 3)
    assert summary.voting == pytest.approx(200 / 3)
    assert summary.voting_matrix.total == 3


def test_voting_requires_shared_coverage() -> None:
    partial = SHEETS + "s4\t3class\tA\t0\n"
    with pytest.raises(SheetError):
        majority_vote(parse_sheets(partial), THREE_CLASS)
    with pytest.raises(SheetError):
        majority_vote(parse_sheets("s1\t3class\tA\t0\n"), THREE_CLASS)


def test_sheet_errors_name_the_line() -> None:
    with pytest.raises(SheetError, match="r.tsv:1"):
        parse_sheets("s1\t0-1\tA\t0.1\n", source="r.tsv")
    with pytest.raises(SheetError, match="r.tsv:2"):
        parse_sheets("s1\t3class\tA\t0\ns2\t3class\tA\n", source="r.tsv")


def test_report_rendering() -> None:
    cm = cnn_ts_matrix(PAIR_0_1)
    report = render_report([("cnn_ts", cm)])
    assert "91.00" in report
    assert "0 vs 1" in report

    empty = render_report([])
    assert empty.startswith("Classification accuracy")
    assert accuracy_summary([("cnn", cm)]) == "cnn.0_vs_1=91.00\n"


def test_confusion_file_round_trip(tmp_path: Path) -> None:
    cm = cnn_ts_matrix(THREE_CLASS)
    path = tmp_path / "confusion_3class.tsv"
    write_confusion(cm, path)
    assert read_confusion(path) == cm


def _constant_model(winner: int) -> Model:
    config = ModelConfig(
        input_size=8,
        num_classes=3,
        layers=(ConvSpec(filters=1, kernel=(2, 2)), PoolSpec(), FlattenSpec(), DenseSpec(units=3)),
    )
    model = build_model(config)
    for value in model.params.values():
        value[...] = 0.0
    model.params["dense1.bias"][winner] = 1.0
    return model


def test_evaluate_constant_model_matches_class_share() -> None:
    model = _constant_model(winner=1)
    test_set = [
        Sample(image=np.full((8, 8), 10 * i, dtype=np.uint8), label=label, group_id=f"{label.value}-{i}")
        for label, count in ((C0, 2), (C01, 3), (C1, 5))
        for i in range(count)
    ]

    cm = evaluate(model, test_set, THREE_CLASS)
    np.testing.assert_array_equal(cm.counts, [[0, 0, 0], [2, 3, 5], [0, 0, 0]])
    assert accuracy(cm) == pytest.approx(30.0)


def test_evaluate_rejects_model_for_another_task() -> None:
    with pytest.raises(TaskError):
        evaluate(_constant_model(winner=0), [], PAIR_0_1)


def test_check_fixtures_script_lists_every_comparison(capsys: pytest.CaptureFixture[str]) -> None:
    script = Path(__file__).resolve().parents[1] / "scripts" / "check_fixtures.py"
    runpy.run_path(str(script), run_name="__main__")

    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == len(run_fixtures().checks)
    assert sum(line.startswith("⚠️") for line in lines) == 1
