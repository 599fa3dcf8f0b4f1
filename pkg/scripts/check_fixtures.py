"""Recompute the published accuracy tables from their confusion matrices."""

from __future__ import annotations

from typing import Iterable

from app.evaluation import format_accuracy, run_fixtures
from app.evaluation.fixtures import FixtureCheck


def _format_result(check: FixtureCheck) -> str:
    status = "✅" if check.matches else "⚠️"
    return (
        f"{status} {check.column} {check.task.title}: "
        f"{format_accuracy(check.recomputed)} (published {format_accuracy(check.published)})"
    )


def print_results(checks: Iterable[FixtureCheck]) -> None:
    for check in checks:
        print(_format_result(check))


def main() -> None:
    result = run_fixtures()
    print_results(result.checks)


if __name__ == "__main__":
    main()
