"""Pooled two-proportion z-test for comparing two accuracies."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from statsmodels.stats.proportion import proportions_ztest

from app.errors import DomainError


@dataclass(frozen=True, slots=True)
class ProportionTest:
    z: float
    p_value: float

    def significant(self, alpha: float = 0.01) -> bool:
        return self.p_value < alpha


def two_proportion_test(k1: int, n1: int, k2: int, n2: int) -> ProportionTest:
    """z of ``k2/n2 - k1/n1`` under the pooled proportion, with a two-sided normal p-value."""

    for k, n, which in ((k1, n1, "first"), (k2, n2, "second")):
        if n <= 0:
            raise DomainError(f"{which} group size must be positive, got {n}")
        if not 0 <= k <= n:
            raise DomainError(f"{which} group successes must be in [0, {n}], got {k}")

    pooled = (k1 + k2) / (n1 + n2)
    if pooled in (0.0, 1.0):
        return ProportionTest(z=0.0, p_value=1.0)
    z, p_value = proportions_ztest(
        count=np.array([k2, k1]),
        nobs=np.array([n2, n1]),
        alternative="two-sided",
        prop_var=False,
    )
    z, p_value = float(z), float(p_value)
    if not (math.isfinite(z) and math.isfinite(p_value)):
        raise DomainError(f"test statistic is undefined for ({k1}/{n1}, {k2}/{n2})")
    return ProportionTest(z=z, p_value=p_value)


def from_accuracy(percent: float, n: int) -> int:
    """Success count behind a reported accuracy percentage (``52.0`` of 200 -> 104)."""

    if n <= 0:
        raise DomainError(f"group size must be positive, got {n}")
    count = math.floor(percent * n / 100.0 + 0.5)
    if not 0 <= count <= n:
        raise DomainError(f"accuracy {percent} is outside [0, 100]")
    return count
