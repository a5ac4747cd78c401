"""Small numeric helpers: compensated summation and confidence intervals."""

from __future__ import annotations

import math


class KahanSum:
    """Compensated accumulator; keeps absolute error near one ulp of the total."""

    __slots__ = ("total", "_comp")

    def __init__(self) -> None:
        self.total = 0.0
        self._comp = 0.0

    def add(self, x: float) -> None:
        y = x - self._comp
        t = self.total + y
        self._comp = (t - self.total) - y
        self.total = t


def mean_ci(values, z: float = 1.96):
    """Sample mean with a normal-approximation confidence interval."""
    n = len(values)
    if n == 0:
        return None, (None, None)
    mean = sum(values) / n
    if n == 1:
        return mean, (mean, mean)
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    half = z * math.sqrt(var / n)
    return mean, (mean - half, mean + half)


def wilson_ci(successes: int, n: int, z: float = 1.96):
    """Wilson score interval for a binomial proportion."""
    if n == 0:
        return None, (None, None)
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return phat, (max(0.0, center - half), min(1.0, center + half))
