"""
Expected positions of the order statistics on the probability scale.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from numerics.special import BetaParams, beta_quantile, order_statistic_params
from utils.errors import ConfigError, DomainError


class ExpectedMode(str, Enum):
    MEAN_BLOM = "mean-blom"
    MEAN_UNIFORM = "mean-uniform"
    MEDIAN = "median"

    @classmethod
    def parse(cls, value) -> "ExpectedMode":
        try:
            return cls(value)
        except ValueError as e:
            raise ConfigError(f"unknown expected-line mode '{value}'") from e


@dataclass(frozen=True)
class ExpectedPoints:
    mode: ExpectedMode
    values: np.ndarray


def expected_points(n: int, mode=ExpectedMode.MEDIAN) -> ExpectedPoints:
    """Blom plotting positions, uniform order-statistic means, or their medians."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    mode = ExpectedMode.parse(mode)
    i = np.arange(1, n + 1, dtype=float)
    if mode is ExpectedMode.MEAN_BLOM:
        a = 3.0 / 8.0 if n <= 10 else 0.5
        values = (i - a) / (n + 1.0 - 2.0 * a)
    elif mode is ExpectedMode.MEAN_UNIFORM:
        values = i / (n + 1.0)
    else:
        params: BetaParams = order_statistic_params(n)
        values = np.asarray(beta_quantile(np.full(n, 0.5), params), dtype=float)
    return ExpectedPoints(mode=mode, values=values)
