"""
P-values of the chi-square test on random 2x2 tables, for calibration plots.

Tables are drawn under independence with row probability a and column
probability b. A table with an empty row or column is discarded and drawn
again. Two statistics are available:

- independence: Pearson's statistic with expected counts from the table's
  own margins (the usual test of independence, 1 degree of freedom);
- fixed-null: expected counts s * q_ij from the known cell probabilities.

Both are referred to the chi-square distribution with 1 degree of freedom.
"""
import logging
from enum import Enum

import numpy as np
from scipy import stats

from simulation.rng import substream
from utils.errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

MAX_REDRAWS = 10_000


class CalibrationStatistic(str, Enum):
    INDEPENDENCE = "independence"
    FIXED_NULL = "fixed-null"


def cell_probabilities(a: float, b: float) -> np.ndarray:
    return np.array([[a * b, a * (1.0 - b)], [(1.0 - a) * b, (1.0 - a) * (1.0 - b)]])


def _has_empty_margin(table: np.ndarray) -> bool:
    return bool(np.any(table.sum(axis=0) == 0) or np.any(table.sum(axis=1) == 0))


def draw_table(rng: np.random.Generator, s: int, q: np.ndarray) -> np.ndarray:
    for _ in range(MAX_REDRAWS):
        table = rng.multinomial(s, q.ravel()).reshape(2, 2)
        if not _has_empty_margin(table):
            return table
    raise DomainError(f"no table without an empty row or column after {MAX_REDRAWS} draws (s={s})")


def pearson_statistic(table: np.ndarray, q: np.ndarray, statistic: CalibrationStatistic) -> float:
    s = table.sum()
    if statistic is CalibrationStatistic.INDEPENDENCE:
        expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / s
    else:
        expected = s * q
    return float(np.sum((table - expected) ** 2 / expected))


def chisq_calibration_generate(
    s: int,
    a: float = 0.15,
    b: float = 0.4,
    tables: int = 1000,
    seed: int = 0,
    statistic=CalibrationStatistic.INDEPENDENCE,
) -> np.ndarray:
    """One p-value per table; table i uses its own random stream."""
    if s < 2:
        raise ConfigError(f"table sample size must be at least 2, got {s}")
    if not (0.0 < a < 1.0 and 0.0 < b < 1.0):
        raise DomainError(f"row and column probabilities must lie in (0, 1), got a={a}, b={b}")
    if tables < 1:
        raise ConfigError(f"tables must be positive, got {tables}")
    statistic = CalibrationStatistic(statistic)

    q = cell_probabilities(a, b)
    values = np.empty(tables)
    for i in range(tables):
        values[i] = pearson_statistic(draw_table(substream(seed, i), s, q), q, statistic)
    p_values = stats.chi2.sf(values, 1)
    logger.debug(f"Generated {tables} p-values for s={s} ({statistic.value}), min p={p_values.min():.3g}")
    return p_values
