"""
Special functions shared by every probability computation.

Beta and Kolmogorov functions come from scipy.special; the beta quantile is
polished by bracketed Newton steps because the band endpoints feed recursions
whose accuracy hinges on them.
"""
import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy import special

from utils.errors import DomainError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

QUANTILE_RESIDUAL_TOL = 1e-13
NEWTON_STEPS = 6
POLISH_MAX_SIZE = 100_000


@dataclass(frozen=True)
class LogFactorialTable:
    """log(k!) for k = 0..n_max."""

    values: np.ndarray

    @classmethod
    def build(cls, n_max: int) -> "LogFactorialTable":
        if n_max < 0:
            raise DomainError(f"n_max must be >= 0, got {n_max}")
        values = special.gammaln(np.arange(n_max + 1, dtype=np.float64) + 1.0)
        values[0] = 0.0
        values.setflags(write=False)
        return cls(values=values)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k):
        return self.values[k]


@lru_cache(maxsize=16)
def log_factorials(n_max: int) -> LogFactorialTable:
    """Memoized table; tables are immutable so sharing is safe."""
    return LogFactorialTable.build(n_max)


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters; scalars or equal-length arrays (one law per order statistic)."""

    a: ArrayLike
    b: ArrayLike

    def __post_init__(self):
        if np.any(np.asarray(self.a) <= 0) or np.any(np.asarray(self.b) <= 0):
            raise DomainError(f"beta shapes must be positive, got a={self.a}, b={self.b}")


def order_statistic_params(n: int) -> BetaParams:
    """X_(i) of n uniforms is Beta(i, n + 1 - i)."""
    i = np.arange(1, n + 1, dtype=np.float64)
    return BetaParams(a=i, b=n + 1.0 - i)


def log_binomial_pmf(k: int, size: int, p: float) -> float:
    """log P(Binomial(size, p) = k) with 0*log 0 = 0 and -inf for impossible counts."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability outside [0, 1]: {p}")
    if k < 0 or k > size:
        raise DomainError(f"count k={k} outside [0, {size}]")
    if p == 0.0:
        return 0.0 if k == 0 else -math.inf
    if p == 1.0:
        return 0.0 if k == size else -math.inf
    lf = log_factorials(size)
    return float(lf[size] - lf[k] - lf[size - k] + k * math.log(p) + (size - k) * math.log1p(-p))


def _check_unit_interval(x: np.ndarray, what: str):
    if np.any(np.isnan(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError(f"{what} must lie in [0, 1]")


def _as_output(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values) if scalar else values


def beta_cdf(x: ArrayLike, params: BetaParams) -> ArrayLike:
    """Regularized incomplete beta I_x(a, b)."""
    scalar = np.ndim(x) == 0 and np.ndim(params.a) == 0 and np.ndim(params.b) == 0
    x = np.asarray(x, dtype=np.float64)
    _check_unit_interval(x, "x")
    return _as_output(special.betainc(params.a, params.b, x), scalar)


def _beta_logpdf(x: np.ndarray, a, b) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return (a - 1.0) * np.log(x) + (b - 1.0) * np.log1p(-x) - special.betaln(a, b)


def beta_quantile(q: ArrayLike, params: BetaParams, polish: Optional[bool] = None) -> ArrayLike:
    """Inverse of beta_cdf; q = 0 maps to 0 and q = 1 to 1.

    Newton polishing runs by default only up to POLISH_MAX_SIZE points; larger
    grids (asymptotic-path bands) take scipy's betaincinv as is.
    """
    scalar = np.ndim(q) == 0 and np.ndim(params.a) == 0 and np.ndim(params.b) == 0
    q = np.asarray(q, dtype=np.float64)
    _check_unit_interval(q, "q")
    a, b = np.broadcast_arrays(np.asarray(params.a, dtype=np.float64), np.asarray(params.b, dtype=np.float64))
    q, a, b = np.broadcast_arrays(q, a, b)

    x = special.betaincinv(a, b, q)
    if polish is None:
        polish = x.size <= POLISH_MAX_SIZE
    if polish:
        x = _newton_polish(x, q, a, b)

    x = np.where(q == 0.0, 0.0, np.where(q == 1.0, 1.0, x))
    return _as_output(x, scalar)


def _newton_polish(x: np.ndarray, q: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    residual = special.betainc(a, b, x) - q
    for _ in range(NEWTON_STEPS):
        active = np.abs(residual) > QUANTILE_RESIDUAL_TOL
        active &= (q > 0.0) & (q < 1.0)
        if not np.any(active):
            break
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            step = residual / np.exp(_beta_logpdf(x, a, b))
            proposal = x - step
        # stay strictly inside the bracket (0, 1); otherwise keep the current point
        usable = active & np.isfinite(proposal) & (proposal > 0.0) & (proposal < 1.0)
        candidate = np.where(usable, proposal, x)
        cand_residual = special.betainc(a, b, candidate) - q
        better = np.abs(cand_residual) < np.abs(residual)
        x = np.where(better, candidate, x)
        residual = np.where(better, cand_residual, residual)
    return x


def kolmogorov_critical(alpha: float, n: int) -> float:
    """Asymptotic KS half-width d with P(sqrt(n) D_n > sqrt(n) d) = alpha."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return float(special.kolmogi(alpha) / math.sqrt(n))
