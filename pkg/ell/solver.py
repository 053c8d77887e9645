"""
Local-level solving: find eta with global level alpha at sample size n.

The global level is increasing in eta and lies between eta and n * eta, so a
bisection on the Bonferroni bracket (alpha / n, alpha) always converges. For
very large n the closed-form asymptotic approximation is used instead.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

from ell.one_sided import (
    bounds_from_eta_one_sided,
    global_level_one_sided_approx,
    global_level_one_sided_exact,
)
from ell.two_sided import bounds_from_eta_two_sided, global_level_two_sided_symmetric
from utils.config import MAX_BISECTIONS, ONE_SIDED_APPROX_FROM, SOLVER_TOL
from utils.errors import ConfigError, DomainError, NonConvergenceError, UnsupportedCombinationError

logger = logging.getLogger(__name__)

# calibrated constants of the asymptotic formula, keyed by alpha
ASYMPTOTIC_CONSTANTS = {0.01: 1.591, 0.05: 1.3, 0.1: 1.1}
ASYMPTOTIC_MIN_N = 100


class Side(str, Enum):
    ONE = "one-sided"
    TWO = "two-sided"

    @classmethod
    def parse(cls, value) -> "Side":
        if isinstance(value, Side):
            return value
        text = str(value).strip().lower()
        aliases = {"one": cls.ONE, "one-sided": cls.ONE, "two": cls.TWO, "two-sided": cls.TWO}
        if text not in aliases:
            raise ConfigError(f"unknown side '{value}', expected one of: one, two")
        return aliases[text]


class Policy(str, Enum):
    EXACT = "exact"
    TABLE = "table"
    ASYMPTOTIC = "asymptotic"
    AUTO = "auto"


class Engine(str, Enum):
    EXACT = "exact"
    APPROX = "approx"


@dataclass(frozen=True)
class LocalLevelQuery:
    n: int
    alpha: float
    side: Side = Side.TWO
    policy: Policy = Policy.AUTO

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        object.__setattr__(self, "side", Side.parse(self.side))
        object.__setattr__(self, "policy", Policy(self.policy))


def default_engine(side: Side, n: int) -> Engine:
    if Side.parse(side) is Side.ONE and n > ONE_SIDED_APPROX_FROM:
        return Engine.APPROX
    return Engine.EXACT


def global_level(n: int, eta: float, side: Side = Side.TWO, engine: Optional[Engine] = None) -> float:
    """Global level of the ELL band with local level eta."""
    side = Side.parse(side)
    engine = Engine(engine) if engine is not None else default_engine(side, n)
    if side is Side.TWO:
        return global_level_two_sided_symmetric(bounds_from_eta_two_sided(n, eta))
    h = bounds_from_eta_one_sided(n, eta).h
    if engine is Engine.APPROX:
        return global_level_one_sided_approx(h)
    return global_level_one_sided_exact(h)


@lru_cache(maxsize=1024)
def _bisect(n: int, alpha: float, side: Side, tol: float, engine: Engine) -> float:
    lo, hi = math.log(alpha / n), math.log(alpha)
    for iteration in range(1, MAX_BISECTIONS + 1):
        mid = 0.5 * (lo + hi)
        eta = math.exp(mid)
        level = global_level(n, eta, side, engine)
        logger.debug(f"bisection {iteration}: eta={eta:.10g} level={level:.10g}")
        if abs(level - alpha) / alpha <= tol:
            logger.debug(f"solved n={n} alpha={alpha} {side.value} in {iteration} steps: eta={eta:.10g}")
            return eta
        if level < alpha:
            lo = mid
        else:
            hi = mid
    raise NonConvergenceError(
        f"bisection for n={n}, alpha={alpha} ({side.value}) did not reach tol={tol} in {MAX_BISECTIONS} steps"
    )


def solve_local_level(query: LocalLevelQuery, tol: float = SOLVER_TOL, engine: Optional[Engine] = None) -> float:
    """eta with |alpha_n(eta) - alpha| / alpha <= tol. Results are memoized."""
    if tol <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if query.n == 1:
        # a single order statistic is uniform, so the global level is eta itself
        return query.alpha
    engine = Engine(engine) if engine is not None else default_engine(query.side, query.n)
    return _bisect(int(query.n), float(query.alpha), query.side, float(tol), engine)


def asymptotic_constant(alpha: float) -> float:
    for key, value in ASYMPTOTIC_CONSTANTS.items():
        if math.isclose(alpha, key, rel_tol=1e-12):
            return value
    supported = ", ".join(f"{key:g}" for key in ASYMPTOTIC_CONSTANTS)
    raise UnsupportedCombinationError(
        f"no calibrated asymptotic constant for alpha={alpha:g} (calibrated: {supported})"
    )


def eta_asymptotic(n: int, alpha: float, c_alpha: Optional[float] = None) -> float:
    """Closed-form two-sided local level for large n."""
    if n < ASYMPTOTIC_MIN_N:
        raise DomainError(f"asymptotic approximation needs n >= {ASYMPTOTIC_MIN_N}, got {n}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    c = asymptotic_constant(alpha) if c_alpha is None else float(c_alpha)
    log_n = math.log(n)
    loglog_n = math.log(log_n)
    return -math.log1p(-alpha) / (2.0 * loglog_n * log_n) * (1.0 - c * math.log(loglog_n) / loglog_n)
