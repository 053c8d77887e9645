"""
Two-sided ELL bounds and the exact global level of a two-sided band.

The level comes from a forward recursion over the merged endpoint grid
b_0 < b_1 <= ... <= b_2n < b_{2n+1}: row k holds the probability that the
first k partial counts stayed inside [l_k, u_k] and S_k = j.
"""
import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from numerics.kernels import two_sided_noncrossing, two_sided_noncrossing_half
from numerics.special import beta_quantile, log_factorials, order_statistic_params
from utils.errors import DomainError, InvalidBandError, SymmetryError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class TwoSidedBounds:
    """Probability-scale interval (h_i, g_i) for every order statistic."""

    n: int
    eta: float
    h: np.ndarray
    g: np.ndarray


@dataclass(frozen=True)
class TwoSidedRecursionState:
    """Merged grid and count bounds; index 0 of lower/upper is unused."""

    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    c_row: np.ndarray


def _check_eta(eta: float):
    if not 0.0 < eta < 1.0:
        raise DomainError(f"local level must lie in (0, 1), got {eta}")


def bounds_from_eta_two_sided(n: int, eta: float) -> TwoSidedBounds:
    """h_i = Beta(i, n+1-i) quantile at eta/2, g_i its mirror image."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    _check_eta(eta)
    h = np.asarray(beta_quantile(np.full(n, eta / 2.0), order_statistic_params(n)), dtype=float)
    # g_i = 1 - h_{n+1-i} holds exactly for the Beta(i, n+1-i) family
    g = 1.0 - h[::-1]
    return TwoSidedBounds(n=n, eta=eta, h=h, g=g)


def validate_two_sided(h, g) -> Tuple[np.ndarray, np.ndarray]:
    h = np.asarray(h, dtype=float)
    g = np.asarray(g, dtype=float)
    if h.ndim != 1 or h.shape != g.shape or h.size == 0:
        raise InvalidBandError(f"lower and upper bounds must be nonempty and equally long, got {h.shape} and {g.shape}")
    if np.any(h < 0.0) or np.any(g > 1.0):
        raise InvalidBandError("bounds must lie in [0, 1]")
    bad = np.flatnonzero(h >= g)
    if bad.size:
        i = int(bad[0])
        raise InvalidBandError(f"h_{i + 1} = {h[i]} is not below g_{i + 1} = {g[i]}")
    if np.any(np.diff(h) < 0.0) or np.any(np.diff(g) < 0.0):
        raise InvalidBandError("bound sequences must be nondecreasing in rank")
    return h, g


def merged_grid(h: np.ndarray, g: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sort all 2n endpoints; l_k counts g's among b_1..b_k, u_k counts h's among b_1..b_{k-1}."""
    n = h.size
    values = np.concatenate([h, g])
    is_lower = np.concatenate([np.ones(n, dtype=bool), np.zeros(n, dtype=bool)])
    order = np.argsort(values, kind="stable")

    b = np.empty(2 * n + 2)
    b[0] = 0.0
    b[1:2 * n + 1] = values[order]
    b[2 * n + 1] = 1.0

    from_h = is_lower[order]
    lower = np.zeros(2 * n + 1, dtype=np.int64)
    upper = np.zeros(2 * n + 1, dtype=np.int64)
    lower[1:] = np.cumsum(~from_h)
    upper[2:] = np.cumsum(from_h)[:-1]
    return b, lower, upper


def recursion_state(h, g) -> TwoSidedRecursionState:
    """Run the full recursion and keep its grid and final row."""
    h, g = validate_two_sided(h, g)
    n = h.size
    b, lower, upper = merged_grid(h, g)
    _, _, row = two_sided_noncrossing(b, lower, upper, log_factorials(n).values, n)
    return TwoSidedRecursionState(b=b, lower=lower, upper=upper, c_row=row)


def global_level_two_sided(h, g, with_steps: bool = False) -> Union[float, Tuple[float, int]]:
    """Exact probability that some sorted uniform leaves its interval."""
    h, g = validate_two_sided(h, g)
    n = h.size
    b, lower, upper = merged_grid(h, g)
    stay, steps, _ = two_sided_noncrossing(b, lower, upper, log_factorials(n).values, n)
    alpha = float(min(max(1.0 - stay, 0.0), 1.0))
    logger.debug(f"two-sided recursion n={n}: {steps} steps, alpha={alpha:.6g}")
    return (alpha, steps) if with_steps else alpha


def check_symmetric(h: np.ndarray, g: np.ndarray, tol: float = SYMMETRY_TOL):
    gap = np.abs(g - (1.0 - h[::-1]))
    if gap.size and gap.max() > tol:
        i = int(np.argmax(gap))
        raise SymmetryError(f"g_{i + 1} differs from 1 - h_{h.size - i} by {gap[i]:.3g}")


def global_level_two_sided_symmetric(
    bounds: TwoSidedBounds, with_steps: bool = False
) -> Union[float, Tuple[float, int]]:
    """Same level as global_level_two_sided, from half of the recursion."""
    h, g = validate_two_sided(bounds.h, bounds.g)
    check_symmetric(h, g)
    n = h.size
    if n == 1:
        return global_level_two_sided(h, g, with_steps=with_steps)

    b, lower, upper = merged_grid(h, g)
    stay, steps = two_sided_noncrossing_half(b, lower, upper, log_factorials(n).values, n)
    alpha = float(min(max(1.0 - stay, 0.0), 1.0))
    logger.debug(f"half recursion n={n}: {steps} steps, alpha={alpha:.6g}")
    return (alpha, steps) if with_steps else alpha
