"""
One-sided (lower-bound) ELL bands and their global level.

The exact level runs the forward recursion over the n lower bounds. The
approximate level drops leading terms of the probability row at checkpoints
while an accumulated error bound keeps the relative error of the reported
level below max_rel_err. Dropped terms are non-exit probability, so the
approximate level is never below the exact one.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Tuple, Union

import numpy as np

from numerics.kernels import one_sided_noncrossing
from numerics.special import beta_quantile, log_factorials, order_statistic_params
from utils.config import CHECK_INTERVAL, FIRST_CHECK, MAX_REL_ERR
from utils.errors import DomainError, InvalidBandError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OneSidedBounds:
    n: int
    eta: float
    h: np.ndarray


@dataclass
class OneSidedApproxState:
    """Bookkeeping of one approximate run."""

    skip: int = -1
    accumul_err_upper_bnd: float = 0.0
    drop_points: List[Tuple[int, int]] = field(default_factory=list)
    c_row: np.ndarray = field(default_factory=lambda: np.zeros(0))
    steps: int = 0


def bounds_from_eta_one_sided(n: int, eta: float) -> OneSidedBounds:
    """h_i = Beta(i, n+1-i) quantile at eta."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if not 0.0 < eta < 1.0:
        raise DomainError(f"local level must lie in (0, 1), got {eta}")
    h = np.asarray(beta_quantile(np.full(n, eta), order_statistic_params(n)), dtype=float)
    return OneSidedBounds(n=n, eta=eta, h=h)


def validate_one_sided(h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.size == 0:
        raise InvalidBandError("lower bounds must be a nonempty sequence")
    if np.any(h < 0.0) or np.any(h > 1.0):
        raise InvalidBandError("lower bounds must lie in [0, 1]")
    if np.any(np.diff(h) <= 0.0):
        i = int(np.flatnonzero(np.diff(h) <= 0.0)[0])
        raise InvalidBandError(f"lower bounds must increase strictly: h_{i + 1} = {h[i]}, h_{i + 2} = {h[i + 1]}")
    return h


def reflect_bounds(bounds) -> np.ndarray:
    """Map lower bounds for 1 - X to upper bounds for X (and back).

    An upper-only band g has the level of the lower-only band reflect_bounds(g).
    """
    bounds = np.asarray(bounds, dtype=float)
    return 1.0 - bounds[::-1]


def _run(h: np.ndarray, approx: bool, first_check: int, check_interval: int, max_rel_err: float):
    n = h.size
    padded = np.empty(n + 1)
    padded[0] = 0.0
    padded[1:] = h
    return one_sided_noncrossing(
        padded, log_factorials(n).values, n, approx, first_check, check_interval, max_rel_err
    )


def global_level_one_sided_exact(h, with_steps: bool = False) -> Union[float, Tuple[float, int]]:
    """Exact probability that some sorted uniform falls to or below its lower bound."""
    h = validate_one_sided(h)
    stay, steps, *_ = _run(h, False, FIRST_CHECK, CHECK_INTERVAL, MAX_REL_ERR)
    alpha = float(min(max(1.0 - stay, 0.0), 1.0))
    logger.debug(f"one-sided recursion n={h.size}: {steps} steps, alpha={alpha:.6g}")
    return (alpha, steps) if with_steps else alpha


def approximate_one_sided(
    h,
    first_check: int = FIRST_CHECK,
    check_interval: int = CHECK_INTERVAL,
    max_rel_err: float = MAX_REL_ERR,
) -> Tuple[float, OneSidedApproxState]:
    """Approximate level together with the drop log of the run."""
    h = validate_one_sided(h)
    if max_rel_err <= 0.0:
        raise DomainError(f"max_rel_err must be positive, got {max_rel_err}")
    if first_check < 2:
        raise DomainError(f"first_check must be at least 2, got {first_check}")
    if check_interval < 1:
        raise DomainError(f"check_interval must be at least 1, got {check_interval}")

    stay, steps, err, skip, drop_k, drop_t, drops, row = _run(
        h, True, first_check, check_interval, max_rel_err
    )
    state = OneSidedApproxState(
        skip=int(skip),
        accumul_err_upper_bnd=float(err),
        drop_points=[(int(k), int(t)) for k, t in zip(drop_k[:drops], drop_t[:drops])],
        c_row=row,
        steps=int(steps),
    )
    alpha = float(min(max(1.0 - stay, 0.0), 1.0))
    logger.debug(
        f"approximate one-sided recursion n={h.size}: {steps} steps, "
        f"{drops} drop points, skip={skip}, error bound {err:.3g}"
    )
    return alpha, state


def global_level_one_sided_approx(
    h,
    first_check: int = FIRST_CHECK,
    check_interval: int = CHECK_INTERVAL,
    max_rel_err: float = MAX_REL_ERR,
    with_steps: bool = False,
) -> Union[float, Tuple[float, int]]:
    alpha, state = approximate_one_sided(h, first_check, check_interval, max_rel_err)
    return (alpha, state.steps) if with_steps else alpha
