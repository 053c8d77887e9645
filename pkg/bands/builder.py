"""
Band assembly: probability-scale intervals per order statistic, mapped to
the data scale through the reference quantile function.
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from bands.expected import ExpectedMode, expected_points
from distributions.estimation import fit_reference
from distributions.reference import (
    Estimation,
    EstimationMethod,
    Family,
    ReferenceDistribution,
)
from ell.dispatch import resolve_eta
from ell.one_sided import bounds_from_eta_one_sided
from ell.solver import LocalLevelQuery, Policy, Side
from ell.tables import TableStore
from ell.two_sided import bounds_from_eta_two_sided
from numerics.special import beta_quantile, kolmogorov_critical, order_statistic_params
from utils.config import DEFAULT_ESTIMATION
from utils.errors import ConfigError, ConsistencyError, DomainError

logger = logging.getLogger(__name__)


class Method(str, Enum):
    ELL = "ell"
    KS = "ks"
    POINTWISE = "pointwise"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, Method):
            return value
        try:
            return cls(str(value).lower())
        except ValueError as e:
            raise ConfigError(f"unknown band method '{value}' (expected ell, ks or pointwise)") from e


@dataclass(frozen=True)
class TestingBand:
    """One interval per order statistic, on both scales."""

    __test__ = False

    n: int
    alpha: float
    method: Method
    side: Side
    eta: Optional[float]
    prob_lower: np.ndarray
    prob_upper: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    expected_prob: np.ndarray
    expected: np.ndarray
    distribution: ReferenceDistribution
    dparams_source: EstimationMethod
    path: Optional[str] = None
    effective_n: bool = False
    expected_mode: ExpectedMode = ExpectedMode.MEDIAN


@dataclass(frozen=True)
class BandVerdict:
    inside: bool
    index: Optional[int] = None
    direction: Optional[str] = None
    value: Optional[float] = None

    def describe(self) -> str:
        if self.inside:
            return "inside"
        return f"exited at index {self.index} ({self.direction}, value {self.value:.6g})"


def probability_band(
    n: int,
    alpha: float,
    method=Method.ELL,
    side=Side.TWO,
    policy=Policy.AUTO,
    store: Optional[TableStore] = None,
    c_alpha: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray, Optional[float], Optional[str]]:
    """(prob_lower, prob_upper, eta, path) for uniform order statistics."""
    method, side = Method.parse(method), Side.parse(side)
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")

    if method is Method.ELL:
        resolved = resolve_eta(LocalLevelQuery(n=n, alpha=alpha, side=side, policy=policy), store=store, c_alpha=c_alpha)
        if side is Side.TWO:
            bounds = bounds_from_eta_two_sided(n, resolved.eta)
            return bounds.h, bounds.g, resolved.eta, resolved.path
        h = bounds_from_eta_one_sided(n, resolved.eta).h
        return h, np.ones(n), resolved.eta, resolved.path

    if method is Method.KS:
        if side is not Side.TWO:
            raise ConfigError("the KS band is two-sided only")
        d = kolmogorov_critical(alpha, n)
        i = np.arange(1, n + 1, dtype=float)
        return np.clip(i / n - d, 0.0, 1.0), np.clip((i - 1.0) / n + d, 0.0, 1.0), None, None

    params = order_statistic_params(n)
    if side is Side.TWO:
        lower = beta_quantile(np.full(n, alpha / 2.0), params)
        upper = beta_quantile(np.full(n, 1.0 - alpha / 2.0), params)
        return np.asarray(lower, dtype=float), np.asarray(upper, dtype=float), None, None
    return np.asarray(beta_quantile(np.full(n, alpha), params), dtype=float), np.ones(n), None, None


def _reference_for(
    observations: Optional[np.ndarray],
    distribution: Union[ReferenceDistribution, Family, str],
    estimation: EstimationMethod,
) -> Tuple[ReferenceDistribution, EstimationMethod]:
    if isinstance(distribution, ReferenceDistribution):
        known = EstimationMethod(Estimation.KNOWN, distribution.params)
        return distribution, known
    if observations is None or estimation.variant is Estimation.KNOWN:
        reference = (
            ReferenceDistribution(distribution, estimation.params)
            if estimation.variant is Estimation.KNOWN
            else ReferenceDistribution.standard(distribution)
        )
        return reference, EstimationMethod(Estimation.KNOWN, reference.params)
    return fit_reference(observations, distribution, estimation), estimation


def get_qq_band(
    n: Optional[int] = None,
    observations=None,
    distribution: Union[ReferenceDistribution, Family, str] = Family.NORMAL,
    alpha: float = 0.05,
    method=Method.ELL,
    side=Side.TWO,
    estimation: Optional[EstimationMethod] = None,
    expected_mode=ExpectedMode.MEDIAN,
    policy=Policy.AUTO,
    store: Optional[TableStore] = None,
    c_alpha: Optional[float] = None,
) -> TestingBand:
    """Testing band for a Q-Q plot of n points (or of the given observations).

    A ReferenceDistribution is used as is; a family name is fitted to the
    observations with `estimation`, or taken as its standard member when only
    n is given.
    """
    estimation = estimation or EstimationMethod(Estimation(DEFAULT_ESTIMATION))
    x = None
    if observations is not None:
        x = np.asarray(observations, dtype=float).ravel()
        if x.size == 0:
            raise DomainError("observations are empty")
        if n is not None and n != x.size:
            raise ConsistencyError(f"n={n} does not match {x.size} observations")
        n = x.size
    if n is None:
        raise ConfigError("either n or observations is required")

    reference, source = _reference_for(x, distribution, estimation)
    method, side = Method.parse(method), Side.parse(side)
    prob_lower, prob_upper, eta, path = probability_band(n, alpha, method, side, policy, store, c_alpha)
    expected_prob = expected_points(n, expected_mode).values

    band = TestingBand(
        n=n,
        alpha=alpha,
        method=method,
        side=side,
        eta=eta,
        prob_lower=prob_lower,
        prob_upper=prob_upper,
        lower=reference.quantile(prob_lower),
        upper=reference.quantile(prob_upper),
        expected_prob=expected_prob,
        expected=reference.quantile(expected_prob),
        distribution=reference,
        dparams_source=source,
        path=path,
        expected_mode=ExpectedMode.parse(expected_mode),
    )
    logger.debug(f"Built {method.value} {side.value} band: n={n}, alpha={alpha}, eta={eta}, path={path}")
    return band


def get_pp_band(
    n: int,
    alpha: float = 0.05,
    method=Method.ELL,
    side=Side.TWO,
    expected_mode=ExpectedMode.MEDIAN,
    policy=Policy.AUTO,
    store: Optional[TableStore] = None,
) -> TestingBand:
    """P-P band: the uniform-reference Q-Q band on the probability scale."""
    return get_qq_band(
        n=n,
        distribution=ReferenceDistribution(Family.UNIFORM),
        alpha=alpha,
        method=method,
        side=side,
        expected_mode=expected_mode,
        policy=policy,
        store=store,
    )


def pp_values(observations, distribution: Union[ReferenceDistribution, Family, str], estimation: Optional[EstimationMethod] = None):
    """Observations mapped through the (possibly fitted) reference cdf."""
    x = np.asarray(observations, dtype=float).ravel()
    estimation = estimation or EstimationMethod(Estimation(DEFAULT_ESTIMATION))
    reference, _ = _reference_for(x, distribution, estimation)
    return reference.cdf(x), reference


def band_effective_n(
    neff: int,
    distribution: Union[ReferenceDistribution, Family, str] = Family.UNIFORM,
    alpha: float = 0.05,
    method=Method.ELL,
    side=Side.TWO,
    observations=None,
    estimation: Optional[EstimationMethod] = None,
    **kwargs,
) -> TestingBand:
    """Band for neff independent tests; its ranks are decoupled from the data's.

    A family name is fitted to `observations` (all of them, not neff) with
    `estimation`; without observations its standard member is used.
    """
    if neff < 1:
        raise DomainError(f"effective n must be at least 1, got {neff}")
    estimation = estimation or EstimationMethod(Estimation(DEFAULT_ESTIMATION))
    x = None
    if observations is not None:
        x = np.asarray(observations, dtype=float).ravel()
        if x.size == 0:
            raise DomainError("observations are empty")
    reference, source = _reference_for(x, distribution, estimation)
    band = get_qq_band(n=neff, distribution=reference, alpha=alpha, method=method, side=side, **kwargs)
    return replace(band, dparams_source=source, effective_n=True)


def check_intervals(observations, lower, upper) -> BandVerdict:
    """First sorted observation outside its open interval (lower_i, upper_i), if any."""
    x = np.sort(np.asarray(observations, dtype=float).ravel(), kind="stable")
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if not x.size == lower.size == upper.size:
        raise ConsistencyError(f"{x.size} observations against a band for n={lower.size}")
    low = x <= lower
    high = x >= upper
    exits = np.flatnonzero(low | high)
    if exits.size == 0:
        return BandVerdict(inside=True)
    i = int(exits[0])
    return BandVerdict(inside=False, index=i + 1, direction="low" if low[i] else "high", value=float(x[i]))


def band_check(observations, band: TestingBand) -> BandVerdict:
    """Whether the sorted observations stay inside the open intervals of the band."""
    return check_intervals(observations, band.lower, band.upper)
