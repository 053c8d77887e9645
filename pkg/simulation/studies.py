"""
Type 1 error and power of testing bands for normality.

Bands depend on (n, alpha) only through their probability-scale endpoints,
so each study solves the band once and checks every replicate by mapping
the sample through the fitted normal cdf.
"""
import logging
import math
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, Field
from scipy import stats

from bands.builder import Method, probability_band
from distributions.estimation import estimate_normal
from distributions.reference import Estimation, EstimationMethod
from ell.solver import Policy, Side
from ell.tables import TableStore
from simulation.runner import ReplicateRunner
from utils.config import DEFAULT_ESTIMATION
from utils.errors import ConfigError, DegenerateSampleError

logger = logging.getLogger(__name__)

MIN_TYPE1_REPLICATES = 100


class SimReport(BaseModel):
    """Rejection frequency of one simulated scenario."""

    scenario: str
    replicates: int
    rejections: int
    rejection_rate: float
    standard_error: float
    seed: int
    degenerate: int = 0
    config: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_counts(cls, scenario: str, rejections: int, replicates: int, seed: int, degenerate: int = 0, **config) -> "SimReport":
        rate = rejections / replicates
        return cls(
            scenario=scenario,
            replicates=replicates,
            rejections=rejections,
            rejection_rate=rate,
            standard_error=math.sqrt(rate * (1.0 - rate) / replicates),
            seed=seed,
            degenerate=degenerate,
            config=config,
        )


class PowerComparison(BaseModel):
    """ELL and KS run on the same samples, with an exact test on discordant pairs."""

    ell: SimReport
    ks: SimReport
    ell_only: int
    ks_only: int
    p_value: float


def exits(u_sorted: np.ndarray, prob_lower: np.ndarray, prob_upper: np.ndarray) -> bool:
    return bool(np.any((u_sorted <= prob_lower) | (u_sorted >= prob_upper)))


def _standardized(sample: np.ndarray, estimator: EstimationMethod) -> Optional[np.ndarray]:
    """Sorted fitted-cdf values, or None when the scale estimate degenerates."""
    try:
        mu, sigma = estimate_normal(sample, estimator)
    except DegenerateSampleError:
        return None
    return np.sort(stats.norm.cdf((sample - mu) / sigma))


def _default_estimator(estimator: Optional[EstimationMethod]) -> EstimationMethod:
    return estimator or EstimationMethod(Estimation(DEFAULT_ESTIMATION))


def type1_study(
    n: int,
    estimator: Optional[EstimationMethod] = None,
    alpha: float = 0.05,
    replicates: int = 10_000,
    seed: int = 0,
    max_workers: Optional[int] = None,
    store: Optional[TableStore] = None,
) -> SimReport:
    """Fraction of standard-normal samples whose ELL band check rejects.

    A sample with a zero scale estimate counts as a rejection and is also
    reported in `degenerate`.
    """
    estimator = _default_estimator(estimator)
    if replicates < MIN_TYPE1_REPLICATES:
        raise ConfigError(f"type 1 studies need at least {MIN_TYPE1_REPLICATES} replicates, got {replicates}")
    lower, upper, eta, path = probability_band(n, alpha, Method.ELL, Side.TWO, Policy.AUTO, store)

    def replicate(index: int, rng: np.random.Generator):
        u = _standardized(rng.standard_normal(n), estimator)
        if u is None:
            return True, True
        return exits(u, lower, upper), False

    outcomes = ReplicateRunner(max_workers).run(replicate, replicates, seed, label=f"type 1 study n={n}")
    rejections = sum(rejected for rejected, _ in outcomes)
    degenerate = sum(bad for _, bad in outcomes)
    report = SimReport.from_counts(
        f"type1-n{n}-{estimator.variant.value}",
        rejections,
        replicates,
        seed,
        degenerate,
        n=n,
        alpha=alpha,
        estimator=estimator.to_dict(),
        eta=eta,
        eta_path=path,
    )
    logger.info(f"Type 1 error n={n} {estimator.variant.value}: {report.rejection_rate:.4f} ({report.standard_error:.4f})")
    return report


def _draw(rng: np.random.Generator, n: int, alt_df: Optional[float]) -> np.ndarray:
    if alt_df is None:
        return rng.standard_normal(n)
    return rng.standard_t(alt_df, size=n)


def _power_outcomes(n, alpha, alt_df, replicates, seed, estimator, max_workers, store):
    if replicates < 1:
        raise ConfigError(f"replicates must be positive, got {replicates}")
    if alt_df is not None and not alt_df > 0:
        raise ConfigError(f"alternative df must be positive, got {alt_df}")
    ell = probability_band(n, alpha, Method.ELL, Side.TWO, Policy.AUTO, store)
    ks = probability_band(n, alpha, Method.KS, Side.TWO)

    def replicate(index: int, rng: np.random.Generator):
        u = _standardized(_draw(rng, n, alt_df), estimator)
        if u is None:
            return True, True, True
        return exits(u, ell[0], ell[1]), exits(u, ks[0], ks[1]), False

    alt = "normal" if alt_df is None else f"t({alt_df:g})"
    return ReplicateRunner(max_workers).run(replicate, replicates, seed, label=f"power study {alt} n={n}"), alt


def power_study(
    null_band_method=Method.ELL,
    alt_df: Optional[float] = 3.0,
    n: int = 100,
    alpha: float = 0.05,
    replicates: int = 1000,
    seed: int = 0,
    estimator: Optional[EstimationMethod] = None,
    max_workers: Optional[int] = None,
    store: Optional[TableStore] = None,
) -> SimReport:
    """Rejection rate of one band method against t(alt_df) data (normal data when alt_df is None)."""
    method = Method.parse(null_band_method)
    if method is Method.POINTWISE:
        raise ConfigError("power studies compare the ell and ks bands")
    estimator = _default_estimator(estimator)
    outcomes, alt = _power_outcomes(n, alpha, alt_df, replicates, seed, estimator, max_workers, store)
    column = 0 if method is Method.ELL else 1
    return SimReport.from_counts(
        f"power-{method.value}-{alt}-n{n}",
        sum(o[column] for o in outcomes),
        replicates,
        seed,
        sum(o[2] for o in outcomes),
        n=n,
        alpha=alpha,
        method=method.value,
        alternative=alt,
        estimator=estimator.to_dict(),
    )


def power_comparison(
    alt_df: Optional[float] = 3.0,
    n: int = 100,
    alpha: float = 0.05,
    replicates: int = 1000,
    seed: int = 0,
    estimator: Optional[EstimationMethod] = None,
    max_workers: Optional[int] = None,
    store: Optional[TableStore] = None,
) -> PowerComparison:
    """Paired ELL-vs-KS power with a one-sided binomial test of ELL > KS."""
    estimator = _default_estimator(estimator)
    outcomes, alt = _power_outcomes(n, alpha, alt_df, replicates, seed, estimator, max_workers, store)
    degenerate = sum(o[2] for o in outcomes)
    config = dict(n=n, alpha=alpha, alternative=alt, estimator=estimator.to_dict())
    ell = SimReport.from_counts(f"power-ell-{alt}-n{n}", sum(o[0] for o in outcomes), replicates, seed, degenerate, method="ell", **config)
    ks = SimReport.from_counts(f"power-ks-{alt}-n{n}", sum(o[1] for o in outcomes), replicates, seed, degenerate, method="ks", **config)
    ell_only = sum(1 for o in outcomes if o[0] and not o[1])
    ks_only = sum(1 for o in outcomes if o[1] and not o[0])
    discordant = ell_only + ks_only
    p_value = stats.binomtest(ell_only, discordant, 0.5, alternative="greater").pvalue if discordant else 1.0
    logger.info(
        f"Power against {alt}, n={n}: ELL {ell.rejection_rate:.3f}, KS {ks.rejection_rate:.3f}, "
        f"discordant {ell_only}/{ks_only}, p={p_value:.3g}"
    )
    return PowerComparison(ell=ell, ks=ks, ell_only=ell_only, ks_only=ks_only, p_value=float(p_value))
