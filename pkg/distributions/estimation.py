"""
Parameter estimation for the reference law.

Normal parameters can be estimated by a location/scale pair (mean and sd, or
the median with MAD, Q_n or S_n) or by maximum likelihood. The other families
are fitted by maximum likelihood only.
"""
import logging
from typing import Dict, Tuple

import numpy as np
from scipy import optimize, stats

from distributions.reference import (
    Estimation,
    EstimationMethod,
    Family,
    ReferenceDistribution,
    parse_family,
)
from distributions.robust import as_sample, check_positive, robust_scale_mad, robust_scale_qn, robust_scale_sn
from utils.errors import ConfigError, NonConvergenceError, SupportError

logger = logging.getLogger(__name__)

MLE_XTOL = 1e-8
DF_BOUNDS_T = (0.05, 1000.0)

_SCALE_ESTIMATORS = {
    Estimation.MEDIAN_MAD: robust_scale_mad,
    Estimation.MEDIAN_QN: robust_scale_qn,
    Estimation.MEDIAN_SN: robust_scale_sn,
}


def estimate_normal(data, method: EstimationMethod) -> Tuple[float, float]:
    """(mu, sigma) of a normal reference under the given estimation method."""
    x = as_sample(data)
    variant = method.variant
    if variant is Estimation.KNOWN:
        params = ReferenceDistribution(Family.NORMAL, method.params).params
        return params["mu"], params["sigma"]
    if variant is Estimation.MEAN_SD:
        return float(np.mean(x)), check_positive(np.std(x, ddof=1), "sample sd")
    if variant is Estimation.MLE:
        params = mle_fit(x, Family.NORMAL)
        return params["mu"], params["sigma"]
    return float(np.median(x)), _SCALE_ESTIMATORS[variant](x)


def _maximize(negloglik, bounds, what: str) -> float:
    result = optimize.minimize_scalar(negloglik, bounds=bounds, method="bounded", options={"xatol": MLE_XTOL})
    if not result.success:
        raise NonConvergenceError(f"{what} likelihood maximization failed: {result.message}")
    return float(result.x)


def mle_fit(data, family) -> Dict[str, float]:
    """Maximum-likelihood parameters of a family (uniform has none to fit)."""
    family = parse_family(family)
    x = as_sample(data)

    if family is Family.UNIFORM:
        raise ConfigError("the uniform reference has no parameters to fit")
    if family is Family.NORMAL:
        return {"mu": float(np.mean(x)), "sigma": check_positive(np.std(x, ddof=0), "MLE sd")}
    if family is Family.EXPONENTIAL:
        if np.any(x < 0.0):
            raise SupportError("exponential data must be nonnegative")
        return {"rate": 1.0 / check_positive(np.mean(x), "exponential mean")}
    if family is Family.CHI_SQUARE:
        if np.any(x <= 0.0):
            raise SupportError("chi-square data must be positive")
        upper = max(10.0, 10.0 * float(np.mean(x)))
        df = _maximize(lambda df: -np.sum(stats.chi2.logpdf(x, df)), (1e-3, upper), "chi-square df")
        logger.debug(f"chi-square MLE df={df:.6g} on {x.size} points")
        return {"df": df}
    df = _maximize(lambda df: -np.sum(stats.t.logpdf(x, df)), DF_BOUNDS_T, "student-t df")
    logger.debug(f"student-t MLE df={df:.6g} on {x.size} points")
    return {"df": df}


def fit_reference(data, family, method: EstimationMethod) -> ReferenceDistribution:
    """Reference law with parameters known, estimated, or fixed by the family."""
    family = parse_family(family)
    if method.variant is Estimation.KNOWN:
        return ReferenceDistribution(family, method.params)
    if family is Family.UNIFORM:
        return ReferenceDistribution(family, {})
    if family is Family.NORMAL:
        mu, sigma = estimate_normal(data, method)
        return ReferenceDistribution(family, {"mu": mu, "sigma": sigma})
    if method.variant is not Estimation.MLE:
        raise ConfigError(f"{method.variant.value} estimation is defined for the normal family only; use mle")
    return ReferenceDistribution(family, mle_fit(data, family))
