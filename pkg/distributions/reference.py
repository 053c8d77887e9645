"""
Reference laws a sample is compared against.

Each law wraps a frozen scipy.stats distribution; quantile, cdf and log-density
come from scipy, which evaluates the normal quantile to full double precision
far into the tails (band endpoints reach probabilities around 1e-8).
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
from scipy import stats

from utils.errors import ConfigError, DomainError

logger = logging.getLogger(__name__)


class Family(str, Enum):
    UNIFORM = "uniform"
    NORMAL = "normal"
    CHI_SQUARE = "chi-square"
    STUDENT_T = "student-t"
    EXPONENTIAL = "exponential"


# parameter names and defaults (the standard member of each family)
FAMILY_PARAMS: Dict[Family, Dict[str, float]] = {
    Family.UNIFORM: {},
    Family.NORMAL: {"mu": 0.0, "sigma": 1.0},
    Family.CHI_SQUARE: {"df": 1.0},
    Family.STUDENT_T: {"df": 1.0},
    Family.EXPONENTIAL: {"rate": 1.0},
}

POSITIVE_PARAMS = ("sigma", "df", "rate")


class Estimation(str, Enum):
    KNOWN = "known-params"
    MEAN_SD = "mean-sd"
    MEDIAN_MAD = "median-mad"
    MEDIAN_QN = "median-qn"
    MEDIAN_SN = "median-sn"
    MLE = "mle"


@dataclass(frozen=True)
class EstimationMethod:
    """How the reference parameters are obtained; known-params carries them."""

    variant: Estimation
    params: Optional[Dict[str, float]] = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Estimation(self.variant))
        if self.variant is Estimation.KNOWN and self.params is None:
            raise ConfigError("known-params estimation needs explicit parameter values")

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"variant": self.variant.value}
        if self.params is not None:
            out["params"] = dict(self.params)
        return out


def parse_family(value) -> Family:
    try:
        return Family(value)
    except ValueError as e:
        names = ", ".join(f.value for f in Family)
        raise ConfigError(f"unknown distribution family '{value}' (expected one of: {names})") from e


@dataclass(frozen=True)
class ReferenceDistribution:
    family: Family
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        family = parse_family(self.family)
        object.__setattr__(self, "family", family)
        expected = FAMILY_PARAMS[family]
        unknown = set(self.params) - set(expected)
        if unknown:
            raise ConfigError(f"{family.value} takes no parameter(s) {sorted(unknown)}")
        merged = {**expected, **{k: float(v) for k, v in self.params.items()}}
        for name in POSITIVE_PARAMS:
            if name in merged and not merged[name] > 0.0:
                raise DomainError(f"{family.value} parameter {name} must be positive, got {merged[name]}")
        object.__setattr__(self, "params", merged)

    @classmethod
    def standard(cls, family) -> "ReferenceDistribution":
        return cls(parse_family(family), {})

    @property
    def law(self):
        p = self.params
        if self.family is Family.UNIFORM:
            return stats.uniform()
        if self.family is Family.NORMAL:
            return stats.norm(loc=p["mu"], scale=p["sigma"])
        if self.family is Family.CHI_SQUARE:
            return stats.chi2(p["df"])
        if self.family is Family.STUDENT_T:
            return stats.t(p["df"])
        return stats.expon(scale=1.0 / p["rate"])

    def quantile(self, q):
        """Inverse cdf; q = 0 and q = 1 map to the support ends (possibly infinite)."""
        return self.law.ppf(q)

    def cdf(self, x):
        return self.law.cdf(x)

    def logpdf(self, x):
        return self.law.logpdf(x)

    def rvs(self, size, rng: np.random.Generator) -> np.ndarray:
        return self.law.rvs(size=size, random_state=rng)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family.value, "params": dict(self.params)}
