"""
Robust scale estimators consistent for the normal standard deviation.

S_n and Q_n use the small-sample correction factors published with the
estimators for n <= 9 and parity-dependent factors beyond.
"""
import math

import numpy as np
from scipy import stats
from scipy.spatial.distance import pdist

from utils.errors import DegenerateSampleError, DomainError

MAD_CONSTANT = 1.4826
SN_CONSTANT = 1.1926
QN_CONSTANT = 2.2219

# n = 2..9
SN_SMALL_SAMPLE = (0.743, 1.851, 0.954, 1.351, 0.993, 1.198, 1.005, 1.131)
QN_SMALL_SAMPLE = (0.399, 0.994, 0.512, 0.844, 0.611, 0.857, 0.669, 0.872)

# rows of the pairwise-distance matrix handled at once by S_n
_SN_CHUNK = 512


def as_sample(data) -> np.ndarray:
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2:
        raise DomainError(f"scale estimation needs at least 2 observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("sample contains non-finite values")
    return x


def check_positive(scale: float, name: str) -> float:
    if not scale > 0.0:
        raise DegenerateSampleError(f"{name} scale estimate is zero; the sample is (nearly) constant")
    return float(scale)


def sn_correction(n: int) -> float:
    if n <= 9:
        return SN_SMALL_SAMPLE[n - 2]
    return n / (n - 0.9) if n % 2 == 1 else 1.0


def qn_correction(n: int) -> float:
    if n <= 9:
        return QN_SMALL_SAMPLE[n - 2]
    return n / (n + 1.4) if n % 2 == 1 else n / (n + 3.8)


def robust_scale_mad(data) -> float:
    """Median absolute deviation from the median, times 1.4826."""
    x = as_sample(data)
    return check_positive(MAD_CONSTANT * stats.median_abs_deviation(x), "MAD")


def robust_scale_sn(data) -> float:
    """Rousseeuw and Croux's S_n = c_n * 1.1926 * lomed_i himed_j |x_i - x_j|, j = 1..n.

    The inner high median runs over all n distances, the zero self-distance
    included; the correction factors c_n are tabulated for this form. For even
    n it coincides with the variant that skips j = i; for odd n that variant
    takes the next larger distance.
    """
    x = np.sort(as_sample(data))
    n = x.size
    high = n // 2          # 0-based rank of the high median of n values
    low = (n + 1) // 2 - 1  # 0-based rank of the low median
    inner = np.empty(n)
    for start in range(0, n, _SN_CHUNK):
        rows = np.abs(x[start:start + _SN_CHUNK, None] - x[None, :])
        inner[start:start + _SN_CHUNK] = np.partition(rows, high, axis=1)[:, high]
    outer = np.partition(inner, low)[low]
    return check_positive(SN_CONSTANT * sn_correction(n) * outer, "S_n")


def robust_scale_qn(data) -> float:
    """c * k-th smallest pairwise distance, k = C(h, 2), h = n // 2 + 1."""
    x = as_sample(data)
    n = x.size
    h = n // 2 + 1
    k = math.comb(h, 2)
    distances = pdist(x[:, None], "cityblock")
    kth = np.partition(distances, k - 1)[k - 1]
    return check_positive(QN_CONSTANT * qn_correction(n) * kth, "Q_n")
