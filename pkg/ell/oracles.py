"""
Brute-force global levels by summing multinomial cell probabilities.

Both oracles enumerate every vector of bin counts whose partial sums respect
the band and add up the multinomial probabilities. They exist to check the
recursions and are limited to n <= 8.
"""
import math
from typing import Sequence

import numpy as np

from ell.one_sided import validate_one_sided
from ell.two_sided import merged_grid, validate_two_sided
from utils.errors import SizeError

MAX_ORACLE_N = 8


def _check_size(n: int):
    if n > MAX_ORACLE_N:
        raise SizeError(f"multinomial oracle is limited to n <= {MAX_ORACLE_N}, got n = {n}")


def _noncrossing_mass(widths: Sequence[float], lower: Sequence[int], upper: Sequence[int], n: int) -> float:
    """Sum of n!/prod(m_j!) prod(w_j^m_j) over counts with lower[k] <= S_k <= upper[k].

    widths has one entry per bin; lower/upper constrain the partial sum after
    bin k (0-based) for every bin but the last, which takes the remainder.
    """
    bins = len(widths)
    total = 0.0

    def visit(k: int, used: int, weight: float):
        nonlocal total
        if k == bins - 1:
            rest = n - used
            total += weight * widths[k] ** rest / math.factorial(rest)
            return
        for m in range(0, n - used + 1):
            s = used + m
            if s < lower[k]:
                continue
            if s > upper[k]:
                break
            visit(k + 1, s, weight * widths[k] ** m / math.factorial(m))

    visit(0, 0, 1.0)
    return math.factorial(n) * total


def multinomial_oracle_two_sided(h, g) -> float:
    h, g = validate_two_sided(h, g)
    n = h.size
    _check_size(n)
    b, lower, upper = merged_grid(h, g)
    widths = np.diff(b).tolist()
    # partial sums after bins 1..2n are S_1..S_2n
    return 1.0 - _noncrossing_mass(widths, lower[1:].tolist(), upper[1:].tolist(), n)


def multinomial_oracle_one_sided(h) -> float:
    h = validate_one_sided(h)
    n = h.size
    _check_size(n)
    edges = np.concatenate([[0.0], h, [1.0]])
    widths = np.diff(edges).tolist()
    lower = [0] * n
    upper = list(range(n))
    return 1.0 - _noncrossing_mass(widths, lower, upper, n)
