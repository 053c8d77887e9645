"""
Unit tests for the brute-force multinomial oracles.
"""
import pytest

from ell.oracles import MAX_ORACLE_N, multinomial_oracle_one_sided, multinomial_oracle_two_sided
from utils.errors import SizeError


def test_single_point_oracles():
    """One uniform: levels are the excluded lengths."""
    assert multinomial_oracle_two_sided([0.025], [0.975]) == pytest.approx(0.05, abs=1e-14)
    assert multinomial_oracle_one_sided([0.03]) == pytest.approx(0.03, abs=1e-14)


def test_trivial_band_never_exits():
    """A two-sided band with h=0 and g=1 everywhere has level 0."""
    n = 4
    assert multinomial_oracle_two_sided([0.0] * n, [1.0] * n) == pytest.approx(0.0, abs=1e-14)


def test_size_guard():
    """Enumeration is limited to small n."""
    n = MAX_ORACLE_N + 1
    h = [(i + 1) / (2 * n + 2) for i in range(n)]
    g = [0.5 + (i + 1) / (2 * n + 2) for i in range(n)]
    with pytest.raises(SizeError):
        multinomial_oracle_two_sided(h, g)
    with pytest.raises(SizeError):
        multinomial_oracle_one_sided(h)
