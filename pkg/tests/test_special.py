"""
Unit tests for special functions.
"""
import math

import numpy as np
import pytest
from scipy import integrate, stats

from numerics.special import (
    BetaParams,
    beta_cdf,
    beta_quantile,
    kolmogorov_critical,
    log_binomial_pmf,
    log_factorials,
    order_statistic_params,
)
from utils.errors import DomainError


def test_log_factorial_table():
    """Table starts at 0 and grows by log(k)."""
    lf = log_factorials(200)
    assert lf[0] == 0.0
    assert lf.n_max == 200
    for k in range(1, 201):
        assert lf[k] - lf[k - 1] == pytest.approx(math.log(k), rel=1e-12)


def test_log_factorial_table_is_read_only():
    """Shared tables cannot be modified."""
    lf = log_factorials(10)
    with pytest.raises(ValueError):
        lf.values[3] = 0.0


def test_log_binomial_pmf_matches_product_form():
    """Log pmf agrees with the direct product."""
    k, size, p = 3, 10, 0.137
    direct = math.comb(size, k) * p ** k * (1 - p) ** (size - k)
    assert math.exp(log_binomial_pmf(k, size, p)) == pytest.approx(direct, rel=1e-12)


def test_log_binomial_pmf_edges():
    """Degenerate probabilities put all mass on one count."""
    assert log_binomial_pmf(0, 5, 0.0) == 0.0
    assert log_binomial_pmf(5, 5, 1.0) == 0.0
    assert log_binomial_pmf(2, 5, 0.0) == -math.inf
    with pytest.raises(DomainError):
        log_binomial_pmf(6, 5, 0.5)
    with pytest.raises(DomainError):
        log_binomial_pmf(1, 5, 1.5)


@pytest.mark.parametrize("size,p", [(1, 0.3), (50, 0.01), (200, 0.5), (200, 0.93)])
def test_log_binomial_pmf_sums_to_one(size, p):
    """Probabilities over all counts sum to one."""
    total = sum(math.exp(log_binomial_pmf(k, size, p)) for k in range(size + 1))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_beta_cdf_known_values():
    """Beta(2, 1) has cdf x^2; Beta(3, 7) matches quadrature of its density."""
    assert beta_cdf(0.25, BetaParams(2.0, 1.0)) == pytest.approx(0.0625, abs=1e-15)
    integral, _ = integrate.quad(lambda t: stats.beta.pdf(t, 3, 7), 0.0, 0.3, epsabs=1e-14)
    assert beta_cdf(0.3, BetaParams(3.0, 7.0)) == pytest.approx(integral, abs=1e-10)


def test_beta_params_validation():
    """Shape parameters must be positive."""
    with pytest.raises(DomainError):
        BetaParams(0.0, 1.0)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 10.0, 100.0])
@pytest.mark.parametrize("b", [0.5, 1.0, 2.0, 10.0, 100.0])
def test_beta_quantile_inverts_cdf(a, b):
    """beta_cdf(beta_quantile(q)) returns q."""
    q = np.array([1e-8, 1e-4, 0.025, 0.3, 0.5, 0.975, 0.9999])
    params = BetaParams(a, b)
    x = beta_quantile(q, params)
    assert np.all(np.diff(x) > 0)
    np.testing.assert_allclose(beta_cdf(x, params), q, rtol=0, atol=1e-10)


def test_beta_quantile_example_and_edges():
    """Round trip at q=0.975 for Beta(3, 8); q=0 and q=1 map to the ends."""
    params = BetaParams(3.0, 8.0)
    x = beta_quantile(0.975, params)
    assert isinstance(x, float)
    assert beta_cdf(x, params) == pytest.approx(0.975, abs=1e-12)
    assert beta_quantile(0.0, params) == 0.0
    assert beta_quantile(1.0, params) == 1.0
    with pytest.raises(DomainError):
        beta_quantile(1.2, params)


def test_order_statistic_medians_are_symmetric():
    """Medians of uniform order statistics mirror around 1/2."""
    n = 9
    medians = beta_quantile(np.full(n, 0.5), order_statistic_params(n))
    np.testing.assert_allclose(medians, 1.0 - medians[::-1], atol=1e-12)
    assert medians[n // 2] == pytest.approx(0.5, abs=1e-12)


def test_kolmogorov_critical():
    """Asymptotic KS half-width at alpha=0.05, n=100 is about 0.13581."""
    assert kolmogorov_critical(0.05, 100) == pytest.approx(0.13581, abs=1e-4)
    assert kolmogorov_critical(0.01, 100) > kolmogorov_critical(0.05, 100)
    with pytest.raises(DomainError):
        kolmogorov_critical(0.0, 100)
    with pytest.raises(DomainError):
        kolmogorov_critical(0.05, 0)
