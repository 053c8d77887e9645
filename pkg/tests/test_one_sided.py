"""
Unit tests for one-sided ELL bounds, the exact level and the drop-term approximation.
"""
import numpy as np
import pytest

from ell.oracles import multinomial_oracle_one_sided
from ell.one_sided import (
    approximate_one_sided,
    bounds_from_eta_one_sided,
    global_level_one_sided_approx,
    global_level_one_sided_exact,
    reflect_bounds,
    validate_one_sided,
)
from ell.solver import LocalLevelQuery, solve_local_level
from utils.errors import DomainError, InvalidBandError

ETAS = [0.001, 0.01, 0.05, 0.2]


def lower_bounds(n, eta):
    return bounds_from_eta_one_sided(n, eta).h


def relative_excess(h, max_rel_err):
    exact = global_level_one_sided_exact(h)
    approx = global_level_one_sided_approx(h, max_rel_err=max_rel_err)
    return (approx - exact) / exact


def test_single_point_bound_and_level():
    """For one uniform the bound is eta and the level is h_1."""
    assert lower_bounds(1, 0.05)[0] == pytest.approx(0.05, abs=1e-14)
    assert global_level_one_sided_exact([0.03]) == pytest.approx(0.03, abs=1e-14)


def test_two_points_closed_form():
    """Non-exit means X(1) > a and X(2) > b."""
    a, b = 0.1, 0.45
    stay = (1 - b) ** 2 + 2 * (b - a) * (1 - b)
    assert global_level_one_sided_exact([a, b]) == pytest.approx(1 - stay, abs=1e-14)


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("eta", ETAS)
def test_recursion_matches_oracle(n, eta):
    """Exact recursion equals the multinomial sum."""
    h = lower_bounds(n, eta)
    assert global_level_one_sided_exact(h) == pytest.approx(multinomial_oracle_one_sided(h), abs=1e-12)


def test_arbitrary_bounds_match_oracle():
    """Any strictly increasing bounds, not only ELL ones."""
    h = [0.02, 0.05, 0.11, 0.2, 0.33, 0.41, 0.6, 0.72]
    assert global_level_one_sided_exact(h) == pytest.approx(multinomial_oracle_one_sided(h), abs=1e-12)


def test_tiny_error_budget_reproduces_exact_level():
    """With max_rel_err=1e-12 the approximation equals the exact level."""
    h = lower_bounds(500, 2e-4)
    excess = relative_excess(h, 1e-12)
    assert abs(excess) <= 1e-12


@pytest.mark.parametrize("n", [100, 500])
@pytest.mark.parametrize("eta", [1e-4, 1e-3, 1e-2])
@pytest.mark.parametrize("max_rel_err", [1e-2, 1e-4, 1e-6])
def test_approximation_error_is_bounded(n, eta, max_rel_err):
    """0 <= (approx - exact) / exact <= max_rel_err."""
    excess = relative_excess(lower_bounds(n, eta), max_rel_err)
    assert -1e-12 <= excess <= max_rel_err * (1 + 1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("eta", [1e-4, 1e-3, 1e-2])
@pytest.mark.parametrize("max_rel_err", [1e-2, 1e-4, 1e-6])
def test_approximation_error_is_bounded_large_n(eta, max_rel_err):
    """Same bound at n = 2000."""
    excess = relative_excess(lower_bounds(2000, eta), max_rel_err)
    assert -1e-12 <= excess <= max_rel_err * (1 + 1e-9)


@pytest.mark.slow
def test_approximation_at_solved_level():
    """At eta solved for alpha=0.05, n=2000 the excess stays within 1e-4."""
    eta = solve_local_level(LocalLevelQuery(n=2000, alpha=0.05, side="one"))
    assert -1e-12 <= relative_excess(lower_bounds(2000, eta), 1e-4) <= 1e-4 * (1 + 1e-9)


@pytest.mark.slow
def test_approximation_saves_work():
    """At n=5000 dropping terms performs fewer multiply-adds."""
    h = lower_bounds(5000, 1e-5)
    _, exact_steps = global_level_one_sided_exact(h, with_steps=True)
    _, approx_steps = global_level_one_sided_approx(h, max_rel_err=1e-3, with_steps=True)
    assert approx_steps < exact_steps


def test_drop_log():
    """Drop points sit on checkpoints and the skip index grows."""
    h = lower_bounds(800, 1e-3)
    alpha, state = approximate_one_sided(h, first_check=50, check_interval=50, max_rel_err=1e-3)
    assert state.drop_points
    ks = [k for k, _ in state.drop_points]
    ts = [t for _, t in state.drop_points]
    assert all(k >= 50 and k % 50 == 0 for k in ks)
    assert ks == sorted(ks) and ts == sorted(ts)
    assert state.skip == ts[-1]
    assert 0.0 < state.accumul_err_upper_bnd <= 1e-3
    assert alpha >= global_level_one_sided_exact(h)


def test_approximation_argument_checks():
    """Budget and checkpoint settings are validated."""
    h = lower_bounds(60, 1e-3)
    with pytest.raises(DomainError):
        approximate_one_sided(h, max_rel_err=0.0)
    with pytest.raises(DomainError):
        approximate_one_sided(h, first_check=1)
    with pytest.raises(DomainError):
        approximate_one_sided(h, check_interval=0)


def test_validation_errors():
    """Bounds must be nonempty, inside [0, 1] and strictly increasing."""
    with pytest.raises(InvalidBandError):
        validate_one_sided([])
    with pytest.raises(InvalidBandError):
        validate_one_sided([0.2, 0.2])
    with pytest.raises(InvalidBandError):
        validate_one_sided([0.5, 1.2])


def test_reflection():
    """Reflected lower bounds give upper bounds and reflecting twice is the identity."""
    h = lower_bounds(10, 0.01)
    g = reflect_bounds(h)
    np.testing.assert_allclose(g, 1.0 - h[::-1])
    np.testing.assert_allclose(reflect_bounds(g), h)
    assert np.all(np.diff(g) > 0)
