"""
Unit tests for choosing how a local level is obtained.
"""
import time

import pytest

import ellband
from ell.dispatch import resolve_eta
from ell.solver import LocalLevelQuery, Side, global_level, solve_local_level
from ell.tables import TableStore, table_build
from utils.errors import TableError, UnsupportedCombinationError


def empty_store(tmp_path):
    return TableStore(tmp_path)


def query(n, alpha=0.05, side="two", policy="auto"):
    return LocalLevelQuery(n=n, alpha=alpha, side=side, policy=policy)


def test_auto_solves_small_n_exactly(tmp_path):
    """Without a table, small n goes to the exact solver."""
    resolved = resolve_eta(query(50), store=empty_store(tmp_path))
    assert resolved.path == "exact"
    assert resolved.eta == solve_local_level(query(50))


def test_auto_prefers_table(tmp_path):
    """A covering table wins and stays within 1% of alpha."""
    store = empty_store(tmp_path)
    store.add(table_build(0.05, Side.TWO, [400, 500, 600], tol=1e-6))
    resolved = resolve_eta(query(500), store=store)
    assert resolved.path == "table"
    assert global_level(500, resolved.eta, Side.TWO) == pytest.approx(0.05, rel=0.01)


def test_auto_uses_asymptotic_for_huge_n(tmp_path):
    """n = 10^6 at alpha = 0.05 resolves through the closed form in under a second."""
    started = time.perf_counter()
    resolved = resolve_eta(query(10 ** 6), store=empty_store(tmp_path))
    assert time.perf_counter() - started < 1.0
    assert resolved.path == "asymptotic"
    assert 0.05 / 10 ** 6 < resolved.eta < 0.05


def test_million_point_band_command_is_fast(tmp_path):
    """The band command for n = 10^6 finishes within seconds, JSON written included."""
    out_path = tmp_path / "band.json"
    argv = ["band", "--n", "1000000", "--alpha", "0.05", "--table-dir", str(tmp_path), "--output", str(out_path)]
    started = time.perf_counter()
    code = ellband.main(argv)
    elapsed = time.perf_counter() - started
    assert code == 0
    assert elapsed < 10.0
    text = out_path.read_text()
    assert "\n" not in text.rstrip("\n")
    assert text.rstrip().endswith('"generated_by_path":"asymptotic"}')


def test_exact_cap_switches_to_asymptotic(tmp_path):
    """Above the exact-solve cap the formula takes over."""
    resolved = resolve_eta(query(150), store=empty_store(tmp_path), exact_n_cap=100)
    assert resolved.path == "asymptotic"


def test_unsupported_combination(tmp_path):
    """No table, too large for exact, no constant: the error says what to do."""
    with pytest.raises(UnsupportedCombinationError, match="build a table"):
        resolve_eta(query(10 ** 7, alpha=0.037), store=empty_store(tmp_path))


def test_one_sided_has_no_asymptotic_path(tmp_path):
    """The closed form is two-sided only."""
    with pytest.raises(UnsupportedCombinationError):
        resolve_eta(query(10 ** 6, side="one", policy="asymptotic"), store=empty_store(tmp_path))
    with pytest.raises(UnsupportedCombinationError):
        resolve_eta(query(10 ** 6, side="one"), store=empty_store(tmp_path))


def test_table_policy_requires_table(tmp_path):
    """Policy table fails when nothing covers n."""
    with pytest.raises(TableError):
        resolve_eta(query(100, policy="table"), store=empty_store(tmp_path))


def test_explicit_constant_enables_asymptotic(tmp_path):
    """A user constant covers alphas without a calibrated one."""
    resolved = resolve_eta(query(10 ** 7, alpha=0.037), store=empty_store(tmp_path), c_alpha=1.3)
    assert resolved.path == "asymptotic"


@pytest.mark.slow
def test_table_and_asymptotic_agree_at_boundary(tmp_path):
    """At n = 20000 the exact eta and the closed form agree within 2%."""
    exact = resolve_eta(query(20000, policy="exact"), store=empty_store(tmp_path))
    approx = resolve_eta(query(20000, policy="asymptotic"), store=empty_store(tmp_path))
    assert approx.eta == pytest.approx(exact.eta, rel=0.02)
