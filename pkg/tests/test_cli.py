"""
Tests for the command-line interface.
"""
import json

import numpy as np
import pytest
from scipy import stats

import ellband
from data.loader import write_values
from distributions.robust import robust_scale_mad, robust_scale_qn, robust_scale_sn
from ell.solver import LocalLevelQuery, solve_local_level
from ell.tables import dump_table, read_table
from ell.two_sided import bounds_from_eta_two_sided


def run(capsys, *argv):
    code = ellband.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_band_json(capsys):
    """Uniform ELL band for n=100 reports eta inside the Bonferroni bracket."""
    code, out = run(capsys, "band", "--n", "100", "--alpha", "0.05", "--dist", "uniform", "--method", "ell")
    assert code == 0
    doc = json.loads(out)
    assert 0.0005 < doc["eta"] < 0.05
    assert doc["n"] == 100 and len(doc["lower"]) == 100


def test_band_single_point(capsys):
    """n=1 uniform band is (0.025, 0.975)."""
    code, out = run(capsys, "band", "--n", "1", "--alpha", "0.05", "--dist", "uniform")
    doc = json.loads(out)
    assert code == 0
    assert doc["lower"][0] == pytest.approx(0.025)
    assert doc["upper"][0] == pytest.approx(0.975)


def test_band_csv_from_data(tmp_path, capsys):
    """CSV output with observations from a file."""
    data = write_values(np.random.default_rng(0).normal(size=30), tmp_path / "x.txt")
    code, out = run(capsys, "band", "--data", str(data), "--format", "csv")
    assert code == 0
    assert out.startswith("rank,expected,observed,lower,upper")
    assert out.count("\r\n") == 31


def test_flag_errors_exit_2(capsys):
    """Bad values and conflicting flags are usage errors."""
    assert ellband.main(["band", "--alpha", "1.5", "--n", "10"]) == 2
    assert ellband.main(["band", "--n", "10", "--params", "mu=0", "--estimation", "mle"]) == 2
    assert ellband.main(["band", "--n", "10", "--bogus"]) == 2
    assert ellband.main(["band", "--n", "10", "--method", "ks", "--side", "one"]) == 2


def test_unsupported_combination_exit_3(tmp_path, capsys):
    """No table, exact too slow and no constant: exit 3."""
    code = ellband.main(["local-level", "--n", "10000000", "--alpha", "0.037", "--table-dir", str(tmp_path)])
    assert code == 3


def test_unreadable_data_exit_4(tmp_path, capsys):
    """Missing input files exit 4."""
    assert ellband.main(["plot", str(tmp_path / "missing.txt")]) == 4


def test_log10_domain_exit_5(tmp_path, capsys):
    """A zero on the -log10 scale exits 5 and names the value."""
    data = write_values([0.0, 0.3, 0.6, 0.9], tmp_path / "p.txt")
    code = ellband.main(["plot", str(data), "--dist", "uniform", "--log10"])
    assert code == 5
    assert "sample 1 has 0" in capsys.readouterr().err


def test_plot_svg(tmp_path, capsys):
    """Overlay plots write one band and two point groups."""
    rng = np.random.default_rng(1)
    first = write_values(rng.normal(size=25), tmp_path / "a.txt")
    second = write_values(rng.normal(size=25), tmp_path / "b.txt")
    out_path = tmp_path / "plot.svg"
    code = ellband.main(["plot", str(first), "--overlay", str(second), "--difference", "--output", str(out_path)])
    assert code == 0
    svg = out_path.read_text()
    assert svg.count('<g class="points">') == 2
    assert svg.count('<g class="band">') == 1


def test_calibration_plot_on_log10_scale(tmp_path, capsys):
    """Calibration p-values plot on the -log10 scale as a P-P plot."""
    p_path = tmp_path / "p.txt"
    assert ellband.main(["simulate", "calibration", "--s", "20", "--tables", "200", "--output", str(p_path)]) == 0
    svg_path = tmp_path / "calibration.svg"
    code = ellband.main(["plot", str(p_path), "--pp", "--dist", "uniform", "--log10", "--output", str(svg_path)])
    assert code == 0
    assert "<polygon" in svg_path.read_text()


def test_local_level_single_point(capsys):
    """n=1 local level equals alpha."""
    code, out = run(capsys, "local-level", "--n", "1", "--alpha", "0.05", "--side", "two")
    assert code == 0
    assert float(out) == 0.05


def test_local_level_from_bounds(tmp_path, capsys):
    """Bounds of a solved n=3 band give back alpha."""
    eta = solve_local_level(LocalLevelQuery(n=3, alpha=0.05))
    bounds = bounds_from_eta_two_sided(3, eta)
    h = write_values(bounds.h, tmp_path / "h.txt")
    g = write_values(bounds.g, tmp_path / "g.txt")
    code, out = run(capsys, "local-level", "--from-bounds", str(h), str(g))
    assert code == 0
    assert float(out) == pytest.approx(0.05, rel=2e-4)


def test_table_round_trip(tmp_path, capsys):
    """Written tables reload identically."""
    path = tmp_path / "table.tsv"
    code = ellband.main(["table", "--alpha", "0.05", "--grid", "10:30:10", "--tol", "1e-5", "--output", str(path)])
    assert code == 0
    text = path.read_text()
    table = read_table(path)
    assert [n for n, _ in table.grid] == [10, 20, 30]
    assert dump_table(table) == text


def test_check(tmp_path, capsys):
    """Checks against a fresh band or a saved band file."""
    data = write_values([0.3, 0.5, 0.7], tmp_path / "u.txt")
    code, out = run(capsys, "check", str(data), "--dist", "uniform")
    assert code == 0 and out.strip() == "inside"

    band_path = tmp_path / "band.json"
    assert ellband.main(["band", "--n", "3", "--dist", "uniform", "--output", str(band_path)]) == 0
    outside = write_values([0.3, 0.5, 0.9999], tmp_path / "v.txt")
    code, out = run(capsys, "check", str(outside), "--band", str(band_path))
    assert code == 0 and out.startswith("exited at index 3 (high")


def test_simulations_are_deterministic(capsys):
    """Same seed and flags give byte-identical output for any worker count."""
    args = ["simulate", "type1", "--n", "20", "--replicates", "100", "--seed", "5"]
    _, first = run(capsys, *args, "--workers", "1")
    _, second = run(capsys, *args, "--workers", "3")
    assert first == second
    assert json.loads(first)["replicates"] == 100

    calibration = ["simulate", "calibration", "--s", "30", "--tables", "50", "--seed", "9"]
    _, first = run(capsys, *calibration)
    _, second = run(capsys, *calibration)
    assert first == second and len(first.splitlines()) == 50


def test_power_command(capsys):
    """Power comparison prints both reports."""
    code, out = run(capsys, "simulate", "power", "--n", "30", "--replicates", "50", "--normal")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"ell", "ks", "ell_only", "ks_only", "p_value"}


def normal_quantile_sample(tmp_path, n=200, mu=50.0, sigma=10.0):
    """Normal data sitting at its plotting positions, so fitted bands contain it."""
    x = mu + sigma * stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    return x, write_values(x, tmp_path / "normal.txt")


@pytest.mark.parametrize(
    "estimation, location, scale",
    [
        ("mean-sd", np.mean, lambda x: np.std(x, ddof=1)),
        ("median-sn", np.median, robust_scale_sn),
        ("median-mad", np.median, robust_scale_mad),
        ("median-qn", np.median, robust_scale_qn),
    ],
)
def test_band_reports_estimated_params(tmp_path, capsys, estimation, location, scale):
    """A band for normal data carries the parameters of the chosen estimator."""
    x, data = normal_quantile_sample(tmp_path)
    code, out = run(capsys, "band", "--data", str(data), "--estimation", estimation)
    assert code == 0
    doc = json.loads(out)
    assert doc["estimation"]["variant"] == estimation
    assert doc["params"]["mu"] == pytest.approx(location(x))
    assert doc["params"]["sigma"] == pytest.approx(scale(x))
    assert 8.0 < doc["params"]["sigma"] < 12.0
    assert len(doc["lower"]) == 200 and len(doc["observed"]) == 200


def test_neff_band_reports_estimated_params(tmp_path, capsys):
    """--neff sizes the band by neff but fits the reference to every observation."""
    x, data = normal_quantile_sample(tmp_path)
    code, out = run(capsys, "band", "--data", str(data), "--neff", "50", "--estimation", "mean-sd")
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 50 and doc["effective_n"] is True
    assert doc["estimation"]["variant"] == "mean-sd"
    assert doc["params"]["mu"] == pytest.approx(np.mean(x))
    assert doc["params"]["sigma"] == pytest.approx(np.std(x, ddof=1))
    assert "observed" not in doc


def test_plot_and_check_with_estimated_params(tmp_path, capsys):
    """Fitted references keep N(50, 10) data inside; the standard normal does not."""
    _, data = normal_quantile_sample(tmp_path)
    svg_path = tmp_path / "qq.svg"
    assert ellband.main(["plot", str(data), "--estimation", "median-mad", "--output", str(svg_path)]) == 0
    assert svg_path.read_text().count('<g class="band">') == 1

    svg_path = tmp_path / "qq-neff.svg"
    assert ellband.main(["plot", str(data), "--neff", "40", "--estimation", "mean-sd", "--output", str(svg_path)]) == 0
    assert "<polygon" in svg_path.read_text()

    code, out = run(capsys, "check", str(data), "--estimation", "mean-sd")
    assert code == 0 and out.strip() == "inside"
    code, out = run(capsys, "check", str(data), "--params", "mu=0,sigma=1")
    assert code == 0 and out.startswith("exited at index 1 (high")
