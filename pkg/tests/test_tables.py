"""
Unit tests for eta tables.
"""
import pytest

from ell.solver import Side, global_level
from ell.tables import (
    EtaTable,
    TableStore,
    dump_table,
    load_table,
    parse_grid,
    read_table,
    table_build,
    table_filename,
    table_interpolate,
    write_table,
)
from utils.errors import TableError


def sample_table(side=Side.TWO, alpha=0.05):
    return EtaTable(alpha=alpha, side=side, grid=((100, 0.004), (200, 0.002), (400, 0.001)))


def test_table_validation():
    """Grids must be nonempty, ascending in n and decreasing in eta."""
    with pytest.raises(TableError):
        EtaTable(alpha=0.05, side=Side.TWO, grid=())
    with pytest.raises(TableError):
        EtaTable(alpha=0.05, side=Side.TWO, grid=((20, 0.01), (10, 0.02)))
    with pytest.raises(TableError):
        EtaTable(alpha=0.05, side=Side.TWO, grid=((10, 0.01), (20, 0.02)))


def test_parse_grid():
    """Ranges include the stop value; lists are comma separated."""
    assert parse_grid("10:50:10") == [10, 20, 30, 40, 50]
    assert parse_grid("10,20, 50") == [10, 20, 50]
    with pytest.raises(TableError):
        parse_grid("10:x:10")
    with pytest.raises(TableError):
        parse_grid("10:50:0")


def test_interpolation():
    """Grid hits return stored values; a power law in n is reproduced between them."""
    table = sample_table()
    assert table_interpolate(table, 200) == 0.002
    assert table_interpolate(table, 150) == pytest.approx(0.004 * 100 / 150)
    assert table_interpolate(table, 300) == pytest.approx(0.002 * 200 / 300)
    with pytest.raises(TableError):
        table_interpolate(table, 99)
    with pytest.raises(TableError):
        table_interpolate(table, 401)


def test_text_format():
    """Dumped tables reload to the same table."""
    table = sample_table(Side.ONE, 0.01)
    text = dump_table(table)
    assert text.splitlines()[0] == "ellband-table v1 one-sided alpha=0.01 tol=1e-06"
    assert load_table(text) == table


@pytest.mark.parametrize(
    "text",
    [
        "",
        "not-a-table v1 two-sided alpha=0.05 tol=1e-06\n10\t0.01\n",
        "ellband-table v1 sideways alpha=0.05 tol=1e-06\n10\t0.01\n",
        "ellband-table v1 two-sided alpha=0.05 tol=1e-06\n10 0.01\n",
        "ellband-table v1 two-sided alpha=0.05 tol=1e-06\nten\t0.01\n",
    ],
)
def test_malformed_tables(text):
    """Bad headers and rows raise TableError."""
    with pytest.raises(TableError):
        load_table(text)


def test_build_round_trip():
    """Every built entry reproduces alpha at the table tolerance."""
    table = table_build(0.05, "two", [10, 20], tol=1e-6, max_workers=2)
    assert [n for n, _ in table.grid] == [10, 20]
    for n, eta in table.grid:
        assert global_level(n, eta, Side.TWO) == pytest.approx(0.05, rel=2e-6)


def test_build_rejects_unsorted_grid():
    """Grids must be ascending without repeats."""
    with pytest.raises(TableError):
        table_build(0.05, "two", [20, 10])


def test_interpolated_level_is_close():
    """Interpolating between n=100 and n=200 keeps alpha within 1%."""
    table = table_build(0.05, Side.TWO, [100, 200], tol=1e-6)
    eta = table_interpolate(table, 150)
    assert global_level(150, eta, Side.TWO) == pytest.approx(0.05, rel=0.01)


def test_store_lookup(tmp_path):
    """Stores find tables by side and alpha and cover only their range."""
    table = sample_table()
    write_table(table, tmp_path / table_filename(Side.TWO, 0.05))
    assert read_table(tmp_path / "two-sided_alpha0.05.tsv") == table

    store = TableStore(tmp_path)
    assert store.lookup("two", 0.05, 150) == pytest.approx(0.004 * 100 / 150)
    assert store.lookup("two", 0.05, 1000) is None
    assert store.lookup("one", 0.05, 150) is None
    assert store.get("two", 0.01) is None


def test_store_add():
    """Tables added in memory are found without touching disk."""
    store = TableStore("/nonexistent-table-dir")
    store.add(sample_table(Side.ONE, 0.1))
    assert store.lookup(Side.ONE, 0.1, 100) == 0.004


def test_read_missing_table(tmp_path):
    """Missing files raise TableError."""
    with pytest.raises(TableError):
        read_table(tmp_path / "missing.tsv")
