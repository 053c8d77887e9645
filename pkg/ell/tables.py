"""
Precomputed local-level tables.

A table holds solved (n, eta) pairs for one (side, alpha); levels between
grid points are interpolated linearly in (log n, log eta). Tables are stored
as plain text:

    ellband-table v1 two-sided alpha=0.05 tol=1e-06
    10<TAB>0.00845...
    20<TAB>0.00474...
"""
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ell.solver import LocalLevelQuery, Policy, Side, solve_local_level
from utils.config import TABLE_TOL, default_workers, table_dir
from utils.errors import TableError

logger = logging.getLogger(__name__)

MAGIC = "ellband-table"
VERSION = "v1"


@dataclass(frozen=True)
class EtaTable:
    alpha: float
    side: Side
    grid: Tuple[Tuple[int, float], ...]
    tol: float = TABLE_TOL

    def __post_init__(self):
        if not self.grid:
            raise TableError("table has no grid points")
        ns = [n for n, _ in self.grid]
        etas = [eta for _, eta in self.grid]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise TableError("table grid must be strictly ascending in n")
        if any(b >= a for a, b in zip(etas, etas[1:])):
            raise TableError("table eta values must decrease strictly in n")

    @property
    def n_min(self) -> int:
        return self.grid[0][0]

    @property
    def n_max(self) -> int:
        return self.grid[-1][0]

    def covers(self, n: int) -> bool:
        return self.n_min <= n <= self.n_max


def table_build(
    alpha: float,
    side,
    n_grid: Sequence[int],
    tol: float = TABLE_TOL,
    max_workers: Optional[int] = None,
) -> EtaTable:
    """Solve every grid point; points run concurrently, results keep grid order."""
    side = Side.parse(side)
    n_grid = [int(n) for n in n_grid]
    if not n_grid:
        raise TableError("cannot build a table from an empty grid")
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise TableError("grid must be sorted ascending without repeats")

    def solve(n: int) -> float:
        return solve_local_level(LocalLevelQuery(n=n, alpha=alpha, side=side, policy=Policy.EXACT), tol=tol)

    workers = max_workers or default_workers()
    logger.info(f"Building {side.value} table for alpha={alpha:g}: {len(n_grid)} points, {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        etas = list(executor.map(solve, n_grid))
    return EtaTable(alpha=alpha, side=side, grid=tuple(zip(n_grid, etas)), tol=tol)


def table_interpolate(table: EtaTable, n: int) -> float:
    """Stored eta on a grid hit, otherwise linear in (log n, log eta) between neighbours."""
    if not table.covers(n):
        raise TableError(f"n={n} outside table range [{table.n_min}, {table.n_max}]")
    ns = np.array([p[0] for p in table.grid])
    i = int(np.searchsorted(ns, n))
    if ns[i] == n:
        return table.grid[i][1]
    (n1, eta1), (n2, eta2) = table.grid[i - 1], table.grid[i]
    t = (np.log(n) - np.log(n1)) / (np.log(n2) - np.log(n1))
    return float(np.exp((1.0 - t) * np.log(eta1) + t * np.log(eta2)))


def parse_grid(text: str) -> list:
    """'10:1000:10' (start:stop:step, stop inclusive) or '10,20,50'."""
    try:
        if ":" in text:
            start, stop, step = (int(part) for part in text.split(":"))
            if step < 1:
                raise ValueError("step must be positive")
            return list(range(start, stop + 1, step))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise TableError(f"invalid grid '{text}': {e}") from e


def dump_table(table: EtaTable) -> str:
    lines = [f"{MAGIC} {VERSION} {table.side.value} alpha={table.alpha!r} tol={table.tol!r}"]
    lines.extend(f"{n}\t{eta!r}" for n, eta in table.grid)
    return "\n".join(lines) + "\n"


def load_table(text: str) -> EtaTable:
    lines = text.splitlines()
    if not lines:
        raise TableError("empty table file")
    header = lines[0].split()
    if len(header) != 5 or header[0] != MAGIC or header[1] != VERSION:
        raise TableError(f"unrecognised table header: {lines[0]!r}")
    try:
        side = Side(header[2])
        if not header[3].startswith("alpha=") or not header[4].startswith("tol="):
            raise ValueError("expected alpha= and tol= fields")
        alpha = float(header[3][len("alpha="):])
        tol = float(header[4][len("tol="):])
    except ValueError as e:
        raise TableError(f"malformed table header {lines[0]!r}: {e}") from e

    grid = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != 2:
            raise TableError(f"line {lineno}: expected 'n<TAB>eta', got {line!r}")
        try:
            grid.append((int(parts[0]), float(parts[1])))
        except ValueError as e:
            raise TableError(f"line {lineno}: {e}") from e
    return EtaTable(alpha=alpha, side=side, grid=tuple(grid), tol=tol)


def table_filename(side, alpha: float) -> str:
    return f"{Side.parse(side).value}_alpha{alpha:g}.tsv"


def write_table(table: EtaTable, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_table(table))
    logger.info(f"Wrote {len(table.grid)} table rows to {path}")
    return path


def read_table(path: Path) -> EtaTable:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise TableError(f"cannot read table {path}: {e}") from e
    return load_table(text)


class TableStore:
    """Finds tables by (side, alpha) in a directory and keeps them loaded."""

    def __init__(self, directory: Optional[Path] = None):
        self.directory = Path(directory) if directory is not None else table_dir()
        self._tables: Dict[Tuple[Side, float], Optional[EtaTable]] = {}
        self._lock = threading.Lock()

    def get(self, side, alpha: float) -> Optional[EtaTable]:
        key = (Side.parse(side), float(alpha))
        with self._lock:
            if key not in self._tables:
                path = self.directory / table_filename(*key)
                table = read_table(path) if path.is_file() else None
                if table is not None:
                    logger.debug(f"Loaded table {path} covering n={table.n_min}..{table.n_max}")
                self._tables[key] = table
            return self._tables[key]

    def add(self, table: EtaTable):
        with self._lock:
            self._tables[(table.side, float(table.alpha))] = table

    def lookup(self, side, alpha: float, n: int) -> Optional[float]:
        table = self.get(side, alpha)
        if table is None or not table.covers(n):
            return None
        return table_interpolate(table, n)
