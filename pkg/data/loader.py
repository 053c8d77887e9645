"""
Data loading for observation files.
Supports plain text (one value per line, '#' comments) and CSV columns.
"""
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from utils.errors import DataReadError

logger = logging.getLogger(__name__)


class DataLoader:
    """Reads numeric samples and bound vectors from disk."""

    def __init__(self, base_dir: Optional[Path] = None):
        self.base_dir = Path(base_dir) if base_dir is not None else None

    def resolve(self, file_path: Union[str, Path]) -> Path:
        path = Path(file_path)
        if self.base_dir is not None and not path.is_absolute():
            path = self.base_dir / path
        return path

    def load_values(self, file_path: Union[str, Path]) -> np.ndarray:
        """One number per line; blank lines and text after '#' are ignored."""
        path = self.resolve(file_path)
        try:
            lines = path.read_text().splitlines()
        except (OSError, UnicodeDecodeError) as e:
            raise DataReadError(f"cannot read {path}: {e}") from e

        values = []
        for lineno, line in enumerate(lines, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError as e:
                raise DataReadError(f"{path}:{lineno}: not a number: {text!r}") from e

        data = np.asarray(values, dtype=float)
        self._check(data, path)
        logger.debug(f"Loaded {data.size} values from {path}")
        return data

    def load_from_csv(self, file_path: Union[str, Path], column: str) -> np.ndarray:
        """A numeric column of a CSV file, selected by header name or 0-based position."""
        path = self.resolve(file_path)
        try:
            df = pd.read_csv(path, comment="#")
        except (OSError, UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise DataReadError(f"cannot read CSV {path}: {e}") from e

        if column in df.columns:
            series = df[column]
        elif column.isdigit() and int(column) < len(df.columns):
            series = df.iloc[:, int(column)]
        else:
            raise DataReadError(f"{path} has no column {column!r} (columns: {', '.join(map(str, df.columns))})")

        numeric = pd.to_numeric(series, errors="coerce")
        bad = numeric.isna() & series.notna()
        if bad.any():
            row = int(bad.idxmax())
            raise DataReadError(f"{path}: column {column!r} row {row + 1} is not numeric: {series.iloc[row]!r}")
        data = numeric.dropna().to_numpy(dtype=float)
        self._check(data, path)
        logger.debug(f"Loaded {data.size} values from column {column!r} of {path}")
        return data

    def load(self, file_path: Union[str, Path], column: Optional[str] = None) -> np.ndarray:
        if column is not None:
            return self.load_from_csv(file_path, column)
        return self.load_values(file_path)

    @staticmethod
    def _check(data: np.ndarray, path: Path):
        if data.size == 0:
            raise DataReadError(f"{path} contains no values")
        if not np.all(np.isfinite(data)):
            raise DataReadError(f"{path} contains non-finite values")


def write_values(values, path: Union[str, Path]) -> Path:
    """One value per line with full precision, the format load_values reads."""
    path = Path(path)
    path.write_text("".join(f"{float(v)!r}\n" for v in np.asarray(values, dtype=float).ravel()))
    return path
