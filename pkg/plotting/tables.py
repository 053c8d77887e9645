"""
Plot-ready tables: CSV rows per rank and the JSON band document.
"""
import json
import math
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from bands.builder import TestingBand
from plotting.spec import LayerKind, PlotSpec
from utils.errors import ConfigError, ConsistencyError

COLUMNS = ["rank", "expected", "observed", "lower", "upper"]
# compact; million-point bands stay tens of megabytes
JSON_SEPARATORS = (",", ":")


def _number(value) -> Optional[float]:
    value = float(value)
    return value if math.isfinite(value) else None


def _finite_or_none(values) -> list:
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)
    if finite.all():
        return values.tolist()
    return [v if ok else None for v, ok in zip(values.tolist(), finite.tolist())]


def band_document(band: TestingBand, observations=None) -> Dict[str, Any]:
    """JSON-ready band; infinite data-scale endpoints become null."""
    doc: Dict[str, Any] = {
        "n": band.n,
        "alpha": band.alpha,
        "eta": band.eta,
        "method": band.method.value,
        "side": band.side.value,
        "family": band.distribution.family.value,
        "params": dict(band.distribution.params),
        "estimation": band.dparams_source.to_dict(),
        "prob_lower": _finite_or_none(band.prob_lower),
        "prob_upper": _finite_or_none(band.prob_upper),
        "lower": _finite_or_none(band.lower),
        "upper": _finite_or_none(band.upper),
        "expected": _finite_or_none(band.expected),
        "generated_by_path": band.path,
    }
    if band.effective_n:
        doc["effective_n"] = True
    if observations is not None:
        doc["observed"] = _finite_or_none(np.sort(np.asarray(observations, dtype=float).ravel()))
    return doc


def band_frame(band: TestingBand, observations=None) -> pd.DataFrame:
    observed = np.full(band.n, np.nan)
    if observations is not None:
        observed = np.sort(np.asarray(observations, dtype=float).ravel())
        if observed.size != band.n:
            raise ConsistencyError(f"{observed.size} observations against a band for n={band.n}")
    return pd.DataFrame(
        {
            "rank": np.arange(1, band.n + 1),
            "expected": band.expected,
            "observed": observed,
            "lower": band.lower,
            "upper": band.upper,
        },
        columns=COLUMNS,
    )


def plot_frame(spec: PlotSpec) -> pd.DataFrame:
    """Displayed (transformed) values of the first sample, line and band."""
    bands = spec.layers_of(LayerKind.BAND)
    points = spec.layers_of(LayerKind.POINTS)
    lines = spec.layers_of(LayerKind.LINE)
    if not bands:
        return pd.DataFrame(columns=COLUMNS)
    lower, upper = bands[0].values
    n = len(lower)
    expected = lines[0].values[0] if lines else np.full(n, np.nan)
    observed = points[0].values[0] if points and len(points[0].x) == n else np.full(n, np.nan)
    return pd.DataFrame(
        {"rank": np.arange(1, n + 1), "expected": expected, "observed": observed, "lower": lower, "upper": upper},
        columns=COLUMNS,
    )


def emit_table(source: Union[TestingBand, PlotSpec], fmt: str = "csv", observations=None) -> str:
    """CSV (RFC 4180, CRLF rows) or JSON text for a band or a plot."""
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown table format '{fmt}' (expected csv or json)")

    if isinstance(source, PlotSpec):
        frame = plot_frame(source)
        if fmt == "csv":
            return frame.to_csv(index=False, lineterminator="\r\n")
        rows = [
            {
                "rank": int(row.rank),
                **{key: _number(getattr(row, key)) for key in COLUMNS[1:]},
            }
            for row in frame.itertuples(index=False)
        ]
        return json.dumps(rows, separators=JSON_SEPARATORS, allow_nan=False) + "\n"

    if fmt == "csv":
        return band_frame(source, observations).to_csv(index=False, lineterminator="\r\n")
    return json.dumps(band_document(source, observations), separators=JSON_SEPARATORS, allow_nan=False) + "\n"


def parse_band_document(text: str) -> Dict[str, Any]:
    """Inverse of the JSON band output, with null endpoints read back as infinities."""
    doc = json.loads(text)
    for key, missing in (("lower", -math.inf), ("upper", math.inf)):
        doc[key] = [missing if v is None else v for v in doc[key]]
    return doc
