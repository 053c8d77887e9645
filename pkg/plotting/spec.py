"""
Plot specifications for Q-Q and P-P plots with testing bands.

A layer keeps the untransformed y-values and, in differenced plots, the
expected values subtracted from them, so the displayed values are
raw - offset and un-differencing returns raw unchanged.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from bands.builder import TestingBand
from bands.expected import expected_points
from utils.errors import ConsistencyError, TransformDomainError

logger = logging.getLogger(__name__)

PALETTE = ("#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400")


class LayerKind(str, Enum):
    POINTS = "points"
    LINE = "line"
    BAND = "band"


class AxisTransform(str, Enum):
    IDENTITY = "identity"
    LOG10_REVERSED = "log10-reversed"


@dataclass(frozen=True)
class Style:
    color: str = "#1f4e9c"
    point_size: float = 2.5
    line_width: float = 1.5
    opacity: float = 1.0


@dataclass(frozen=True)
class Layer:
    """Points and lines carry one y-series, a band carries (lower, upper)."""

    kind: LayerKind
    x: np.ndarray
    raw: Tuple[np.ndarray, ...]
    offset: Optional[np.ndarray] = None
    label: str = ""
    style: Style = field(default_factory=Style)

    @property
    def values(self) -> Tuple[np.ndarray, ...]:
        if self.offset is None:
            return self.raw
        return tuple(series - self.offset for series in self.raw)

    def undifferenced(self) -> Tuple[np.ndarray, ...]:
        return self.raw


@dataclass(frozen=True)
class PlotOptions:
    difference: bool = False
    log10: bool = False
    overlay: Sequence[Sequence[float]] = ()
    labels: Sequence[str] = ()
    x_label: Optional[str] = None
    y_label: Optional[str] = None
    title: str = ""
    width: int = 640
    height: int = 480
    show_line: bool = True


@dataclass(frozen=True)
class PlotSpec:
    layers: List[Layer]
    x_transform: AxisTransform = AxisTransform.IDENTITY
    y_transform: AxisTransform = AxisTransform.IDENTITY
    difference: bool = False
    x_label: str = "expected"
    y_label: str = "observed"
    title: str = ""
    width: int = 640
    height: int = 480
    decoupled: bool = False

    def layers_of(self, kind: LayerKind) -> List[Layer]:
        return [layer for layer in self.layers if layer.kind is kind]


def neg_log10(values: np.ndarray, what: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    bad = np.flatnonzero(~(values > 0.0))
    if bad.size:
        value = float(values[bad[0]])
        raise TransformDomainError(f"-log10 needs positive values, {what} has {value:g}", value)
    return -np.log10(values)


def _positions(n: int, band: TestingBand) -> np.ndarray:
    """x-coordinates of n sorted points against the band's reference."""
    if n == band.n:
        return band.expected
    return band.distribution.quantile(expected_points(n, band.expected_mode).values)


def make_plot(observations, band: TestingBand, options: Optional[PlotOptions] = None) -> PlotSpec:
    """Layers for the band, the expected line and every sample, transformed as asked."""
    options = options or PlotOptions()
    samples = [np.sort(np.asarray(observations, dtype=float).ravel())]
    samples += [np.sort(np.asarray(extra, dtype=float).ravel()) for extra in options.overlay]
    for k, sample in enumerate(samples):
        if sample.size != band.n and not band.effective_n:
            raise ConsistencyError(f"sample {k + 1} has {sample.size} points but the band is for n={band.n}")

    def axis(values: np.ndarray, what: str) -> np.ndarray:
        return neg_log10(values, what) if options.log10 else np.asarray(values, dtype=float)

    band_x = axis(band.expected, "expected quantiles")
    # -log10 reverses order, so the lower endpoint becomes the upper edge
    lower, upper = band.lower, band.upper
    if options.log10:
        lower, upper = axis(band.upper, "band upper endpoints"), axis(band.lower, "band lower endpoints")
    layers = [
        Layer(
            kind=LayerKind.BAND,
            x=band_x,
            raw=(np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)),
            offset=band_x if options.difference else None,
            label=f"{band.method.value} band",
            style=Style(color="#9aa7b8", opacity=0.45),
        )
    ]
    if options.show_line:
        layers.append(
            Layer(
                kind=LayerKind.LINE,
                x=band_x,
                raw=(band_x,),
                offset=band_x if options.difference else None,
                label="expected",
                style=Style(color="#333333", line_width=1.2),
            )
        )

    for k, sample in enumerate(samples):
        x = band_x if sample.size == band.n else axis(_positions(sample.size, band), "expected quantiles")
        y = axis(sample, f"sample {k + 1}")
        label = options.labels[k] if k < len(options.labels) else f"sample {k + 1}"
        layers.append(
            Layer(
                kind=LayerKind.POINTS,
                x=x,
                raw=(y,),
                offset=x if options.difference else None,
                label=label,
                style=Style(color=PALETTE[k % len(PALETTE)]),
            )
        )

    transform = AxisTransform.LOG10_REVERSED if options.log10 else AxisTransform.IDENTITY
    x_label = options.x_label or ("expected (-log10)" if options.log10 else "expected")
    y_label = options.y_label or ("observed (-log10)" if options.log10 else "observed")
    if options.difference:
        y_label = f"{y_label} - expected"
    logger.debug(f"Plot with {len(layers)} layers, difference={options.difference}, log10={options.log10}")
    return PlotSpec(
        layers=layers,
        x_transform=transform,
        y_transform=transform,
        difference=options.difference,
        x_label=x_label,
        y_label=y_label,
        title=options.title,
        width=options.width,
        height=options.height,
        decoupled=band.effective_n,
    )
