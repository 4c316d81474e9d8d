"""Evaluation grids over the action-type charts."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .chartcore import Chart, ChartPoint

__all__ = ["GridAxis", "parse_grid", "grid_points", "default_grid", "DIAGONAL_BAND"]

DIAGONAL_BAND = 0.05
_DEFAULT_ANGLES = (0.4, 1.3)


class GridAxis(tuple):
    """``(name, lo, hi, count)``; ``linspace(lo, hi, count)`` along one coordinate."""

    __slots__ = ()

    def __new__(cls, name: str, lo: float, hi: float, count: int):
        if count < 1:
            raise ValueError(f"grid axis {name!r} needs count >= 1")
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f"grid axis {name!r} has non-finite bounds")
        return super().__new__(cls, (name, float(lo), float(hi), int(count)))

    @property
    def values(self) -> np.ndarray:
        name, lo, hi, count = self
        return np.linspace(lo, hi, count)


def parse_grid(text: str) -> list:
    """Parse ``"J1=0.1:1:5,J2=0.1:1:5"`` into :class:`GridAxis` records."""
    axes = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        try:
            name, rng = part.split("=")
            lo, hi, count = rng.split(":")
            axes.append(GridAxis(name.strip(), float(lo), float(hi), int(count)))
        except ValueError as exc:
            raise ValueError(f"bad grid axis {part!r} (expected name=min:max:count): {exc}") from None
    if not axes:
        raise ValueError("empty grid")
    return axes


def grid_points(chart: Chart, axes, fixed=None, band: float = DIAGONAL_BAND) -> list:
    """Row-major points of ``chart`` over ``axes``.

    Coordinates without an axis take their value from ``fixed`` (angles
    default to 0.4 and 1.3).  Invalid points are dropped, and on ACTION so is
    the band ``|J1 - J2| < band`` where the second structure degenerates.
    """
    names = chart.coordinate_names
    base = {names[2]: _DEFAULT_ANGLES[0], names[3]: _DEFAULT_ANGLES[1]} if chart.dim == 4 else {}
    base.update(fixed or {})
    for ax in axes:
        if ax[0] not in names:
            raise ValueError(f"{ax[0]!r} is not a coordinate of {chart.name} {names}")
    missing = [n for n in names if n not in base and n not in {ax[0] for ax in axes}]
    if missing:
        raise ValueError(f"no value for coordinates {missing}")
    out = []
    for combo in itertools.product(*(ax.values for ax in axes)):
        values = dict(base)
        values.update({ax[0]: v for ax, v in zip(axes, combo)})
        coords = tuple(values[n] for n in names)
        if not chart.is_valid(coords):
            continue
        if chart is Chart.ACTION and abs(coords[0] - coords[1]) < band:
            continue
        out.append(ChartPoint(chart, coords))
    return out


def default_grid(chart: Chart, n: int = 5) -> list:
    """Default bound-region grids used by the verification suites."""
    if chart is Chart.ACTION:
        axes = [GridAxis("J1", 0.1, 1.0, n), GridAxis("J2", 0.1, 1.0, n)]
    elif chart is Chart.XI:
        axes = [GridAxis("xi1", 0.2, 0.8, n), GridAxis("xi2", 0.9, 1.5, n)]
    elif chart is Chart.PI:
        axes = [GridAxis("pi1", 1.0, 2.0, n), GridAxis("pi2", 0.1, 0.9, n)]
    elif chart is Chart.NU:
        axes = [GridAxis("nu_a", 0.1, 1.0, n), GridAxis("nu_e", -1.0, -0.1, n)]
    else:
        raise ValueError(f"no default grid on {chart.name}")
    return grid_points(chart, axes)
