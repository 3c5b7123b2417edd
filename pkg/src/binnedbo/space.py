"""Design-space and observation-history types shared by every subsystem.

All quantities are kept in the natural units of the owning testbench
(meters, volts, amps, ...); normalization to the unit cube happens inside
the surrogate backends, never here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["DesignSpace", "DesignPoint", "ObservationSet"]


@dataclass(frozen=True)
class DesignSpace:
    """Axis-aligned box of valid designs."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or upper.shape != lower.shape:
            raise ValueError("lower and upper must be 1-d arrays of equal length")
        if lower.size == 0:
            raise ValueError("design space must have at least one dimension")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    def contains(self, coords: np.ndarray) -> bool:
        c = np.asarray(coords, dtype=float)
        return bool(np.all(c >= self.lower) and np.all(c <= self.upper))

    def clip(self, coords: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(coords, dtype=float), self.lower, self.upper)

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)


@dataclass(frozen=True)
class DesignPoint:
    """A single design. Out-of-bound coordinates are clamped at construction
    because acquisition maximizers may propose boundary points under
    floating-point round-off."""

    space: DesignSpace
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.shape != (self.space.dim,):
            raise ValueError(
                f"expected {self.space.dim} coordinates, got shape {coords.shape}"
            )
        object.__setattr__(self, "coords", self.space.clip(coords))

    def __array__(self, dtype=None):
        return np.asarray(self.coords, dtype=dtype)


def points_to_array(points) -> np.ndarray:
    """Stack a sequence of DesignPoint (or raw coordinate rows) into (n, D)."""
    return np.stack([np.asarray(p, dtype=float) for p in points])


class ObservationSet:
    """Append-only history of (design, scalar outcome) pairs with a running
    incumbent. Owned by a single optimizer loop; reads are safe from
    concurrent scorers."""

    def __init__(self):
        self._points: list[DesignPoint] = []
        self._values: list[float] = []
        self._incumbent_index: int = -1

    def append(self, point: DesignPoint, value: float) -> None:
        value = float(value)
        if not np.isfinite(value):
            raise ValueError("observed value must be finite")
        self._points.append(point)
        self._values.append(value)
        if self._incumbent_index < 0 or value > self._values[self._incumbent_index]:
            self._incumbent_index = len(self._values) - 1

    def __len__(self) -> int:
        return len(self._values)

    @property
    def points(self) -> tuple[DesignPoint, ...]:
        return tuple(self._points)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self._values, dtype=float)

    @property
    def incumbent_index(self) -> int:
        if self._incumbent_index < 0:
            raise ValueError("empty observation set has no incumbent")
        return self._incumbent_index

    @property
    def incumbent_value(self) -> float:
        return self._values[self.incumbent_index]

    @property
    def incumbent_point(self) -> DesignPoint:
        return self._points[self.incumbent_index]

    def x_array(self) -> np.ndarray:
        return points_to_array(self._points)
