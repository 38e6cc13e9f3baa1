"""Uniform 1-D grids and grid-sampled scalar fields.

The continuum problems live on the whole real line; computations truncate to
[x_min, x_max] with far-field padding chosen by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform mesh x_i = x_min + i*dx for i = 0 .. n-1."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.n < 3:
            raise ValueError(f"need n >= 3 nodes, got n={self.n}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)

    def refine(self) -> "Grid":
        """Nested refinement: halves dx keeping both endpoints (n -> 2n-1)."""
        return Grid(self.x_min, self.x_max, 2 * self.n - 1)


@dataclass
class Field:
    """Real-valued function sampled on the nodes of a Grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise ValueError(
                f"value array shape {self.values.shape} does not match grid n={self.grid.n}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


def field_from_function(grid: Grid, fn) -> Field:
    """Sample a callable on the grid nodes."""
    return Field(grid, np.asarray(fn(grid.x), dtype=float))
