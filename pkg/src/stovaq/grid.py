"""Uniform 1D grid, finite-difference operators, quadrature and density metrics.

Every other module differentiates and integrates through the functions here.
Clamped grids use one-sided second-order stencils at the edges; periodic
grids wrap.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

PERIODIC = "periodic"
CLAMPED = "clamped"


class GridMismatchError(ValueError):
    """Two fields that must share a grid do not."""


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n: int
    boundary: str = CLAMPED

    def __post_init__(self):
        if self.n < 8:
            raise ValueError(f"grid needs n >= 8 points, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.boundary not in (PERIODIC, CLAMPED):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @property
    def periodic(self) -> bool:
        return self.boundary == PERIODIC

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def h(self) -> float:
        # Periodic grids omit the duplicate endpoint, so n cells span the domain.
        return self.length / self.n if self.periodic else self.length / (self.n - 1)

    @cached_property
    def points(self) -> np.ndarray:
        x = self.x_min + self.h * np.arange(self.n)
        x.setflags(write=False)
        return x

    @cached_property
    def quad_weights(self) -> np.ndarray:
        """Quadrature weights: Riemann sum (periodic) or trapezoid (clamped)."""
        w = np.full(self.n, self.h)
        if not self.periodic:
            w[0] *= 0.5
            w[-1] *= 0.5
        w.setflags(write=False)
        return w


def _check_values(grid: Grid1D, values: np.ndarray):
    if values.shape != (grid.n,):
        raise ValueError(f"expected {grid.n} samples, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("field contains non-finite samples")


@dataclass(frozen=True)
class RealField:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        _check_values(self.grid, self.values)


@dataclass(frozen=True)
class ComplexField:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.complex128))
        _check_values(self.grid, self.values)


def same_grid(a, b) -> Grid1D:
    if a.grid != b.grid:
        raise GridMismatchError(f"grids differ: {a.grid} vs {b.grid}")
    return a.grid


def gradient_values(v: np.ndarray, h: float, periodic: bool) -> np.ndarray:
    """Second-order first derivative of raw samples."""
    g = np.empty_like(v)
    if periodic:
        g[:] = (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * h)
    else:
        g[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
        g[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        g[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return g


def laplacian_values(v: np.ndarray, h: float, periodic: bool) -> np.ndarray:
    """Second-order second derivative of raw samples."""
    out = np.empty_like(v)
    inv = 1.0 / (h * h)
    if periodic:
        out[:] = (np.roll(v, -1) - 2.0 * v + np.roll(v, 1)) * inv
    else:
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) * inv
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) * inv
        out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) * inv
    return out


def gradient(f):
    """Gradient of a RealField or ComplexField on its own grid."""
    cls = type(f)
    return cls(f.grid, gradient_values(f.values, f.grid.h, f.grid.periodic))


def laplacian(f):
    cls = type(f)
    return cls(f.grid, laplacian_values(f.values, f.grid.h, f.grid.periodic))


def integrate_values(v: np.ndarray, grid: Grid1D):
    """Quadrature of raw samples; complex input yields a complex scalar."""
    return np.dot(grid.quad_weights, v)


def integrate(f: RealField) -> float:
    return float(integrate_values(f.values, f.grid))


def l1_distance(f: RealField, g: RealField) -> float:
    grid = same_grid(f, g)
    return float(integrate_values(np.abs(f.values - g.values), grid))
