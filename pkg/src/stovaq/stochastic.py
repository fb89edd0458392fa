"""Forward/backward diffusion ensembles and their empirical densities.

The noise convention: each Euler-Maruyama step adds a Gaussian increment of
variance 2*nu*|dt|, the value required for the transport currents
j = rho (u -/+ nu grad ln rho) to solve the forward/backward transport
equations as written. Every increment is a pure function of
(master seed, trajectory substream, step counter), so ensembles are
bit-reproducible under any parallel partitioning.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import Grid1D, RealField, integrate_values
from .madelung import log_density_gradient

PURPOSE_INIT = 1
PURPOSE_PATH = 2


@dataclass(frozen=True)
class NoiseParams:
    nu: float
    master_seed: int

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError("nu must be positive")


@dataclass(frozen=True)
class Ensemble:
    positions: np.ndarray
    t: float
    streams: np.ndarray  # per-trajectory substream ids (uint64)
    draws: int = 0  # noise draws consumed per trajectory so far

    def __post_init__(self):
        object.__setattr__(self, "positions", np.asarray(self.positions, dtype=np.float64))
        object.__setattr__(self, "streams", np.asarray(self.streams, dtype=np.uint64))
        if self.positions.size < 1:
            raise ValueError("ensemble must hold at least one trajectory")
        if self.streams.shape != self.positions.shape:
            raise ValueError("one substream id per trajectory required")
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("non-finite positions")

    @property
    def count(self) -> int:
        return self.positions.size


@dataclass(frozen=True)
class DriftInterpolant:
    """Time-indexed drift fields with bilinear interpolation in (x, t)."""

    grid: Grid1D
    times: np.ndarray
    values: np.ndarray  # (n_times, grid.n)

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=np.float64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.values.shape != (self.times.size, self.grid.n):
            raise ValueError("values must be (n_times, grid.n)")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must increase strictly")

    @classmethod
    def from_fields(cls, fields: list[RealField], times) -> "DriftInterpolant":
        grid = fields[0].grid
        return cls(grid, np.asarray(times, float), np.stack([f.values for f in fields]))

    def covers(self, t0: float, t1: float) -> bool:
        lo, hi = min(t0, t1), max(t0, t1)
        eps = 1e-9 * max(1.0, abs(hi - lo))
        return self.times[0] - eps <= lo and hi <= self.times[-1] + eps

    def __call__(self, x: np.ndarray, t: float) -> np.ndarray:
        j0, j1, theta = kernels._time_bracket(self.times, t)
        return kernels._interp_rows_numpy(
            self.values[j0],
            self.values[j1],
            theta,
            np.asarray(x, float),
            self.grid.x_min,
            self.grid.h,
            self.grid.n,
            self.grid.periodic,
        )


def sample_initial(rho0: RealField, count: int, noise: NoiseParams) -> Ensemble:
    """Inverse-CDF sampling from the piecewise-linear CDF of rho0."""
    grid = rho0.grid
    total = integrate_values(rho0.values, grid)
    if not np.isfinite(total) or abs(total - 1.0) > 1e-8 or np.any(rho0.values < 0):
        raise ValueError("rho0 must be a normalized non-negative density")
    if grid.periodic:
        xs = np.append(grid.points, grid.x_max)
        dens = np.append(rho0.values, rho0.values[0])
    else:
        xs = grid.points
        dens = rho0.values
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(xs))])
    cdf /= cdf[-1]
    streams = np.arange(count, dtype=np.uint64)
    key = kernels.derive_key(noise.master_seed, PURPOSE_INIT)
    u = kernels.uniforms_numpy(kernels.stream_state_numpy(key, streams), 0)
    return Ensemble(np.interp(u, cdf, xs), 0.0, streams)


def _run(
    ens: Ensemble,
    interp: DriftInterpolant,
    dt: float,
    n_steps: int,
    noise: NoiseParams,
    checkpoint_steps=None,
) -> list[Ensemble]:
    t_end = ens.t + n_steps * dt
    if not interp.covers(ens.t, t_end):
        raise ValueError(
            f"drift interpolant covers [{interp.times[0]}, {interp.times[-1]}], "
            f"need [{ens.t}, {t_end}]"
        )
    if checkpoint_steps is None:
        checkpoint_steps = [n_steps]
    cps = np.asarray(checkpoint_steps, dtype=np.int64)
    out = np.empty((cps.size, ens.count))
    key = kernels.derive_key(noise.master_seed, PURPOSE_PATH)
    grid = interp.grid
    kernels.sde_paths(
        ens.positions,
        ens.streams,
        key,
        ens.t,
        dt,
        n_steps,
        ens.draws,
        interp.times,
        interp.values,
        grid.x_min,
        grid.h,
        grid.n,
        grid.periodic,
        grid.x_min,
        grid.x_max,
        noise.nu,
        cps,
        out,
    )
    return [
        Ensemble(out[i], ens.t + int(s) * dt, ens.streams, ens.draws + int(s))
        for i, s in enumerate(cps)
    ]


def step_forward(ens: Ensemble, uF: DriftInterpolant, dt: float, noise: NoiseParams) -> Ensemble:
    if dt <= 0:
        raise ValueError("forward steps need dt > 0")
    return _run(ens, uF, dt, 1, noise)[0]


def step_backward(ens: Ensemble, uB: DriftInterpolant, dt: float, noise: NoiseParams) -> Ensemble:
    if dt >= 0:
        raise ValueError("backward steps need dt < 0")
    return _run(ens, uB, dt, 1, noise)[0]


def run_forward(ens, uF, dt, n_steps, noise, checkpoint_steps=None) -> list[Ensemble]:
    if dt <= 0:
        raise ValueError("forward runs need dt > 0")
    return _run(ens, uF, dt, n_steps, noise, checkpoint_steps)


def run_backward(ens, uB, dt, n_steps, noise, checkpoint_steps=None) -> list[Ensemble]:
    if dt >= 0:
        raise ValueError("backward runs need dt < 0")
    return _run(ens, uB, dt, n_steps, noise, checkpoint_steps)


def empirical_density(ens: Ensemble, grid: Grid1D) -> RealField:
    """Histogram over point-centered cells, normalized to unit integral."""
    if ens.count == 0:
        raise ValueError("empty ensemble")
    x = ens.positions
    if grid.periodic:
        shifted = np.mod(x - grid.x_min + 0.5 * grid.h, grid.length)
        idx = np.minimum((shifted / grid.h).astype(np.int64), grid.n - 1)
    else:
        if x.min() < grid.x_min - 1e-12 or x.max() > grid.x_max + 1e-12:
            raise ValueError("positions leave the grid domain")
        edges = np.concatenate(
            [[grid.x_min], grid.points[:-1] + 0.5 * grid.h, [grid.x_max]]
        )
        idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, grid.n - 1)
    counts = np.bincount(idx, minlength=grid.n).astype(np.float64)
    dens = counts / (ens.count * grid.quad_weights)
    return RealField(grid, dens)


def fokker_planck_flux(rho: RealField, u: RealField, nu: float, direction: str) -> RealField:
    """Transport current j = rho (u - nu grad ln rho) forward, + backward."""
    if direction not in ("F", "B"):
        raise ValueError("direction must be 'F' or 'B'")
    sign = -1.0 if direction == "F" else 1.0
    g = log_density_gradient(rho.values, rho.grid)
    return RealField(rho.grid, rho.values * (u.values + sign * nu * g))
