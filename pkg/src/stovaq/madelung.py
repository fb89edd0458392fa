"""Polar decomposition psi = sqrt(rho) e^{i lam}, drift fields, Euler residual.

The phase is unwrapped by a single left-to-right sweep (no vortices in 1D);
samples where rho drops below PHASE_FLOOR_REL of its maximum inherit the
phase of the nearest valid neighbor. Logarithms of the density are floored
at LOG_FLOOR_REL of the maximum; drift values in floored regions are
flagged via DriftFields.valid rather than trusted.
"""

from dataclasses import dataclass

import numpy as np

from .grid import (
    Grid1D,
    RealField,
    gradient_values,
    laplacian_values,
    integrate_values,
)
from .params import PhysicalParams, Potential
from .schrodinger import Wavefunction

PHASE_FLOOR_REL = 1e-12
LOG_FLOOR_REL = 1e-30
NORM_TOL = 1e-8


@dataclass(frozen=True)
class MadelungPair:
    grid: Grid1D
    rho: np.ndarray
    lam: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rho", np.asarray(self.rho, dtype=np.float64))
        object.__setattr__(self, "lam", np.asarray(self.lam, dtype=np.float64))
        if self.rho.shape != (self.grid.n,) or self.lam.shape != (self.grid.n,):
            raise ValueError("rho/lam sample count does not match grid")
        if np.any(self.rho < 0):
            raise ValueError("rho must be non-negative")
        if not np.all(np.isfinite(self.rho)) or not np.all(np.isfinite(self.lam)):
            raise ValueError("non-finite samples")
        total = integrate_values(self.rho, self.grid)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"rho not normalized: integral = {total}")


@dataclass(frozen=True)
class DriftFields:
    grid: Grid1D
    v: np.ndarray
    uF: np.ndarray
    uB: np.ndarray
    uR: np.ndarray
    valid: np.ndarray  # False where rho sat below the phase floor


def decompose(wf: Wavefunction) -> MadelungPair:
    rho = np.abs(wf.psi) ** 2
    peak = rho.max()
    if peak == 0.0:
        raise ValueError("cannot decompose the zero function")
    raw = np.angle(wf.psi)
    valid = rho >= PHASE_FLOOR_REL * peak
    if not valid.all():
        # nearest valid neighbor by index
        idx = np.arange(wf.grid.n)
        vi = idx[valid]
        pos = np.searchsorted(vi, idx)
        left = np.clip(pos - 1, 0, vi.size - 1)
        right = np.clip(pos, 0, vi.size - 1)
        nearer = np.where(np.abs(vi[left] - idx) <= np.abs(vi[right] - idx), left, right)
        raw = raw[vi[nearer]]
    lam = np.unwrap(raw)
    return MadelungPair(wf.grid, rho, lam, wf.t)


def compose(mp: MadelungPair) -> Wavefunction:
    return Wavefunction(mp.grid, np.sqrt(mp.rho) * np.exp(1j * mp.lam), mp.t)


def phase_gradient(lam: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Gradient of an unwrapped phase.

    On periodic grids neighbor differences are reduced mod 2*pi into
    (-pi, pi] before central differencing, so the winding seam does not
    produce a spurious spike and linear phases differentiate exactly.
    """
    if not grid.periodic:
        return gradient_values(lam, grid.h, periodic=False)
    dplus = np.roll(lam, -1) - lam
    dplus -= 2.0 * np.pi * np.round(dplus / (2.0 * np.pi))
    return (dplus + np.roll(dplus, 1)) / (2.0 * grid.h)


def log_density_gradient(rho: np.ndarray, grid: Grid1D) -> np.ndarray:
    floored = np.maximum(rho, LOG_FLOOR_REL * rho.max())
    return gradient_values(np.log(floored), grid.h, grid.periodic)


def drifts(mp: MadelungPair, params: PhysicalParams) -> DriftFields:
    """Mean, forward, backward and relative velocities of the two diffusions."""
    v = (params.kappa / params.m) * phase_gradient(mp.lam, mp.grid)
    g = params.nu * log_density_gradient(mp.rho, mp.grid)
    fields = DriftFields(
        grid=mp.grid,
        v=v,
        uF=v + g,
        uB=v - g,
        uR=2.0 * g,
        valid=mp.rho >= PHASE_FLOOR_REL * mp.rho.max(),
    )
    for arr in (fields.v, fields.uF, fields.uB):
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite drift (density floor region unusable)")
    return fields


def quantum_potential(rho: np.ndarray, grid: Grid1D, params: PhysicalParams) -> np.ndarray:
    """Q = -(kappa^2/2m) (lap sqrt(rho))/sqrt(rho), the pointwise form.

    The (grad ln sqrt rho)^2 variants agree with this only after integration
    by parts; the local momentum-balance residual needs the pointwise one.
    """
    s = np.sqrt(np.maximum(rho, LOG_FLOOR_REL * rho.max()))
    return -(params.kappa**2 / (2.0 * params.m)) * laplacian_values(s, grid.h, grid.periodic) / s


def euler_residual(
    trajectory: list[MadelungPair], params: PhysicalParams, V: Potential
) -> list[RealField]:
    """Momentum-balance residual d_t v + (v.grad)v + grad(V+Q)/m at interior snapshots."""
    if len(trajectory) < 3:
        raise ValueError("need at least 3 snapshots for centered time differences")
    grid = trajectory[0].grid
    v_vals = V.sample(grid, params.m)
    vs = [
        (params.kappa / params.m) * phase_gradient(mp.lam, grid) for mp in trajectory
    ]
    out = []
    for s in range(1, len(trajectory) - 1):
        dt_prev = trajectory[s].t - trajectory[s - 1].t
        dt_next = trajectory[s + 1].t - trajectory[s].t
        dv_dt = (vs[s + 1] - vs[s - 1]) / (dt_prev + dt_next)
        adv = vs[s] * gradient_values(vs[s], grid.h, grid.periodic)
        q = quantum_potential(trajectory[s].rho, grid, params)
        force = gradient_values(v_vals + q, grid.h, grid.periodic) / params.m
        out.append(RealField(grid, dv_dt + adv + force))
    return out
