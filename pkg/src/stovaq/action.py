"""Hydrodynamic and complex-form actions on discretized (rho, lam) histories.

Time quadrature is trapezoid; the time derivative is centered inside and
first-order one-sided at the two ends. That pair satisfies the discrete
summation-by-parts identity, which is what makes the analytic gradient of
the discrete action consistent with the continuum Euler-Lagrange fields at
every interior snapshot (second-order one-sided end rows would poison the
rows next to the ends).

Gradients are reported as functional-derivative fields: raw partial
derivatives divided by the time x space quadrature weight of the sample,
so <dI, delta> under the quadrature inner product is the first variation.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .grid import Grid1D
from .madelung import phase_gradient, LOG_FLOOR_REL
from .params import PhysicalParams, Potential
from .schrodinger import Wavefunction, apply_hamiltonian


@dataclass(frozen=True)
class DiscreteTrajectory:
    snapshots: list
    dt: float
    params: PhysicalParams
    potential: Potential

    def __post_init__(self):
        if len(self.snapshots) < 3:
            raise ValueError("need at least 3 snapshots")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        grid = self.snapshots[0].grid
        for mp in self.snapshots:
            if mp.grid != grid:
                raise ValueError("snapshots live on different grids")

    @property
    def grid(self) -> Grid1D:
        return self.snapshots[0].grid

    @classmethod
    def from_wavefunctions(cls, wfs, params, potential) -> "DiscreteTrajectory":
        """Decompose a solver history into an aligned (rho, lam) trajectory.

        Each snapshot is unwrapped in space on its own, so its global phase
        is only defined mod 2*pi; successive snapshots are shifted by whole
        turns to make lam continuous in time (the time-derivative stencils
        would otherwise see 2*pi jumps whenever the overall phase crosses a
        branch cut).
        """
        from .madelung import MadelungPair, decompose

        dts = np.diff([wf.t for wf in wfs])
        if not np.allclose(dts, dts[0], rtol=1e-9):
            raise ValueError("snapshots must be uniformly spaced in time")
        pairs = [decompose(wf) for wf in wfs]
        aligned = [pairs[0]]
        for mp in pairs[1:]:
            prev = aligned[-1]
            weight = np.minimum(prev.rho, mp.rho)
            jump = np.average(mp.lam - prev.lam, weights=weight)
            turns = np.round(jump / (2.0 * np.pi))
            if turns != 0.0:
                mp = MadelungPair(mp.grid, mp.rho, mp.lam - 2.0 * np.pi * turns, mp.t)
            aligned.append(mp)
        return cls(aligned, float(dts[0]), params, potential)


def time_weights(n_t: int, dt: float) -> np.ndarray:
    w = np.full(n_t, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def time_derivative_matrix(n_t: int, dt: float) -> np.ndarray:
    """Centered rows inside, first-order one-sided rows at both ends (SBP pair)."""
    W = np.zeros((n_t, n_t))
    for s in range(1, n_t - 1):
        W[s, s - 1] = -0.5 / dt
        W[s, s + 1] = 0.5 / dt
    W[0, 0], W[0, 1] = -1.0 / dt, 1.0 / dt
    W[-1, -2], W[-1, -1] = -1.0 / dt, 1.0 / dt
    return W


def space_gradient_matrix(grid: Grid1D) -> sp.csr_matrix:
    n, h = grid.n, grid.h
    G = sp.lil_matrix((n, n))
    for i in range(1, n - 1):
        G[i, i - 1] = -0.5 / h
        G[i, i + 1] = 0.5 / h
    if grid.periodic:
        G[0, n - 1], G[0, 1] = -0.5 / h, 0.5 / h
        G[n - 1, n - 2], G[n - 1, 0] = -0.5 / h, 0.5 / h
    else:
        G[0, 0], G[0, 1], G[0, 2] = -1.5 / h, 2.0 / h, -0.5 / h
        G[n - 1, n - 1], G[n - 1, n - 2], G[n - 1, n - 3] = 1.5 / h, -2.0 / h, 0.5 / h
    return G.tocsr()


def _floored_log(rho: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(rho, LOG_FLOOR_REL * rho.max()))


def _stack(traj: DiscreteTrajectory):
    rho = np.stack([mp.rho for mp in traj.snapshots])
    lam = np.stack([mp.lam for mp in traj.snapshots])
    return rho, lam


def _hydro_action(rho, lam, grid, dt, params, potential, internal: bool) -> float:
    p = params
    n_t = rho.shape[0]
    wt = time_weights(n_t, dt)
    wx = grid.quad_weights
    v_vals = potential.sample(grid, p.m)
    dt_lam = time_derivative_matrix(n_t, dt) @ lam
    a = p.kappa**2 / (2.0 * p.m)
    c = p.internal_coefficient / 4.0  # (grad ln sqrt rho)^2 = (grad ln rho)^2 / 4
    G = space_gradient_matrix(grid) if internal else None
    total = 0.0
    for s in range(n_t):
        dl = phase_gradient(lam[s], grid)
        integrand = -a * dl**2 - v_vals - p.kappa * dt_lam[s]
        if internal:
            dr = G @ _floored_log(rho[s])
            integrand = integrand - c * dr**2
        total += wt[s] * np.dot(wx, rho[s] * integrand)
    return float(total)


def classical_action(traj: DiscreteTrajectory) -> float:
    """Time-space quadrature of rho{-(kappa^2/2m)(grad lam)^2 - V - kappa d_t lam}."""
    rho, lam = _stack(traj)
    return _hydro_action(rho, lam, traj.grid, traj.dt, traj.params, traj.potential, False)


def quantum_action(traj: DiscreteTrajectory) -> float:
    """Classical action plus the internal term 8 a^2 nu^2 m (grad ln sqrt rho)^2."""
    p = traj.params
    if abs(p.kappa - 4.0 * p.alpha * p.nu * p.m) > 1e-12 * p.kappa:
        raise ValueError("quantum action requires kappa = 4*alpha*nu*m")
    rho, lam = _stack(traj)
    return _hydro_action(rho, lam, traj.grid, traj.dt, traj.params, traj.potential, True)


def complex_action(
    psis: list[Wavefunction], dt: float, params: PhysicalParams, V: Potential
) -> complex:
    """Quadrature of psi* (i kappa d_t - H) psi over the same stencils."""
    if len(psis) < 3:
        raise ValueError("need at least 3 snapshots")
    grid = psis[0].grid
    wt = time_weights(len(psis), dt)
    wx = grid.quad_weights
    v_vals = V.sample(grid, params.m)
    psi = np.stack([wf.psi for wf in psis])
    dt_psi = time_derivative_matrix(len(psis), dt) @ psi
    total = 0.0 + 0.0j
    for s in range(len(psis)):
        h_psi = apply_hamiltonian(psi[s], grid, v_vals, params)
        total += wt[s] * np.dot(wx, np.conj(psi[s]) * (1j * params.kappa * dt_psi[s] - h_psi))
    return complex(total)


@dataclass(frozen=True)
class ActionGradient:
    """Functional-derivative fields at interior snapshots (index 1..T-2)."""

    d_rho: np.ndarray  # (T-2, n)
    d_lam: np.ndarray  # (T-2, n)


def action_gradient(traj: DiscreteTrajectory) -> ActionGradient:
    """Analytic gradient of quantum_action w.r.t. interior rho and lam samples.

    Valid where rho sits above the logarithm floor; floored samples have a
    clamped log derivative the formula does not model.
    """
    p = traj.params
    grid = traj.grid
    n_t = len(traj.snapshots)
    rho, lam = _stack(traj)
    wt = time_weights(n_t, traj.dt)
    wx = grid.quad_weights
    v_vals = traj.potential.sample(grid, p.m)
    Wt = time_derivative_matrix(n_t, traj.dt)
    G = space_gradient_matrix(grid)
    GT = G.T.tocsr()
    a = p.kappa**2 / (2.0 * p.m)
    c = p.internal_coefficient / 4.0
    dt_lam = Wt @ lam

    d_rho = np.empty((n_t - 2, grid.n))
    d_lam = np.empty((n_t - 2, grid.n))
    # kappa * sum_s wt_s rho_s Wt[s, q], all columns q at once
    time_term = p.kappa * (Wt.T @ (wt[:, None] * rho))
    for q in range(1, n_t - 1):
        dl = phase_gradient(lam[q], grid)
        dr = G @ _floored_log(rho[q])
        bracket = -a * dl**2 - c * dr**2 - v_vals - p.kappa * dt_lam[q]
        d_rho[q - 1] = bracket - 2.0 * c * (GT @ (wx * rho[q] * dr)) / (wx * rho[q])
        d_lam[q - 1] = -2.0 * a * (GT @ (wx * rho[q] * dl)) / wx - time_term[q] / wt[q]
    return ActionGradient(d_rho=d_rho, d_lam=d_lam)


def fd_action_gradient(traj: DiscreteTrajectory, eps: float = 1e-6) -> ActionGradient:
    """Central finite differences of quantum_action, as functional fields.

    O((T n)^2) action evaluations: test-sized trajectories only.
    """
    grid = traj.grid
    n_t = len(traj.snapshots)
    rho0, lam0 = _stack(traj)
    wt = time_weights(n_t, traj.dt)
    wx = grid.quad_weights
    d_rho = np.empty((n_t - 2, grid.n))
    d_lam = np.empty((n_t - 2, grid.n))

    def value(rho, lam):
        return _hydro_action(rho, lam, grid, traj.dt, traj.params, traj.potential, True)

    for q in range(1, n_t - 1):
        for z in range(grid.n):
            scale = 2 * eps * wt[q] * wx[z]
            rho = rho0.copy()
            rho[q, z] = rho0[q, z] + eps
            plus = value(rho, lam0)
            rho[q, z] = rho0[q, z] - eps
            d_rho[q - 1, z] = (plus - value(rho, lam0)) / scale
            lam = lam0.copy()
            lam[q, z] = lam0[q, z] + eps
            plus = value(rho0, lam)
            lam[q, z] = lam0[q, z] - eps
            d_lam[q - 1, z] = (plus - value(rho0, lam)) / scale
    return ActionGradient(d_rho=d_rho, d_lam=d_lam)
