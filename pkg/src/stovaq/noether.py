"""Conserved charges in hydrodynamic and operator form, and the
zero-variance eigenstate criterion.

Momentum carries an explicit factor kappa (P = integral rho * kappa grad lam)
and the internal-energy coefficient is 2 a^2 nu^2 m (grad ln rho)^2: those
are the normalizations under which the field-level charges coincide with
the operator expectations <(kappa/i) grad> and <H> on smooth states.
"""

from dataclasses import dataclass

import numpy as np

from .grid import gradient_values, integrate_values
from .madelung import MadelungPair, phase_gradient, log_density_gradient
from .params import PhysicalParams, Potential
from .schrodinger import Wavefunction, apply_hamiltonian

HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class ChargeSeries:
    times: np.ndarray
    P: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        if not (len(self.times) == len(self.P) == len(self.H)):
            raise ValueError("times, P, H must have equal lengths")
        for arr in (self.P, self.H):
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite charge values")


def momentum_hydro(mp: MadelungPair, params: PhysicalParams) -> float:
    return float(
        integrate_values(mp.rho * params.kappa * phase_gradient(mp.lam, mp.grid), mp.grid)
    )


def energy_hydro(mp: MadelungPair, params: PhysicalParams, V: Potential) -> float:
    """H = integral rho [ (m/2) u_T^2 + 2 a^2 nu^2 m (grad ln rho)^2 + V ]."""
    u_t = (params.kappa / params.m) * phase_gradient(mp.lam, mp.grid)
    dlr = log_density_gradient(mp.rho, mp.grid)
    coeff = 2.0 * params.alpha**2 * params.nu**2 * params.m
    v_vals = V.sample(mp.grid, params.m)
    dens = mp.rho * (0.5 * params.m * u_t**2 + coeff * dlr**2 + v_vals)
    return float(integrate_values(dens, mp.grid))


def _grad_psi(psi: np.ndarray, grid) -> np.ndarray:
    return gradient_values(psi, grid.h, grid.periodic)


def momentum_op(wf: Wavefunction, params: PhysicalParams) -> float:
    """< (kappa/i) grad >, imaginary part checked against HERMITICITY_TOL."""
    val = integrate_values(
        np.conj(wf.psi) * (params.kappa / 1j) * _grad_psi(wf.psi, wf.grid), wf.grid
    )
    scale = max(1.0, abs(val))
    if abs(val.imag) > HERMITICITY_TOL * scale:
        raise ValueError(f"momentum expectation not real: Im = {val.imag:.3e} (boundary mishandling?)")
    return float(val.real)


def energy_op(wf: Wavefunction, params: PhysicalParams, V: Potential) -> float:
    v_vals = V.sample(wf.grid, params.m)
    val = integrate_values(np.conj(wf.psi) * apply_hamiltonian(wf.psi, wf.grid, v_vals, params), wf.grid)
    scale = max(1.0, abs(val))
    if abs(val.imag) > HERMITICITY_TOL * scale:
        raise ValueError(f"energy expectation not real: Im = {val.imag:.3e} (boundary mishandling?)")
    return float(val.real)


def variance(wf: Wavefunction, operator: str, params: PhysicalParams, V: Potential = None) -> float:
    """<A^2> - <A>^2 for A in {P, H}; slightly negative round-off is clipped."""
    grid = wf.grid
    if operator == "P":
        a_psi = (params.kappa / 1j) * _grad_psi(wf.psi, grid)
        a2_psi = (params.kappa / 1j) * _grad_psi(a_psi, grid)
        mean = integrate_values(np.conj(wf.psi) * a_psi, grid)
    elif operator == "H":
        if V is None:
            raise ValueError("H variance needs the potential")
        v_vals = V.sample(grid, params.m)
        a_psi = apply_hamiltonian(wf.psi, grid, v_vals, params)
        a2_psi = apply_hamiltonian(a_psi, grid, v_vals, params)
        mean = integrate_values(np.conj(wf.psi) * a_psi, grid)
    else:
        raise ValueError("operator must be 'P' or 'H'")
    second = integrate_values(np.conj(wf.psi) * a2_psi, grid)
    var = (second - mean**2).real
    if var < -1e-10 * max(1.0, abs(second)):
        raise ValueError(f"variance {var:.3e} below round-off floor")
    return float(max(var, 0.0))


def charge_series(psi_traj: list[Wavefunction], params: PhysicalParams, V: Potential) -> ChargeSeries:
    times = np.array([wf.t for wf in psi_traj])
    P = np.array([momentum_op(wf, params) for wf in psi_traj])
    H = np.array([energy_op(wf, params, V) for wf in psi_traj])
    return ChargeSeries(times=times, P=P, H=H)
