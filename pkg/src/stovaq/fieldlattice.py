"""Free/massive scalar field on a periodic 1D lattice.

The field configuration is a vector phi of site values; the quadratic form
K = -Lap + mu^2 I (second differences scaled 1/dx^2) fixes the mode
spectrum omega_k = c sqrt(eig K). In the functional picture the state is a
Gaussian in phi with width matrix A = (dx/(kappa c)) K^{1/2}; its energy
density is site-independent exactly when A solves the eigenvalue problem,
and the ground energy is (kappa/2) sum omega_k.

Sampling the ground density |Psi_0|^2 uses an overdamped field-space walk
dphi = -2 nu_f A phi dtau + sqrt(2 nu_f dtau) xi whose drift is a pure
gradient (the functional-space flow is irrotational by construction) and
whose stationary law is the Gaussian itself, for every nu_f.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

PURPOSE_FIELD = 3
EXPLOSION_SCALE = 1e8


@dataclass(frozen=True)
class LatticeFieldSystem:
    n_sites: int
    dx: float
    c: float
    kappa: float
    mu: float
    K: np.ndarray

    @property
    def has_zero_mode(self) -> bool:
        return self.mu == 0.0


@dataclass(frozen=True)
class GaussianGroundState:
    A: np.ndarray  # width matrix, Psi0 ~ exp(-phi^T A phi / 2)
    mode_frequencies: np.ndarray
    E0: float


def build_system(n_sites: int, dx: float, c: float, kappa: float, mu: float) -> LatticeFieldSystem:
    if n_sites < 1:
        raise ValueError("need at least one site")
    for name, val in (("dx", dx), ("c", c), ("kappa", kappa)):
        if val <= 0:
            raise ValueError(f"{name} must be positive")
    if mu < 0:
        raise ValueError("mu must be non-negative")
    n = n_sites
    K = np.zeros((n, n))
    idx = np.arange(n)
    np.add.at(K, (idx, idx), 2.0 / dx**2 + mu**2)
    np.add.at(K, (idx, (idx + 1) % n), -1.0 / dx**2)
    np.add.at(K, (idx, (idx - 1) % n), -1.0 / dx**2)
    if not np.array_equal(K, K.T):
        raise AssertionError("quadratic form lost symmetry")
    return LatticeFieldSystem(n_sites=n, dx=dx, c=c, kappa=kappa, mu=mu, K=K)


def normal_modes(system: LatticeFieldSystem) -> np.ndarray:
    """omega_k = c sqrt(eig K), ascending; a zero mode appears iff mu = 0."""
    evals = np.linalg.eigvalsh(system.K)
    if evals[0] < -1e-12 * max(1.0, abs(evals[-1])):
        raise ValueError(f"quadratic form not positive semidefinite: {evals[0]}")
    return system.c * np.sqrt(np.maximum(evals, 0.0))


def ground_state(system: LatticeFieldSystem) -> GaussianGroundState:
    if system.has_zero_mode:
        raise ValueError("massless lattice has a flat zero mode; ground state needs mu > 0")
    evals, Q = np.linalg.eigh(system.K)
    if evals[0] <= 0:
        raise ValueError("quadratic form must be positive definite")
    sqrt_k = (Q * np.sqrt(evals)) @ Q.T
    A = (system.dx / (system.kappa * system.c)) * sqrt_k
    A = 0.5 * (A + A.T)
    omegas = system.c * np.sqrt(evals)
    return GaussianGroundState(
        A=A,
        mode_frequencies=omegas,
        E0=float(0.5 * system.kappa * omegas.sum()),
    )


def local_energy(gs: GaussianGroundState, phi: np.ndarray, system: LatticeFieldSystem) -> float:
    """(H Psi)[phi] / Psi[phi] for the Gaussian ansatz; constant iff gs is exact."""
    phi = np.asarray(phi, dtype=np.float64)
    kin = system.kappa**2 * system.c**2 / (2.0 * system.dx)
    a_phi = gs.A @ phi
    return float(
        kin * np.trace(gs.A)
        + 0.5 * system.dx * phi @ (system.K @ phi)
        - kin * (a_phi @ a_phi)
    )


def ground_covariance(system: LatticeFieldSystem) -> np.ndarray:
    """Exact <phi_i phi_j> under |Psi_0|^2: (kappa c / 2 dx) K^{-1/2}."""
    evals, Q = np.linalg.eigh(system.K)
    if evals[0] <= 0:
        raise ValueError("covariance needs a positive definite quadratic form")
    inv_sqrt = (Q / np.sqrt(evals)) @ Q.T
    return (system.kappa * system.c / (2.0 * system.dx)) * inv_sqrt


def relaxation_rates(gs: GaussianGroundState, nu_f: float) -> tuple[float, float]:
    """(slowest, fastest) drift rates 2 nu_f eig(A) of the sampling walk."""
    evals = np.linalg.eigvalsh(gs.A)
    return 2.0 * nu_f * evals[0], 2.0 * nu_f * evals[-1]


def sampler_plan(gs: GaussianGroundState, nu_f: float = 1.0) -> tuple[float, int, int]:
    """Default (dtau, stride, burn_in) used by sample_ground_ensemble."""
    theta_min, theta_max = relaxation_rates(gs, nu_f)
    dtau = 0.003 / theta_max  # Euler bias <= 0.15% of the stationary variance
    stride = max(1, int(np.ceil(0.75 / (theta_min * dtau))))
    burn = int(np.ceil(4.0 / (theta_min * dtau)))
    return dtau, stride, burn


def sample_ground_ensemble(
    gs: GaussianGroundState,
    system: LatticeFieldSystem,
    count: int,
    burn_in: int,
    noise_seed: int,
    nu_f: float = 1.0,
    dtau: float = None,
    stride: int = None,
    chains: int = None,
) -> np.ndarray:
    """Post-burn-in snapshots of the field-space walk, stationary on |Psi_0|^2.

    `burn_in` and `stride` count steps; defaults resolve the slowest mode.
    Chains run independent substreams, so the pooled result is independent
    of how they are scheduled.
    """
    if system.has_zero_mode:
        raise ValueError("sampling needs mu > 0")
    if count < 1:
        raise ValueError("count must be positive")
    plan_dtau, plan_stride, _ = sampler_plan(gs, nu_f)
    if dtau is None:
        dtau = plan_dtau
    if stride is None:
        stride = plan_stride
    if chains is None:
        chains = min(count, 1000)
    n_keep = -(-count // chains)  # ceil
    drift = 2.0 * nu_f * gs.A
    sigma = float(np.sqrt(2.0 * nu_f * dtau))
    phi0 = np.zeros((chains, system.n_sites))
    chain_streams = np.arange(chains, dtype=np.uint64)
    key = kernels.derive_key(noise_seed, PURPOSE_FIELD)
    out = np.empty((chains, n_keep, system.n_sites))
    kernels.ou_chains(
        phi0, drift, dtau, int(burn_in), n_keep, int(stride), key, chain_streams, sigma, out
    )
    samples = out.reshape(chains * n_keep, system.n_sites)[:count]
    scale = float(np.sqrt(np.trace(ground_covariance(system)) / system.n_sites))
    if not np.all(np.isfinite(samples)) or np.abs(samples).max() > EXPLOSION_SCALE * scale:
        raise RuntimeError("field-space step too large: samples diverged")
    return samples


def effective_sample_count(
    gs: GaussianGroundState, count: int, nu_f: float, dtau: float, stride: int
) -> float:
    """Pooled sample count deflated by the within-chain autocorrelation."""
    theta_min, _ = relaxation_rates(gs, nu_f)
    rho = float(np.exp(-theta_min * stride * dtau))
    tau_int = (1.0 + rho) / (1.0 - rho)
    return count / tau_int


def two_point(ensemble: np.ndarray) -> np.ndarray:
    """Mean-subtracted sample covariance <phi_i phi_j> of the ensemble."""
    ensemble = np.asarray(ensemble, dtype=np.float64)
    if ensemble.ndim != 2 or ensemble.shape[0] < 1000:
        raise ValueError("need at least 1000 field samples")
    centered = ensemble - ensemble.mean(axis=0)
    return centered.T @ centered / (ensemble.shape[0] - 1)
