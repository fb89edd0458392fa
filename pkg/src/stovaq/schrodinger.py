"""Linear wave-equation dynamics: Crank-Nicolson evolution and stationary states.

The discretized Hamiltonian is the real symmetric matrix
H = -(kappa^2/2m) L + diag(V) with L the 3-point Laplacian (cyclic on
periodic grids, Dirichlet on clamped ones). Crank-Nicolson is the Cayley
transform of H, so the norm and <H> are conserved to round-off; both are
acceptance criteria, which is why a splitting scheme was not used.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .grid import Grid1D, integrate_values
from .params import PhysicalParams, Potential

NORM_TOL = 1e-8
NORM_DRIFT_TOL = 1e-10


class NumericalError(RuntimeError):
    """A solver left its validity envelope (norm drift, singular system...)."""


@dataclass(frozen=True)
class Wavefunction:
    grid: Grid1D
    psi: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "psi", np.asarray(self.psi, dtype=np.complex128))
        if self.psi.shape != (self.grid.n,):
            raise ValueError("psi sample count does not match grid")
        if not np.all(np.isfinite(self.psi)):
            raise ValueError("psi contains non-finite samples")

    def norm_sq(self) -> float:
        return float(integrate_values(np.abs(self.psi) ** 2, self.grid))


def normalize(grid: Grid1D, psi: np.ndarray, t: float = 0.0) -> Wavefunction:
    psi = np.asarray(psi, dtype=np.complex128)
    nrm = integrate_values(np.abs(psi) ** 2, grid)
    if nrm <= 0:
        raise ValueError("cannot normalize the zero function")
    return Wavefunction(grid, psi / np.sqrt(nrm), t)


def _check_normalized(wf: Wavefunction):
    if abs(wf.norm_sq() - 1.0) > NORM_TOL:
        raise ValueError(f"wavefunction not normalized: |psi|^2 = {wf.norm_sq()}")


def laplacian_matrix(grid: Grid1D) -> sp.csr_matrix:
    n, inv = grid.n, 1.0 / grid.h**2
    main = np.full(n, -2.0 * inv)
    off = np.full(n - 1, inv)
    L = sp.diags([off, main, off], [-1, 0, 1], format="lil")
    if grid.periodic:
        L[0, n - 1] = inv
        L[n - 1, 0] = inv
    return L.tocsr()


def hamiltonian_matrix(grid: Grid1D, V: Potential, params: PhysicalParams) -> sp.csr_matrix:
    L = laplacian_matrix(grid)
    H = -(params.kappa**2 / (2.0 * params.m)) * L
    return (H + sp.diags(V.sample(grid, params.m))).tocsr()


def apply_hamiltonian(
    psi: np.ndarray, grid: Grid1D, v_vals: np.ndarray, params: PhysicalParams
) -> np.ndarray:
    """Matrix-free H psi with the same stencil as hamiltonian_matrix."""
    inv = 1.0 / grid.h**2
    if grid.periodic:
        lap = (np.roll(psi, -1) - 2.0 * psi + np.roll(psi, 1)) * inv
    else:
        lap = np.empty_like(psi)
        lap[1:-1] = (psi[2:] - 2.0 * psi[1:-1] + psi[:-2]) * inv
        lap[0] = (psi[1] - 2.0 * psi[0]) * inv
        lap[-1] = (psi[-2] - 2.0 * psi[-1]) * inv
    return -(params.kappa**2 / (2.0 * params.m)) * lap + v_vals * psi


def evolve(
    psi0: Wavefunction,
    V: Potential,
    params: PhysicalParams,
    dt: float,
    steps: int,
    store_every: int = 1,
) -> list[Wavefunction]:
    """Crank-Nicolson evolution; returns snapshots every `store_every` steps.

    The first snapshot is psi0 itself and the final state is always
    included (snapshots are uniformly spaced only when store_every divides
    steps). Norm drift beyond 1e-10 raises.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    _check_normalized(psi0)
    grid = psi0.grid
    H = hamiltonian_matrix(grid, V, params).tocsc()
    gamma = 1j * dt / (2.0 * params.kappa)
    eye = sp.identity(grid.n, dtype=np.complex128, format="csc")
    A = (eye + gamma * H).tocsc()
    B = (eye - gamma * H).tocsr()
    try:
        solver = splu(A)
    except RuntimeError as exc:  # singular factorization: bad dt or grid
        raise NumericalError(f"Crank-Nicolson factorization failed: {exc}") from exc

    psi = psi0.psi.copy()
    snaps = [Wavefunction(grid, psi.copy(), psi0.t)]
    for k in range(1, steps + 1):
        psi = solver.solve(B @ psi)
        if k % store_every == 0 or k == steps:
            snaps.append(Wavefunction(grid, psi.copy(), psi0.t + k * dt))
    drift = abs(integrate_values(np.abs(psi) ** 2, grid) - 1.0)
    if drift > NORM_DRIFT_TOL:
        raise NumericalError(f"norm drift {drift:.3e} exceeds {NORM_DRIFT_TOL}")
    return snaps


def stationary_states(
    V: Potential, params: PhysicalParams, grid: Grid1D, k: int
) -> list[tuple[float, Wavefunction]]:
    """Lowest-k eigenpairs of H, eigenvectors normalized under grid quadrature."""
    if not 1 <= k <= grid.n:
        raise ValueError("need 1 <= k <= n")
    H = hamiltonian_matrix(grid, V, params).toarray()
    try:
        evals, evecs = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    out = []
    for i in range(k):
        vec = evecs[:, i]
        vec = vec / np.sqrt(integrate_values(vec**2, grid))
        j = int(np.argmax(np.abs(vec)))
        if vec[j] < 0:  # fix the sign for reproducible output
            vec = -vec
        out.append((float(evals[i]), Wavefunction(grid, vec.astype(np.complex128))))
    return out
