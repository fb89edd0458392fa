"""Independent numerical oracles used by the test suite.

Nothing here imports the implementation paths it is used to check.
"""

import numpy as np


def dense_lattice_ground_energy(K: np.ndarray, dx: float, c: float, kappa: float,
                                n_levels: int = 14) -> float:
    """Ground energy of H = sum_i -(kappa^2 c^2 / 2 dx) d^2/dphi_i^2 + (dx/2) phi^T K phi
    by brute-force diagonalization in a truncated product-Hermite basis.

    Site-local reference oscillators (diagonal part of the quadratic form)
    fix the basis; couplings enter through ladder-operator position matrices.
    No mode decomposition of K is used anywhere.
    """
    n = K.shape[0]
    a_coef = kappa**2 * c**2 / dx  # H_kin = (a/2) p_i^2 with p = -i d/dphi
    B = dx * K

    ident = np.eye(n_levels)
    lower = np.diag(np.sqrt(np.arange(1, n_levels)), 1)
    raise_ = lower.T

    x_mats, p2_mats = [], []
    for i in range(n):
        w_ref = np.sqrt(a_coef * B[i, i])
        x = np.sqrt(a_coef / (2.0 * w_ref)) * (lower + raise_)
        minus = raise_ - lower
        p2 = -(w_ref / (2.0 * a_coef)) * (minus @ minus)
        x_mats.append(x)
        p2_mats.append(p2)

    def embed(op, site):
        mats = [ident] * n
        mats[site] = op
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    dim = n_levels**n
    H = np.zeros((dim, dim))
    for i in range(n):
        H += 0.5 * a_coef * embed(p2_mats[i], i)
        H += 0.5 * B[i, i] * embed(x_mats[i] @ x_mats[i], i)
    for i in range(n):
        for j in range(i + 1, n):
            if B[i, j] != 0.0:
                H += B[i, j] * embed(x_mats[i], i) @ embed(x_mats[j], j)
    return float(np.linalg.eigvalsh(H)[0])


def dft_mode_frequencies(n_sites: int, dx: float, c: float, mu: float) -> np.ndarray:
    """Closed-form spectrum of the periodic lattice: the discrete Fourier
    modes diagonalize -Lap, giving w_j = c sqrt(mu^2 + (4/dx^2) sin^2(pi j/n))."""
    j = np.arange(n_sites)
    return np.sort(c * np.sqrt(mu**2 + (4.0 / dx**2) * np.sin(np.pi * j / n_sites) ** 2))
