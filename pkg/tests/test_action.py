import numpy as np
import pytest

from stovaq.action import (
    DiscreteTrajectory,
    action_gradient,
    classical_action,
    complex_action,
    fd_action_gradient,
    quantum_action,
    time_derivative_matrix,
    time_weights,
)
from stovaq.grid import Grid1D, RealField, integrate
from stovaq.madelung import MadelungPair, decompose
from stovaq.params import PhysicalParams, Potential
from stovaq.schrodinger import Wavefunction, evolve, normalize, stationary_states

P = PhysicalParams.from_alpha(m=1.0, kappa=1.0, alpha=0.5)
FREE = Potential.free()


def uniform_pair(grid, lam, t):
    rho = np.full(grid.n, 1.0 / grid.length)
    return MadelungPair(grid, rho, lam, t)


def smooth_pair(grid, t, seed=0):
    rng = np.random.default_rng(seed)
    x = grid.points
    k = 2 * np.pi / grid.length
    rho = 1.0 + 0.4 * np.sin(k * x + rng.uniform(0, 2 * np.pi)) + 0.2 * np.cos(2 * k * x)
    rho /= integrate(RealField(grid, rho))
    lam = 0.5 * np.cos(k * x + rng.uniform(0, 2 * np.pi)) + 0.1 * t
    return MadelungPair(grid, rho, lam, t)


class TestClassicalAction:
    def test_uniform_static_zero(self):
        grid = Grid1D(0.0, 2.0, 32, "periodic")
        snaps = [uniform_pair(grid, np.zeros(grid.n), 0.1 * s) for s in range(4)]
        traj = DiscreteTrajectory(snaps, 0.1, P, FREE)
        assert classical_action(traj) == pytest.approx(0.0, abs=1e-14)

    def test_energy_phase_closed_form(self):
        # lam = -E t / kappa on a uniform density: I = E (t_F - t_I) exactly
        grid = Grid1D(0.0, 3.0, 48, "periodic")
        E, dt, n_t = 0.8, 0.05, 9
        snaps = [
            uniform_pair(grid, np.full(grid.n, -E * s * dt / P.kappa), s * dt)
            for s in range(n_t)
        ]
        traj = DiscreteTrajectory(snaps, dt, P, FREE)
        assert classical_action(traj) == pytest.approx(E * dt * (n_t - 1), rel=1e-12)

    def test_plane_wave_on_shell_cancels(self):
        # lam = k x - (kappa k^2/2m) t: kinetic and phase terms cancel pointwise
        grid = Grid1D(0.0, 8.0, 64, "periodic")
        k = 2 * np.pi * 2 / grid.length
        dt = 0.02
        snaps = [
            uniform_pair(grid, k * grid.points - (P.kappa * k**2 / (2 * P.m)) * s * dt, s * dt)
            for s in range(5)
        ]
        traj = DiscreteTrajectory(snaps, dt, P, FREE)
        assert classical_action(traj) == pytest.approx(0.0, abs=1e-12)


class TestQuantumAction:
    def test_uniform_density_reduces_to_classical(self):
        grid = Grid1D(0.0, 5.0, 40, "periodic")
        snaps = [uniform_pair(grid, np.sin(2 * np.pi * grid.points / 5.0) * 0.3, 0.1 * s) for s in range(4)]
        traj = DiscreteTrajectory(snaps, 0.1, P, FREE)
        assert quantum_action(traj) == pytest.approx(classical_action(traj), rel=1e-12)

    def test_harmonic_ground_state_on_shell_zero(self):
        # rho the ground Gaussian, lam = -omega t / 2: all terms cancel
        omega = 1.0
        grid = Grid1D(-8.0, 8.0, 512, "clamped")
        sig2 = P.kappa / (2 * P.m * omega)
        rho = np.exp(-(grid.points**2) / (2 * sig2))
        rho /= integrate(RealField(grid, rho))
        dt, n_t = 0.01, 7
        snaps = [
            MadelungPair(grid, rho, np.full(grid.n, -0.5 * omega * s * dt), s * dt)
            for s in range(n_t)
        ]
        traj = DiscreteTrajectory(snaps, dt, P, Potential.harmonic(omega))
        duration = dt * (n_t - 1)
        assert abs(quantum_action(traj)) / duration < 1e-6

    def test_internal_coefficient_identity(self):
        params = PhysicalParams.from_alpha(m=2.2, kappa=0.7, alpha=0.31)
        assert 8 * params.alpha**2 * params.nu**2 * params.m == pytest.approx(
            params.kappa**2 / (2 * params.m), rel=1e-12
        )


class TestComplexAction:
    def test_stationary_eigenstate_cancels(self):
        omega = 1.0
        grid = Grid1D(-8.0, 8.0, 256, "clamped")
        V = Potential.harmonic(omega)
        energy, wf = stationary_states(V, P, grid, 1)[0]
        dt, n_t = 0.003, 9
        snaps = [
            Wavefunction(grid, wf.psi * np.exp(-1j * energy * s * dt / P.kappa), s * dt)
            for s in range(n_t)
        ]
        val = complex_action(snaps, dt, P, V)
        assert abs(val) < 1e-6

    def test_real_part_matches_quantum_action_under_refinement(self):
        # same coherent history through both evaluators; mismatch is pure
        # discretization and must shrink ~4x when h and the snapshot dt halve
        omega = 1.0
        V = Potential.harmonic(omega)
        gaps = []
        for n, steps in ((128, 40), (256, 80)):
            grid = Grid1D(-9.0, 9.0, n, "periodic")
            sig2 = P.kappa / (2 * P.m * omega)
            psi0 = normalize(grid, np.exp(-((grid.points - 0.8) ** 2) / (4 * sig2)))
            dt = 0.8 / steps
            snaps = evolve(psi0, V, P, dt=dt, steps=steps, store_every=4)
            traj = DiscreteTrajectory.from_wavefunctions(snaps, P, V)
            gaps.append(abs(complex_action(snaps, traj.dt, P, V).real - quantum_action(traj)))
        assert gaps[1] < gaps[0] / 2.5

    def test_imaginary_part_vanishes_for_norm_preserving(self):
        grid = Grid1D(0.0, 6.0, 64, "periodic")
        k = 2 * np.pi / 6.0
        psi = np.exp(1j * k * grid.points) / np.sqrt(6.0)
        snaps = [Wavefunction(grid, psi, 0.05 * s) for s in range(5)]
        assert abs(complex_action(snaps, 0.05, P, FREE).imag) < 1e-12


class TestActionGradient:
    def small_traj(self, n=16, n_t=5, seed=3):
        grid = Grid1D(0.0, 4.0, n, "periodic")
        snaps = [smooth_pair(grid, 0.05 * s, seed + s) for s in range(n_t)]
        return DiscreteTrajectory(snaps, 0.05, P, FREE)

    def test_matches_finite_differences(self):
        traj = self.small_traj()
        g = action_gradient(traj)
        fd = fd_action_gradient(traj, eps=2e-6)
        scale = np.max(np.abs(fd.d_rho))
        assert np.max(np.abs(g.d_rho - fd.d_rho)) < 1e-6 * scale
        scale = np.max(np.abs(fd.d_lam))
        assert np.max(np.abs(g.d_lam - fd.d_lam)) < 1e-6 * scale

    def test_taylor_remainder_quadratic(self):
        traj = self.small_traj(seed=11)
        g = action_gradient(traj)
        base = quantum_action(traj)
        rng = np.random.default_rng(7)
        delta = rng.standard_normal((3, traj.grid.n))
        wт = time_weights(5, traj.dt)[1:4]
        wx = traj.grid.quad_weights
        inner = float(np.sum(wт[:, None] * wx[None, :] * g.d_lam * delta))

        def perturbed(eps):
            snaps = list(traj.snapshots)
            for q in (1, 2, 3):
                mp = snaps[q]
                snaps[q] = MadelungPair(mp.grid, mp.rho, mp.lam + eps * delta[q - 1], mp.t)
            return quantum_action(DiscreteTrajectory(snaps, traj.dt, P, FREE))

        rems = [abs(perturbed(eps) - base - eps * inner) for eps in (1e-3, 5e-4)]
        assert 3.4 < rems[0] / rems[1] < 4.6  # halving eps quarters the remainder

    def test_global_phase_shift_is_flat_direction(self):
        # lam -> lam + c: the action is exactly invariant, and per-snapshot
        # space integrals of d_lam vanish (charge conservation)
        traj = self.small_traj(seed=19)
        shifted = DiscreteTrajectory(
            [MadelungPair(mp.grid, mp.rho, mp.lam + 3.7, mp.t) for mp in traj.snapshots],
            traj.dt,
            P,
            FREE,
        )
        assert quantum_action(shifted) == pytest.approx(quantum_action(traj), rel=1e-12)
        g = action_gradient(traj)
        wx = traj.grid.quad_weights
        for q in range(g.d_lam.shape[0]):
            assert abs(np.dot(wx, g.d_lam[q])) < 1e-10


class TestStationarity:
    # the quantum-potential stencil error grows ~(x-x_c)^4 into the Gaussian
    # tail, so the max-norm is taken where rho carries actual weight
    MASK_REL = 3e-2

    def solved_gradient(self, n, steps):
        omega = 1.0
        V = Potential.harmonic(omega)
        grid = Grid1D(-9.0, 9.0, n, "periodic")
        sig2 = P.kappa / (2 * P.m * omega)
        psi0 = normalize(grid, np.exp(-((grid.points - 0.8) ** 2) / (4 * sig2)))
        dt = 0.8 / steps
        snaps = evolve(psi0, V, P, dt=dt, steps=steps, store_every=4)
        traj = DiscreteTrajectory.from_wavefunctions(snaps, P, V)
        g = action_gradient(traj)
        rho = np.stack([mp.rho for mp in traj.snapshots[1:-1]])
        mask = rho > self.MASK_REL * rho.max()
        gnorm = max(np.max(np.abs(g.d_rho[mask])), np.max(np.abs(g.d_lam[mask])))
        return traj, g, mask, gnorm

    def test_schrodinger_solution_is_stationary(self):
        traj, g, mask, gnorm = self.solved_gradient(1024, 320)
        assert gnorm <= 1e-3

        # 1e-2 phase perturbation: gradient must jump by >= 50x
        rng = np.random.default_rng(13)
        q_mode = 8
        snaps = list(traj.snapshots)
        for s in range(1, len(snaps) - 1):
            mp = snaps[s]
            bump = 1e-2 * np.sin(q_mode * 2 * np.pi * mp.grid.points / mp.grid.length + rng.uniform(0, np.pi))
            snaps[s] = MadelungPair(mp.grid, mp.rho, mp.lam + bump, mp.t)
        bent = DiscreteTrajectory(snaps, traj.dt, traj.params, traj.potential)
        gb = action_gradient(bent)
        bent_norm = max(np.max(np.abs(gb.d_rho[mask])), np.max(np.abs(gb.d_lam[mask])))
        assert bent_norm >= 50 * gnorm

    def test_gradient_decays_second_order(self):
        _, _, _, coarse = self.solved_gradient(256, 80)
        _, _, _, fine = self.solved_gradient(512, 160)
        assert fine < coarse / 2.5
