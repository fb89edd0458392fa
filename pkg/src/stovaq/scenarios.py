"""The five verification pipelines behind the CLI.

Each scenario builds its objects from a validated config, runs the
relevant solve/sample/compare chain, writes the documented CSV files and
returns a RunReport whose metrics carry explicit tolerances.
"""

import numpy as np

from . import __version__, kernels
from . import madelung as md
from . import noether
from . import stochastic as st
from . import fieldlattice as fl
from .config import Field
from .entropy import maximize_entropy
from .grid import Grid1D, RealField, integrate, l1_distance
from .params import PhysicalParams, Potential
from .report import RunReport, write_csv
from .schrodinger import evolve, normalize, stationary_states

_PHYS = {
    "m": Field(float, 1.0, positive=True),
    "kappa": Field(float, 1.0, positive=True),
    "alpha": Field(float, 0.5, positive=True),
    "nu": Field(float, None, positive=True),
    "seed": Field(int, required=True),
}

SCHEMAS = {
    "coherent_oscillator": {
        **_PHYS,
        "grid_n": Field(int, 512, minimum=8),
        "x_min": Field(float, -8.0),
        "x_max": Field(float, 8.0),
        "omega": Field(float, 1.0, positive=True),
        "displacement": Field(float, 1.0),
        "steps": Field(int, 1024, minimum=8),
        "snapshot_every": Field(int, 8, minimum=1),
        "trajectories": Field(int, 100_000, minimum=100),
        "comparison_n": Field(int, 128, minimum=8),
    },
    "free_packet": {
        **_PHYS,
        "grid_n": Field(int, 1024, minimum=8),
        "x_min": Field(float, -24.0),
        "x_max": Field(float, 24.0),
        "sigma0": Field(float, 1.5, positive=True),
        "momentum_mode": Field(int, 2, minimum=1),  # nonzero so P != 0 and drift is relative
        "duration": Field(float, 6.0, positive=True),
        "steps": Field(int, 1200, minimum=8),
        "snapshot_every": Field(int, 12, minimum=1),
    },
    "stationary_state": {
        **_PHYS,
        "grid_n": Field(int, 512, minimum=8),
        "x_min": Field(float, -8.0),
        "x_max": Field(float, 8.0),
        "omega": Field(float, 1.0, positive=True),
        "levels": Field(int, 6, minimum=1),
        "evolve_steps": Field(int, 1000, minimum=1),
        "dt": Field(float, 0.006, positive=True),
    },
    "entropy_demo": {
        "seed": Field(int, required=True),
        "grid_n": Field(int, 64, minimum=8),
        "tolerance": Field(float, 1e-8, positive=True),
        "max_iter": Field(int, 200_000, minimum=1),
    },
    "field_ground": {
        "seed": Field(int, required=True),
        "n_sites": Field(int, 8, minimum=1),
        "dx": Field(float, 1.0, positive=True),
        "c": Field(float, 1.0, positive=True),
        "kappa": Field(float, 1.0, positive=True),
        "mu": Field(float, 1.0, positive=True),
        "nu_f": Field(float, 1.0, positive=True),
        "samples": Field(int, 100_000, minimum=1000),
        "chains": Field(int, 1000, minimum=1),
    },
}


def _params(cfg) -> PhysicalParams:
    return PhysicalParams(m=cfg["m"], kappa=cfg["kappa"], alpha=cfg["alpha"], nu=cfg["nu"])


def _report(cfg) -> RunReport:
    return RunReport(
        scenario=cfg["scenario"],
        seed=cfg["seed"],
        backend=kernels.backend_name(),
        code_version=__version__,
        config=cfg,
    )


def coherent_state(grid: Grid1D, params: PhysicalParams, omega: float, x0: float):
    """Ground-state Gaussian displaced by x0: width^2 = kappa/(2 m omega)."""
    sig2 = params.kappa / (2.0 * params.m * omega)
    return normalize(grid, np.exp(-((grid.points - x0) ** 2) / (4.0 * sig2)))


def drift_interpolants(snaps, params):
    """Decompose a wavefunction trajectory into (uF, uB) interpolants."""
    times = [s.t for s in snaps]
    uFs, uBs = [], []
    grid = snaps[0].grid
    for s in snaps:
        d = md.drifts(md.decompose(s), params)
        uFs.append(RealField(grid, d.uF))
        uBs.append(RealField(grid, d.uB))
    return (
        st.DriftInterpolant.from_fields(uFs, times),
        st.DriftInterpolant.from_fields(uBs, times),
    )


def resample_density(values: np.ndarray, src: Grid1D, dst: Grid1D) -> RealField:
    ref = np.interp(dst.points, src.points, values)
    f = RealField(dst, ref)
    return RealField(dst, ref / integrate(f))


def consistency_error(snaps, params) -> float:
    """Max violation of uF - uB = 2 nu grad ln rho over decomposed snapshots."""
    worst = 0.0
    for s in snaps:
        mp = md.decompose(s)
        d = md.drifts(mp, params)
        target = 2.0 * params.nu * md.log_density_gradient(mp.rho, mp.grid)
        worst = max(worst, float(np.max(np.abs(d.uF - d.uB - target))))
    return worst


def _euler_refinement(params, omega, x0, resolutions, x_min, x_max):
    """Masked Euler-residual max-norm of a short coherent solve per resolution.

    dt refines with h and the residual is evaluated at one fixed physical
    time, so successive rows shrink ~4x (second order).
    """
    rows = []
    V = Potential.harmonic(omega)
    t_mid = 0.16 / omega
    for n in resolutions:
        grid = Grid1D(x_min, x_max, n, "clamped")
        dt = 0.02 * (256.0 / n)
        mid = max(1, round(t_mid / dt))
        psi0 = coherent_state(grid, params, omega, x0)
        snaps = evolve(psi0, V, params, dt=dt, steps=mid + 1, store_every=1)
        pairs = [md.decompose(s) for s in snaps[mid - 1 : mid + 2]]
        residual = md.euler_residual(pairs, params, V)[0]
        mask = pairs[1].rho > 1e-2 * pairs[1].rho.max()
        rows.append((grid.h, dt, float(np.max(np.abs(residual.values[mask])))))
    return rows


def action_stationarity_ratio(snaps, params, V):
    """Masked gradient norm of the decomposed history, and its ratio
    against a 1e-2 phase-perturbed copy (stationarity discriminator)."""
    from .action import DiscreteTrajectory, action_gradient
    from .madelung import MadelungPair

    traj = DiscreteTrajectory.from_wavefunctions(snaps, params, V)
    rho = np.stack([mp.rho for mp in traj.snapshots[1:-1]])
    mask = rho > 3e-2 * rho.max()

    def norm(t):
        g = action_gradient(t)
        return max(float(np.max(np.abs(g.d_rho[mask]))), float(np.max(np.abs(g.d_lam[mask]))))

    on_shell = norm(traj)
    grid = traj.grid
    # well-resolved high-mode probe so the response clears the O(h^2+dt^2)
    # floor of the on-shell gradient by a wide margin
    bump = 1e-2 * np.sin(48 * np.pi * grid.points / grid.length)
    bent = [traj.snapshots[0]]
    for mp in traj.snapshots[1:-1]:
        bent.append(MadelungPair(grid, mp.rho, mp.lam + bump, mp.t))
    bent.append(traj.snapshots[-1])
    perturbed = norm(DiscreteTrajectory(bent, traj.dt, params, V))
    return on_shell, perturbed / on_shell


def run_coherent_oscillator(cfg, out_dir) -> RunReport:
    params = _params(cfg)
    omega = cfg["omega"]
    grid = Grid1D(cfg["x_min"], cfg["x_max"], cfg["grid_n"], "clamped")
    V = Potential.harmonic(omega)
    period = 2.0 * np.pi / omega
    steps = cfg["steps"]
    dt = period / steps

    psi0 = coherent_state(grid, params, omega, cfg["displacement"])
    snaps = evolve(psi0, V, params, dt=dt, steps=steps, store_every=cfg["snapshot_every"])
    norm_drift = abs(snaps[-1].norm_sq() - 1.0)
    interp_f, interp_b = drift_interpolants(snaps, params)

    # checkpoints snapped to stored snapshots so densities can be compared
    every = cfg["snapshot_every"]
    checkpoints = sorted(
        {min(steps, max(every, round(f * steps / every) * every)) for f in (0.25, 0.5, 0.75, 1.0)}
    )
    noise = st.NoiseParams(nu=params.nu, master_seed=cfg["seed"])
    rho0 = RealField(grid, np.abs(snaps[0].psi) ** 2)
    ens0 = st.sample_initial(rho0, cfg["trajectories"], noise)
    fwd = [ens0] + st.run_forward(ens0, interp_f, dt, steps, noise, checkpoints)

    noise_b = st.NoiseParams(nu=params.nu, master_seed=cfg["seed"] + 1)
    rho_t = RealField(grid, np.abs(snaps[-1].psi) ** 2)
    end = st.sample_initial(rho_t, cfg["trajectories"], noise_b)
    end = st.Ensemble(end.positions, period, end.streams)
    bwd = [end] + st.run_backward(end, interp_b, -dt, steps, noise_b, checkpoints)

    cmp_grid = Grid1D(cfg["x_min"], cfg["x_max"], cfg["comparison_n"], "clamped")
    snap_at = {round(s.t / dt): s for s in snaps}

    def l1_at(ens):
        ref = resample_density(np.abs(snap_at[round(ens.t / dt)].psi) ** 2, grid, cmp_grid)
        return l1_distance(st.empirical_density(ens, cmp_grid), ref)

    l1_f = {e.t: l1_at(e) for e in fwd}
    l1_b = {e.t: l1_at(e) for e in bwd}

    charges = noether.charge_series(snaps, params, V)
    h_drift = float(np.max(np.abs(charges.H - charges.H[0])) / abs(charges.H[0]))

    rows = []
    for e_f, e_b in zip(fwd, reversed(bwd)):
        t = e_f.t
        ref = resample_density(np.abs(snap_at[round(t / dt)].psi) ** 2, grid, cmp_grid)
        emp_f = st.empirical_density(e_f, cmp_grid)
        emp_b = st.empirical_density(e_b, cmp_grid)
        for i, x in enumerate(cmp_grid.points):
            rows.append((t, x, ref.values[i], emp_f.values[i], emp_b.values[i]))
    report = _report(cfg)
    report.csv_files.append(
        write_csv(out_dir, "densities.csv",
                  ["t", "x", "rho_schrodinger", "rho_forward", "rho_backward"], rows).name
    )
    report.csv_files.append(
        write_csv(out_dir, "charges.csv", ["t", "P", "H"],
                  zip(charges.times, charges.P, charges.H)).name
    )
    conv = _euler_refinement(params, omega, cfg["displacement"], (128, 256, 512),
                             cfg["x_min"], cfg["x_max"])
    report.csv_files.append(
        write_csv(out_dir, "convergence.csv", ["h", "dt", "euler_residual_max"], conv).name
    )

    report.add("l1_forward_max", max(l1_f.values()), 0.05)
    report.add("l1_backward_max", max(l1_b.values()), 0.05)
    report.add("energy_drift_rel", h_drift, 1e-8)
    report.add("norm_drift", norm_drift, 1e-10)
    report.add("consistency_max", consistency_error(snaps[:: max(1, len(snaps) // 8)], params), 1e-12)
    on_shell, ratio = action_stationarity_ratio(snaps, params, V)
    report.add("action_gradient_max", on_shell, 0.02)
    report.add("action_perturbation_ratio", ratio, 50.0, comparator=">=")
    return report


def run_free_packet(cfg, out_dir) -> RunReport:
    params = _params(cfg)
    grid = Grid1D(cfg["x_min"], cfg["x_max"], cfg["grid_n"], "periodic")
    V = Potential.free()
    k0 = 2.0 * np.pi * cfg["momentum_mode"] / grid.length
    s0 = cfg["sigma0"]
    x = grid.points
    xc = 0.5 * (cfg["x_min"] + cfg["x_max"])
    psi0 = normalize(grid, np.exp(-((x - xc) ** 2) / (4.0 * s0**2)) * np.exp(1j * k0 * x))
    dt = cfg["duration"] / cfg["steps"]
    snaps = evolve(psi0, V, params, dt=dt, steps=cfg["steps"], store_every=cfg["snapshot_every"])
    norm_drift = abs(snaps[-1].norm_sq() - 1.0)

    charges = noether.charge_series(snaps, params, V)
    p_drift = float(np.max(np.abs(charges.P - charges.P[0])) / abs(charges.P[0]))
    h_drift = float(np.max(np.abs(charges.H - charges.H[0])) / abs(charges.H[0]))

    # spreading law: Var(t) = s0^2 + (kappa t / (2 m s0))^2
    rows, spread_err = [], 0.0
    for wf in snaps:
        rho = np.abs(wf.psi) ** 2
        mean = integrate(RealField(grid, rho * x))
        var = integrate(RealField(grid, rho * (x - mean) ** 2))
        var_exact = s0**2 + (params.kappa * wf.t / (2.0 * params.m * s0)) ** 2
        spread_err = max(spread_err, abs(var / var_exact - 1.0))
        rows.append((wf.t, var, var_exact))

    report = _report(cfg)
    report.csv_files.append(
        write_csv(out_dir, "charges.csv", ["t", "P", "H"],
                  zip(charges.times, charges.P, charges.H)).name
    )
    report.csv_files.append(
        write_csv(out_dir, "spreading.csv", ["t", "var_numeric", "var_analytic"], rows).name
    )
    report.add("momentum_drift_rel", p_drift, 1e-8)
    report.add("energy_drift_rel", h_drift, 1e-8)
    report.add("norm_drift", norm_drift, 1e-10)
    report.add("spreading_rel_err", spread_err, 1e-3)
    return report


def run_stationary_state(cfg, out_dir) -> RunReport:
    params = _params(cfg)
    omega = cfg["omega"]
    grid = Grid1D(cfg["x_min"], cfg["x_max"], cfg["grid_n"], "clamped")
    V = Potential.harmonic(omega)
    pairs = stationary_states(V, params, grid, cfg["levels"])

    rows, rel_err, res_max = [], 0.0, 0.0
    from .schrodinger import hamiltonian_matrix

    H = hamiltonian_matrix(grid, V, params)
    for n, (energy, wf) in enumerate(pairs):
        exact = params.kappa * omega * (n + 0.5)
        rel = abs(energy / exact - 1.0)
        rel_err = max(rel_err, rel)
        residual = np.linalg.norm(H @ wf.psi - energy * wf.psi) / np.linalg.norm(wf.psi)
        res_max = max(res_max, float(residual))
        rows.append((n, energy, exact, rel))

    e0, ground = pairs[0]
    var_h = noether.variance(ground, "H", params, V)
    snaps = evolve(ground, V, params, dt=cfg["dt"], steps=cfg["evolve_steps"], store_every=cfg["evolve_steps"])
    dens_drift = float(np.max(np.abs(np.abs(snaps[-1].psi) ** 2 - np.abs(snaps[0].psi) ** 2)))
    norm_drift = abs(snaps[-1].norm_sq() - 1.0)

    report = _report(cfg)
    report.csv_files.append(
        write_csv(out_dir, "spectrum.csv", ["level", "energy", "energy_exact", "rel_error"], rows).name
    )
    report.add("eigenvalue_rel_err", rel_err, 1e-3)
    report.add("eigen_residual_max", res_max, 1e-8)
    report.add("var_h_ground", var_h, 1e-8)
    report.add("density_stationarity", dens_drift, 1e-6)
    report.add("norm_drift", norm_drift, 1e-10)
    return report


def run_entropy_demo(cfg, out_dir) -> RunReport:
    grid = Grid1D(0.0, 1.0, cfg["grid_n"], "clamped")
    x = grid.points

    # unequal but overlapping start: equal widths would begin at the answer,
    # disjoint bumps would head for the boundary maximum with N = 0
    def bump(width):
        v = np.exp(-((x - 0.5) ** 2) / (2 * width**2)) + 1e-6
        return RealField(grid, v / integrate(RealField(grid, v)))

    result = maximize_entropy(
        bump(0.08), bump(0.15), tolerance=cfg["tolerance"], max_iter=cfg["max_iter"]
    )
    s_init = result.history[0][1]

    report = _report(cfg)
    report.csv_files.append(
        write_csv(out_dir, "iterations.csv",
                  ["iteration", "entropy", "ratio_spread", "update_norm"], result.history).name
    )
    report.add("ratio_spread", result.ratio_spread, 1e-6)
    report.add("update_norm", result.update_norm, cfg["tolerance"])
    report.add("entropy_final", result.entropy, s_init, comparator=">=")
    return report


def run_field_ground(cfg, out_dir) -> RunReport:
    system = fl.build_system(cfg["n_sites"], cfg["dx"], cfg["c"], cfg["kappa"], cfg["mu"])
    gs = fl.ground_state(system)

    n, dx, c, mu = cfg["n_sites"], cfg["dx"], cfg["c"], cfg["mu"]
    j = np.arange(n)
    omega_dft = np.sort(c * np.sqrt(mu**2 + (4.0 / dx**2) * np.sin(np.pi * j / n) ** 2))
    mode_err = float(np.max(np.abs(gs.mode_frequencies - omega_dft) / omega_dft))
    e0_ref = 0.5 * cfg["kappa"] * omega_dft.sum()
    e0_err = abs(gs.E0 / e0_ref - 1.0)

    dtau, stride, burn = fl.sampler_plan(gs, cfg["nu_f"])
    samples = fl.sample_ground_ensemble(
        gs, system, cfg["samples"], burn_in=burn, noise_seed=cfg["seed"],
        nu_f=cfg["nu_f"], dtau=dtau, stride=stride, chains=min(cfg["chains"], cfg["samples"]),
    )
    cov = fl.two_point(samples)
    cov_exact = fl.ground_covariance(system)
    neff = fl.effective_sample_count(gs, cfg["samples"], cfg["nu_f"], dtau, stride)
    diag = np.diag(cov_exact)
    stderr = np.sqrt((np.outer(diag, diag) + cov_exact**2) / neff)
    max_z = float(np.max(np.abs(cov - cov_exact) / stderr))

    le = np.array([fl.local_energy(gs, samples[i], system)
                   for i in range(0, len(samples), max(1, len(samples) // 1000))])
    le_spread = float(le.std() / abs(gs.E0))

    report = _report(cfg)
    report.csv_files.append(
        write_csv(out_dir, "modes.csv", ["mode", "omega", "omega_exact"],
                  ((k, gs.mode_frequencies[k], omega_dft[k]) for k in range(n))).name
    )
    cov_rows = [
        (i, k, cov[i, k], cov_exact[i, k], stderr[i, k]) for i in range(n) for k in range(n)
    ]
    report.csv_files.append(
        write_csv(out_dir, "covariance.csv", ["i", "j", "cov_sampled", "cov_exact", "stderr"], cov_rows).name
    )
    report.add("mode_rel_err", mode_err, 1e-12)
    report.add("e0_identity_rel", e0_err, 1e-10)
    report.add("covariance_max_z", max_z, 3.0)
    report.add("local_energy_rel_spread", le_spread, 1e-8)
    return report


RUNNERS = {
    "coherent_oscillator": run_coherent_oscillator,
    "free_packet": run_free_packet,
    "stationary_state": run_stationary_state,
    "entropy_demo": run_entropy_demo,
    "field_ground": run_field_ground,
}
