"""Combinatorial entropy of paired forward/backward densities.

The count of combined trajectories through a cell is N = rho_F * rho_B
(proportionality constant fixed to 1); the entropy S = integral of N ln N
is made stationary under the two normalization constraints. Stationarity
forces rho_B/rho_F to be pointwise constant, i.e. rho_F = rho_B once both
are normalized; `ratio_spread` measures the violation of that conclusion.
"""

from dataclasses import dataclass

import numpy as np

from .grid import RealField, integrate_values, same_grid

NORM_TOL = 1e-8
POSITIVITY_FLOOR = 1e-14


@dataclass(frozen=True)
class DensityPair:
    rhoF: RealField
    rhoB: RealField

    def __post_init__(self):
        same_grid(self.rhoF, self.rhoB)
        for name, f in (("rhoF", self.rhoF), ("rhoB", self.rhoB)):
            if np.any(f.values < 0):
                raise ValueError(f"{name} must be non-negative")
            total = integrate_values(f.values, f.grid)
            if abs(total - 1.0) > NORM_TOL:
                raise ValueError(f"{name} not normalized: integral = {total}")

    @property
    def grid(self):
        return self.rhoF.grid


def combined_count(dp: DensityPair) -> RealField:
    return RealField(dp.grid, dp.rhoF.values * dp.rhoB.values)


def _n_log_n(n: np.ndarray) -> np.ndarray:
    out = np.zeros_like(n)
    pos = n > 0
    out[pos] = n[pos] * np.log(n[pos])
    return out


def entropy(dp: DensityPair) -> float:
    return float(integrate_values(_n_log_n(combined_count(dp).values), dp.grid))


def stationarity_residual(dp: DensityPair):
    """Euler-Lagrange fields minus their grid means, plus the ratio spread.

    Returns (resF, resB, ratio_spread); zero residuals and spread mean the
    pair is a constrained stationary point with rho_F = rho_B.
    """
    f, b = dp.rhoF.values, dp.rhoB.values
    if f.min() <= 0 or b.min() <= 0:
        raise ValueError("ratio undefined: zero density present")
    n = f * b
    gF = b * (np.log(n) + 1.0)
    gB = f * (np.log(n) + 1.0)
    ratio = b / f
    spread = float(np.max(np.abs(ratio - ratio.mean())))
    return (
        RealField(dp.grid, gF - gF.mean()),
        RealField(dp.grid, gB - gB.mean()),
        spread,
    )


@dataclass(frozen=True)
class MaximizeResult:
    pair: DensityPair
    iterations: int
    entropy: float
    ratio_spread: float
    update_norm: float
    history: list  # (iteration, entropy, ratio_spread, update_norm)


def _project(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    clipped = np.maximum(values, POSITIVITY_FLOOR)
    return clipped / np.dot(weights, clipped)


def maximize_entropy(
    rho_init_F: RealField,
    rho_init_B: RealField,
    tolerance: float,
    max_iter: int = 200_000,
    step: float = None,
    record_every: int = 25,
) -> MaximizeResult:
    """Projected-gradient ascent on S under both normalization constraints.

    Ascent directions are the entropy gradients minus their quadrature
    means (tangent to the constraints); positivity is kept by flooring and
    renormalizing. The step is halved whenever S would decrease. Stops when
    the applied update norm falls below `tolerance`.
    """
    dp = DensityPair(rho_init_F, rho_init_B)
    grid = dp.grid
    w = grid.quad_weights
    f = dp.rhoF.values.copy()
    b = dp.rhoB.values.copy()

    def s_of(fv, bv):
        return float(np.dot(w, _n_log_n(fv * bv)))

    def spread_of(fv, bv):
        r = bv / fv  # projection keeps both strictly positive
        return float(np.max(np.abs(r - r.mean())))

    s_cur = s_of(f, b)
    if step is None:
        step = 0.1 / max(1.0, abs(s_cur))
    history = [(0, s_cur, spread_of(f, b), np.inf)]
    update_norm = np.inf
    it = 0
    while it < max_iter:
        it += 1
        n = np.maximum(f * b, POSITIVITY_FLOOR)
        ln1 = np.log(n) + 1.0
        gF = b * ln1
        gB = f * ln1
        gF -= np.dot(w, gF) / w.sum()
        gB -= np.dot(w, gB) / w.sum()
        while True:
            f_new = _project(f + step * gF, w)
            b_new = _project(b + step * gB, w)
            s_new = s_of(f_new, b_new)
            if s_new >= s_cur - 1e-15 * max(1.0, abs(s_cur)) or step < 1e-18:
                break
            step *= 0.5
        update_norm = float(
            np.sqrt(np.dot(w, (f_new - f) ** 2) + np.dot(w, (b_new - b) ** 2))
        )
        if step < 1e-18 and update_norm >= tolerance:
            raise RuntimeError(
                "entropy ascent stalled: no feasible ascent direction "
                f"(update norm {update_norm:.3e})"
            )
        f, b, s_cur = f_new, b_new, s_new
        if it % record_every == 0 or update_norm < tolerance:
            history.append((it, s_cur, spread_of(f, b), update_norm))
        if update_norm < tolerance:
            break
    else:
        raise RuntimeError(f"entropy ascent did not converge in {max_iter} iterations")

    pair = DensityPair(RealField(grid, f), RealField(grid, b))
    return MaximizeResult(
        pair=pair,
        iterations=it,
        entropy=s_cur,
        ratio_spread=spread_of(f, b),
        update_norm=update_norm,
        history=history,
    )
