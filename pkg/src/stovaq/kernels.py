"""Hot numeric kernels: counter-based RNG, SDE path loops, field-space chains.

Two implementations of every kernel:

* a pure-NumPy version (``*_numpy``), always available, vectorized over
  trajectories/chains;
* a Numba ``@njit`` version (``*_numba``), compiled when numba imports and
  the environment does not opt out.

Set ``STOVAQ_NUMBA=0`` to force the NumPy path; ``STOVAQ_THREADS=<k>``
bounds the numba thread pool. Results are bit-identical within one backend
regardless of thread count: every noise increment is a pure function of
(master key, stream id, draw index), so no execution order can matter.
The two backends agree to floating round-off (libm vs SIMD transcendentals).
"""

import math
import os

import numpy as np

_ENV_FLAG = os.environ.get("STOVAQ_NUMBA", "1").strip().lower()
_WANT_NUMBA = _ENV_FLAG not in ("0", "false", "off", "no")

try:  # pragma: no cover - exercised implicitly by backend tests
    if not _WANT_NUMBA:
        raise ImportError("numba disabled by STOVAQ_NUMBA")
    import numba
    from numba import njit, prange

    _threads = os.environ.get("STOVAQ_THREADS")
    if _threads:
        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # no-op decorator so the twins stay importable
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap

    prange = range

MASK64 = (1 << 64) - 1
# splitmix64 constants; KA separates substreams from the master key.
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_KA = np.uint64(0xC2B2AE3D27D4EB4F)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_TWO = np.uint64(2)
_INV53 = float(2.0**-53)
_TWOPI = 2.0 * math.pi


def derive_key(master_seed: int, purpose: int) -> np.uint64:
    """Stateless subkey so independent consumers of one seed never collide."""
    z = (int(master_seed) + purpose * 0x9E3779B97F4A7C15) & MASK64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return np.uint64(z ^ (z >> 31))


# ---------------------------------------------------------------------------
# NumPy twins (arrays of uint64 wrap silently; scalars would warn)
# ---------------------------------------------------------------------------


def _sm64_np(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def stream_state_numpy(key: np.uint64, streams: np.ndarray) -> np.ndarray:
    """Per-stream base state; draws are splitmix64 walks from here."""
    return _sm64_np(key + streams * _KA)


_GAMMA_INT = 0x9E3779B97F4A7C15


def uniforms_numpy(za: np.ndarray, draw: int) -> np.ndarray:
    """Uniform [0,1) for draw index `draw` of every stream."""
    # offsets precomputed in python ints: scalar uint64 overflow would warn
    h = _sm64_np(za + np.uint64((draw * _GAMMA_INT) & MASK64))
    return (h >> _S11).astype(np.float64) * _INV53


def normals_numpy(za: np.ndarray, draw: int) -> np.ndarray:
    """Standard normal via Box-Muller; one value per stream per draw index."""
    off1 = np.uint64((2 * draw * _GAMMA_INT) & MASK64)
    off2 = np.uint64(((2 * draw + 1) * _GAMMA_INT) & MASK64)
    h1 = _sm64_np(za + off1)
    h2 = _sm64_np(za + off2)
    u1 = ((h1 >> _S11) + _ONE).astype(np.float64) * _INV53  # (0,1]: log stays finite
    u2 = (h2 >> _S11).astype(np.float64) * _INV53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWOPI * u2)


def _time_bracket(times: np.ndarray, t: float):
    nt = times.shape[0]
    if nt == 1:
        return 0, 0, 0.0
    j = int(np.searchsorted(times, t, side="right")) - 1
    if j < 0:
        j = 0
    if j > nt - 2:
        j = nt - 2
    theta = (t - times[j]) / (times[j + 1] - times[j])
    if theta < 0.0:
        theta = 0.0
    elif theta > 1.0:
        theta = 1.0
    return j, j + 1, theta


def _interp_rows_numpy(row0, row1, theta, x, gx_min, gh, gn, periodic):
    if periodic:
        f = (x - gx_min) / gh
        i = np.floor(f).astype(np.int64) % gn
        w = f - np.floor(f)
        ip = (i + 1) % gn
    else:
        f = (x - gx_min) / gh
        i = np.floor(f).astype(np.int64)
        np.clip(i, 0, gn - 2, out=i)
        w = f - i
        ip = i + 1
    a = row0[i] * (1.0 - w) + row0[ip] * w
    if theta == 0.0:
        return a
    b = row1[i] * (1.0 - w) + row1[ip] * w
    return a * (1.0 - theta) + b * theta


def sde_paths_numpy(
    x0: np.ndarray,
    streams: np.ndarray,
    key: np.uint64,
    t0: float,
    dt: float,
    n_steps: int,
    draw0: int,
    drift_times: np.ndarray,
    drift_vals: np.ndarray,
    gx_min: float,
    gh: float,
    gn: int,
    periodic: bool,
    dom_min: float,
    dom_max: float,
    nu: float,
    checkpoint_steps: np.ndarray,
    out: np.ndarray,
) -> np.ndarray:
    """Euler-Maruyama ensemble update; fills `out[c] = positions after checkpoint_steps[c]`."""
    x = x0.copy()
    za = stream_state_numpy(key, streams)
    sigma = math.sqrt(2.0 * nu * abs(dt))
    span = dom_max - dom_min
    ci = 0
    for k in range(n_steps):
        t = t0 + k * dt
        j0, j1, theta = _time_bracket(drift_times, t)
        u = _interp_rows_numpy(
            drift_vals[j0], drift_vals[j1], theta, x, gx_min, gh, gn, periodic
        )
        xi = sigma * normals_numpy(za, draw0 + k)
        x = x + u * dt + xi
        outside = (x < dom_min) | (x >= dom_max) if periodic else (x < dom_min) | (x > dom_max)
        if np.any(outside):
            if periodic:
                folded = dom_min + np.mod(x - dom_min, span)
            else:
                z = np.mod(x - dom_min, 2.0 * span)
                folded = dom_min + np.where(z <= span, z, 2.0 * span - z)
            x = np.where(outside, folded, x)
        if ci < checkpoint_steps.shape[0] and k + 1 == checkpoint_steps[ci]:
            out[ci] = x
            ci += 1
    return x


def _normal_block_numpy(za: np.ndarray, draw0: int, count: int) -> np.ndarray:
    """Normals for draw indices draw0..draw0+count-1, shape (count, *za.shape).

    Same per-element arithmetic as normals_numpy, batched so the
    transcendental calls amortize.
    """
    offs1 = np.array(
        [(2 * (draw0 + b) * _GAMMA_INT) & MASK64 for b in range(count)], dtype=np.uint64
    )
    offs2 = np.array(
        [((2 * (draw0 + b) + 1) * _GAMMA_INT) & MASK64 for b in range(count)],
        dtype=np.uint64,
    )
    shape = (count,) + (1,) * za.ndim
    h1 = _sm64_np(za[None, ...] + offs1.reshape(shape))
    h2 = _sm64_np(za[None, ...] + offs2.reshape(shape))
    u1 = ((h1 >> _S11) + _ONE).astype(np.float64) * _INV53
    u2 = (h2 >> _S11).astype(np.float64) * _INV53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWOPI * u2)


def ou_chains_numpy(
    phi0: np.ndarray,
    drift_mat: np.ndarray,
    dtau: float,
    n_burn: int,
    n_keep: int,
    stride: int,
    key: np.uint64,
    chain_streams: np.ndarray,
    sigma: float,
    out: np.ndarray,
) -> None:
    """Overdamped field-space chains phi <- phi - M phi dtau + sigma*xi.

    `out` has shape (chains, n_keep, n_sites); one noise draw per
    (chain, step, site) so chain partitioning cannot change results.
    """
    chains, n = phi0.shape
    phi = phi0.copy()
    site = np.arange(n, dtype=np.uint64)
    streams2d = chain_streams[:, None] * np.uint64(n) + site[None, :]
    za = stream_state_numpy(key, streams2d)
    total = n_burn + n_keep * stride
    block = 256
    draw = 0
    while draw < total:
        nb = min(block, total - draw)
        noise = _normal_block_numpy(za, draw, nb)
        for b in range(nb):
            d = np.einsum("ij,cj->ci", drift_mat, phi)
            phi = phi - d * dtau + sigma * noise[b]
            step = draw + b + 1  # steps completed
            if step > n_burn and (step - n_burn) % stride == 0:
                out[:, (step - n_burn) // stride - 1, :] = phi
        draw += nb


# ---------------------------------------------------------------------------
# Numba twins (same arithmetic, explicit loops)
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _sm64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def _normal(za, draw):
    d = np.uint64(draw)
    h1 = _sm64(za + (_TWO * d) * _GAMMA)
    h2 = _sm64(za + (_TWO * d + _ONE) * _GAMMA)
    u1 = np.float64((h1 >> _S11) + _ONE) * _INV53
    u2 = np.float64(h2 >> _S11) * _INV53
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWOPI * u2)


@njit(cache=True, parallel=True)
def sde_paths_numba(
    x0,
    streams,
    key,
    t0,
    dt,
    n_steps,
    draw0,
    drift_times,
    drift_vals,
    gx_min,
    gh,
    gn,
    periodic,
    dom_min,
    dom_max,
    nu,
    checkpoint_steps,
    out,
):
    n_traj = x0.shape[0]
    x = x0.copy()
    za = np.empty(n_traj, dtype=np.uint64)
    for p in range(n_traj):
        za[p] = _sm64(key + streams[p] * _KA)
    sigma = math.sqrt(2.0 * nu * abs(dt))
    span = dom_max - dom_min
    nt = drift_times.shape[0]
    ci = 0
    for k in range(n_steps):
        t = t0 + k * dt
        if nt == 1:
            j0 = 0
            j1 = 0
            theta = 0.0
        else:
            j0 = np.searchsorted(drift_times, t, side="right") - 1
            if j0 < 0:
                j0 = 0
            if j0 > nt - 2:
                j0 = nt - 2
            j1 = j0 + 1
            theta = (t - drift_times[j0]) / (drift_times[j1] - drift_times[j0])
            if theta < 0.0:
                theta = 0.0
            elif theta > 1.0:
                theta = 1.0
        row0 = drift_vals[j0]
        row1 = drift_vals[j1]
        for p in prange(n_traj):
            xv = x[p]
            f = (xv - gx_min) / gh
            fi = math.floor(f)
            w = f - fi
            i = int(fi)
            if periodic:
                i = i % gn
                ip = (i + 1) % gn
            else:
                if i < 0:
                    i = 0
                elif i > gn - 2:
                    i = gn - 2
                w = f - i
                ip = i + 1
            a = row0[i] * (1.0 - w) + row0[ip] * w
            if theta == 0.0:
                u = a
            else:
                b = row1[i] * (1.0 - w) + row1[ip] * w
                u = a * (1.0 - theta) + b * theta
            xi = sigma * _normal(za[p], np.uint64(draw0 + k))
            xv = xv + u * dt + xi
            if periodic:
                if xv < dom_min or xv >= dom_max:
                    xv = dom_min + (xv - dom_min) % span
            else:
                if xv < dom_min or xv > dom_max:
                    z = (xv - dom_min) % (2.0 * span)
                    if z > span:
                        z = 2.0 * span - z
                    xv = dom_min + z
            x[p] = xv
        if ci < checkpoint_steps.shape[0] and k + 1 == checkpoint_steps[ci]:
            for p in range(n_traj):
                out[ci, p] = x[p]
            ci += 1
    return x


@njit(cache=True, parallel=True)
def ou_chains_numba(
    phi0, drift_mat, dtau, n_burn, n_keep, stride, key, chain_streams, sigma, out
):
    chains, n = phi0.shape
    total = n_burn + n_keep * stride
    for c in prange(chains):
        phi = phi0[c].copy()
        za = np.empty(n, dtype=np.uint64)
        for i in range(n):
            za[i] = _sm64(key + (chain_streams[c] * np.uint64(n) + np.uint64(i)) * _KA)
        d = np.empty(n)
        kept = 0
        for step in range(total):
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc += drift_mat[i, j] * phi[j]
                d[i] = acc
            for i in range(n):
                phi[i] = phi[i] - d[i] * dtau + sigma * _normal(za[i], np.uint64(step))
            if step >= n_burn and (step - n_burn) % stride == stride - 1:
                for i in range(n):
                    out[c, kept, i] = phi[i]
                kept += 1


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def backend_name() -> str:
    return BACKEND


def sde_paths(*args, **kwargs):
    if BACKEND == "numba":
        return sde_paths_numba(*args, **kwargs)
    return sde_paths_numpy(*args, **kwargs)


def ou_chains(*args, **kwargs):
    if BACKEND == "numba":
        return ou_chains_numba(*args, **kwargs)
    return ou_chains_numpy(*args, **kwargs)
