"""Hot loops for the sweep propagator and the annealing sampler.

Compiled with numba when available; the numpy fallbacks implement exactly
the same arithmetic (the propagator fallback is vectorized, the sampler
fallback is a plain loop kept for completeness).
"""
from __future__ import annotations

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

# Yoshida composition: three symmetric second-order substeps give a
# fourth-order step
_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_W0 = 1.0 - 2.0 * _W1


def _mix_all_bits_np(psi: np.ndarray, n: int, c: float, s: float) -> np.ndarray:
    dim = psi.shape[0]
    for b in range(n):
        view = psi.reshape(dim >> (b + 1), 2, 1 << b)
        flipped = view[:, ::-1, :].copy()
        psi = (c * view + 1j * s * flipped).reshape(dim)
    return psi


def _strang_np(psi, diag, n, h0, T, t0, dt):
    s_frac = (t0 + 0.5 * dt) / T
    theta = h0 * (1.0 - s_frac) * dt / 2.0
    psi = _mix_all_bits_np(psi, n, np.cos(theta), np.sin(theta))
    psi = psi * np.exp(-1j * dt * s_frac * diag)
    return _mix_all_bits_np(psi, n, np.cos(theta), np.sin(theta))


def _yoshida_sweep_np(psi, diag, n, h0, T, windows):
    dt = T / windows
    for k in range(windows):
        t = k * dt
        psi = _strang_np(psi, diag, n, h0, T, t, _W1 * dt)
        psi = _strang_np(psi, diag, n, h0, T, t + _W1 * dt, _W0 * dt)
        psi = _strang_np(psi, diag, n, h0, T, t + (_W1 + _W0) * dt, _W1 * dt)
    return psi


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _mix_all_bits(psi, n, c, s):
        dim = psi.shape[0]
        for b in range(n):
            stride = 1 << b
            step = stride << 1
            for base in range(0, dim, step):
                for off in range(stride):
                    i0 = base + off
                    i1 = i0 + stride
                    a0 = psi[i0]
                    a1 = psi[i1]
                    psi[i0] = c * a0 + 1j * s * a1
                    psi[i1] = 1j * s * a0 + c * a1

    @numba.njit(cache=True)
    def _strang_window(psi, diag, n, h0, T, t0, dt):
        dim = psi.shape[0]
        s_frac = (t0 + 0.5 * dt) / T
        theta = h0 * (1.0 - s_frac) * dt / 2.0
        c = np.cos(theta)
        s = np.sin(theta)
        _mix_all_bits(psi, n, c, s)
        for i in range(dim):
            psi[i] = psi[i] * np.exp(-1j * dt * s_frac * diag[i])
        _mix_all_bits(psi, n, c, s)

    @numba.njit(cache=True)
    def _yoshida_sweep_nb(psi, diag, n, h0, T, windows):
        dt = T / windows
        for k in range(windows):
            t = k * dt
            _strang_window(psi, diag, n, h0, T, t, _W1 * dt)
            _strang_window(psi, diag, n, h0, T, t + _W1 * dt, _W0 * dt)
            _strang_window(psi, diag, n, h0, T, t + (_W1 + _W0) * dt, _W1 * dt)


def yoshida_sweep(psi, diag, n, h0, T, windows, use_numba=True):
    """Propagate psi in place through the linear sweep with `windows`
    fourth-order splitting steps; returns the final state."""
    if HAVE_NUMBA and use_numba:
        _yoshida_sweep_nb(psi, diag, n, h0, T, windows)
        return psi
    return _yoshida_sweep_np(psi, diag, n, h0, T, windows)


def _metropolis_py(nbr_ptr, nbr_idx, nbr_val, h, betas, reads, seeds):
    n = h.size
    out = np.empty((reads, n), dtype=np.int8)
    for r in range(reads):
        rng = np.random.RandomState(seeds[r])
        s = np.where(rng.random_sample(n) < 0.5, 1, -1).astype(np.int8)
        for beta in betas:
            for i in range(n):
                field = h[i]
                for t in range(nbr_ptr[i], nbr_ptr[i + 1]):
                    field += nbr_val[t] * s[nbr_idx[t]]
                d_e = -2.0 * s[i] * field
                if d_e <= 0.0 or rng.random_sample() < np.exp(-beta * d_e):
                    s[i] = -s[i]
        out[r] = s
    return out


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _metropolis_nb(nbr_ptr, nbr_idx, nbr_val, h, betas, reads, seeds):
        n = h.size
        out = np.empty((reads, n), dtype=np.int8)
        for r in range(reads):
            np.random.seed(seeds[r])
            s = np.empty(n, dtype=np.int8)
            for i in range(n):
                s[i] = 1 if np.random.random() < 0.5 else -1
            for b in range(betas.size):
                beta = betas[b]
                for i in range(n):
                    field = h[i]
                    for t in range(nbr_ptr[i], nbr_ptr[i + 1]):
                        field += nbr_val[t] * s[nbr_idx[t]]
                    d_e = -2.0 * s[i] * field
                    if d_e <= 0.0 or np.random.random() < np.exp(-beta * d_e):
                        s[i] = -s[i]
            out[r] = s
        return out


def metropolis_reads(nbr_ptr, nbr_idx, nbr_val, h, betas, reads, seeds,
                     use_numba=True):
    """Temperature-scheduled single-spin-flip Metropolis; one independent
    anneal per read, seeded per read."""
    if HAVE_NUMBA and use_numba:
        return _metropolis_nb(nbr_ptr, nbr_idx, nbr_val, h, betas, reads, seeds)
    return _metropolis_py(nbr_ptr, nbr_idx, nbr_val, h, betas, reads, seeds)
