"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``."""

from __future__ import annotations

import numpy as np


def transfer_fill(wv, wh, n_states: int, width: int, threads: int = 0) -> np.ndarray:
    wv = np.asarray(wv, dtype=np.complex128)
    wh = np.asarray(wh, dtype=np.complex128)
    dim = n_states**width
    idx = np.arange(dim)
    dig = np.stack([(idx // n_states**j) % n_states for j in range(width)], axis=1)
    out = np.ones((dim, dim), dtype=np.complex128)
    for j in range(width):
        jn = (j + 1) % width
        dv = (dig[:, j, None] - dig[None, :, j]) % n_states
        dh = (dig[:, j, None] - dig[None, :, jn]) % n_states
        out *= wv[dv]
        out *= wh[dh]
    return out


def _p3_rhs(alpha, beta, gamma, delta, x, u, du):
    # deviation form, u = 1 - eta
    eta = 1.0 - u
    return du, -(du * du / eta + du / x
                 + ((alpha + beta) - alpha * u * (2.0 - u)) / x
                 + ((gamma + delta) - gamma * u * (4.0 - u * (6.0 - u * (4.0 - u)))) / eta)


def rk4_painleve(alpha, beta, gamma, delta, x0, u0, du0, h, n_steps):
    x, y0, y1 = x0, u0, du0
    f = _p3_rhs
    for n in range(n_steps):
        k1a, k1b = f(alpha, beta, gamma, delta, x, y0, y1)
        k2a, k2b = f(alpha, beta, gamma, delta, x + 0.5 * h, y0 + 0.5 * h * k1a, y1 + 0.5 * h * k1b)
        k3a, k3b = f(alpha, beta, gamma, delta, x + 0.5 * h, y0 + 0.5 * h * k2a, y1 + 0.5 * h * k2b)
        k4a, k4b = f(alpha, beta, gamma, delta, x + h, y0 + h * k3a, y1 + h * k3b)
        y0 = y0 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        y1 = y1 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        x = x0 + (n + 1) * h
    return x, y0, y1
