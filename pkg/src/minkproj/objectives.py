"""Differentiable misfit functions with analytic gradients.

Small stand-ins for expensive physics-based misfits, used by the outer
solver, the command-line driver and the verification suite. Each factory
returns a callable mapping a flat model array to (value, gradient).
"""

import numpy as np
import scipy.sparse as sp


def proximity(target):
    """f(m) = 0.5 ||m - target||^2; the minimizer over a set is its projection."""
    target = np.asarray(target, dtype=float).ravel()

    def f(m):
        r = m - target
        return 0.5 * float(r @ r), r

    return f


def least_squares(G, d_obs):
    """f(m) = 0.5 ||G m - d||^2 for a sparse forward operator."""
    G = sp.csr_matrix(G)
    d_obs = np.asarray(d_obs, dtype=float).ravel()

    def f(m):
        r = G @ m - d_obs
        return 0.5 * float(r @ r), G.T @ r

    return f


def quadratic(H, c):
    """f(m) = 0.5 m^T H m + c^T m with a dense symmetric Hessian."""
    H = np.asarray(H, dtype=float)
    c = np.asarray(c, dtype=float).ravel()

    def f(m):
        hm = H @ m
        return 0.5 * float(m @ hm) + float(c @ m), hm + c

    return f


def sum_of_sines(freqs=(1.0, 2.3, 3.7), weights=(1.0, 0.5, 0.25)):
    """Smooth non-quadratic test misfit f(m) = sum_j w_j sum_i sin(f_j m_i)."""
    freqs = np.asarray(freqs, dtype=float)
    weights = np.asarray(weights, dtype=float)

    def f(m):
        val = 0.0
        grad = np.zeros_like(m)
        for fj, wj in zip(freqs, weights):
            val += wj * float(np.sum(np.sin(fj * m)))
            grad += wj * fj * np.cos(fj * m)
        return val, grad

    return f
