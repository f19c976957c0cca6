"""NumPy implementations of the hot kernels.

These are the reference/fallback path; `citerank.kernels._native` provides
the compiled equivalents. Both produce results that agree to tight floating
tolerance and are individually deterministic (fixed accumulation order).
"""

from __future__ import annotations

import numpy as np


def pagerank_step(p, out_degrees, edge_citing, edge_cited, alpha):
    """One power-iteration update. Exposed separately so mass conservation
    can be checked iteration by iteration."""
    n = p.shape[0]
    w = np.divide(p, out_degrees, out=np.zeros_like(p), where=out_degrees > 0)
    dangling = float(p[out_degrees == 0].sum())
    contrib = np.bincount(edge_cited, weights=w[edge_citing], minlength=n)
    return alpha * contrib + (alpha * dangling + (1.0 - alpha)) / n


def pagerank_power(n, out_degrees, edge_citing, edge_cited, alpha, epsilon, max_iterations):
    """Power iteration from the uniform vector.

    Each node's mass is split over its cited nodes; a node citing nothing
    donates ``alpha * p / n`` to every node. Stops when the L1 difference of
    consecutive iterates drops strictly below ``epsilon``.

    Returns ``(p, iterations, residual, converged)``.
    """
    p = np.full(n, 1.0 / n)
    dangling_mask = out_degrees == 0
    inv_out = np.zeros(n)
    nz = ~dangling_mask
    inv_out[nz] = 1.0 / out_degrees[nz]
    residual = np.inf
    for it in range(1, max_iterations + 1):
        w = p * inv_out
        dm = float(p[dangling_mask].sum())
        p_next = alpha * np.bincount(edge_cited, weights=w[edge_citing], minlength=n)
        p_next += (alpha * dm + (1.0 - alpha)) / n
        residual = float(np.abs(p_next - p).sum())
        p = p_next
        if residual < epsilon:
            return p, it, residual, True
    return p, max_iterations, residual, False


def sliding_moments(values, window):
    """Mean and population std over each chronological window.

    ``values`` must already be globally centered by the caller (improves
    conditioning of the prefix-sum variance). Windows follow the clamped
    centered rule: ``lo = clip(i - window//2, 0, n - window)``, length
    exactly ``window``.
    """
    v = np.asarray(values, dtype=np.float64)
    n = v.shape[0]
    m = min(int(window), n)
    s1 = np.zeros(n + 1)
    s2 = np.zeros(n + 1)
    np.cumsum(v, out=s1[1:])
    np.cumsum(v * v, out=s2[1:])
    lo = np.clip(np.arange(n) - m // 2, 0, n - m)
    hi = lo + m
    mu = (s1[hi] - s1[lo]) / m
    var = (s2[hi] - s2[lo]) / m - mu * mu
    np.maximum(var, 0.0, out=var)
    # a window inside a run of one repeated value has std exactly 0; the
    # prefix arithmetic alone cannot promise the cancellation
    if n > 1:
        runs = np.zeros(n, dtype=np.int64)
        np.cumsum(v[1:] != v[:-1], out=runs[1:])
        const = runs[hi - 1] == runs[lo]
    else:
        const = np.ones(n, dtype=bool)
    mu[const] = v[lo[const]]
    var[const] = 0.0
    return mu, np.sqrt(var)
