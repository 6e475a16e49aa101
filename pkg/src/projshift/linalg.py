"""Perron roots of nonnegative integer matrices (transfer matrices)."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

RTOL = 1e-12
_MAX_ITER = 200_000
_DENSE_FALLBACK = 3000


def essential_states(adj) -> np.ndarray:
    """Indices of states lying on a bi-infinite path (iteratively drop sources and sinks)."""
    a = sp.csr_matrix(adj, dtype=np.float64)
    alive = np.ones(a.shape[0], dtype=bool)
    while True:
        sub = a[alive][:, alive]
        out_deg = np.asarray(sub.sum(axis=1)).ravel()
        in_deg = np.asarray(sub.sum(axis=0)).ravel()
        keep = (out_deg > 0) & (in_deg > 0)
        if keep.all():
            return np.flatnonzero(alive)
        idx = np.flatnonzero(alive)
        alive[idx[~keep]] = False
        if not alive.any():
            return np.flatnonzero(alive)


def perron_root(adj) -> float:
    """Spectral radius of a nonnegative square matrix.

    Power iteration on ``A + I`` (aperiodic, so no oscillation on periodic graphs)
    restricted to the essential states, stopping at relative change ``RTOL``.
    Falls back to a dense eigenvalue solve if iteration stalls (e.g. Jordan blocks
    between components with equal roots).
    """
    a = sp.csr_matrix(adj, dtype=np.float64)
    if a.shape[0] != a.shape[1]:
        raise ValueError("transfer matrix must be square")
    keep = essential_states(a)
    if keep.size == 0:
        return 0.0
    a = a[keep][:, keep]
    n = a.shape[0]
    b = a + sp.identity(n, format="csr")
    v = np.full(n, 1.0 / n)
    prev = None
    streak = 0
    lam = 0.0
    for _ in range(_MAX_ITER):
        w = b @ v
        # Collatz-Wielandt: min (Av)_i/v_i <= root <= max (Av)_i/v_i for positive v
        pos = v > 0
        ratios = (w[pos] - v[pos]) / v[pos]
        hi, lo = ratios.max(), ratios.min()
        if hi - lo <= RTOL * max(hi, 1.0):
            return float(0.5 * (hi + lo))
        lam = w.sum()
        v = w / lam
        if prev is not None and abs(lam - prev) <= RTOL * lam:
            streak += 1
            if streak >= 50:
                break
        else:
            streak = 0
        prev = lam
    if n > _DENSE_FALLBACK:
        return float(lam - 1.0)
    eig = np.linalg.eigvals(a.toarray())
    return float(np.max(np.abs(eig)))
