"""Normalized (damped) min-sum decoding and the hard rounding decoder.

LLRs follow the convention lambda = ln(P(bit = 0) / P(bit = 1)); a
nonnegative posterior decides 0. Messages live in flat per-edge arrays in
the row-major edge order of the parity-check matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .code import SparseParityCheck


@njit(cache=True)
def minsum_kernel(lam, row_ptr, row_idx, col_ptr, col_edge, kappa, l_max, xi, eta, post, est):
    """Flooding min-sum with ``xi`` reset to zero; returns (p, iterations).

    ``p`` is 0 when the tentative estimate ``est`` satisfies every check.
    """
    n = lam.shape[0]
    m = row_ptr.shape[0] - 1
    for e in range(xi.shape[0]):
        xi[e] = 0.0
    for it in range(1, l_max + 1):
        # bit-to-check
        for j in range(n):
            tot = lam[j]
            for q in range(col_ptr[j], col_ptr[j + 1]):
                tot += xi[col_edge[q]]
            for q in range(col_ptr[j], col_ptr[j + 1]):
                e = col_edge[q]
                eta[e] = tot - xi[e]
        # check-to-bit
        for i in range(m):
            sgn = 1.0
            min1 = np.inf
            min2 = np.inf
            emin = -1
            for e in range(row_ptr[i], row_ptr[i + 1]):
                a = eta[e]
                if a < 0.0:
                    sgn = -sgn
                    a = -a
                if a < min1:
                    min2 = min1
                    min1 = a
                    emin = e
                elif a < min2:
                    min2 = a
            for e in range(row_ptr[i], row_ptr[i + 1]):
                s = sgn if eta[e] >= 0.0 else -sgn
                mag = min2 if e == emin else min1
                xi[e] = kappa * s * mag
        # tentative decision
        for j in range(n):
            tot = lam[j]
            for q in range(col_ptr[j], col_ptr[j + 1]):
                tot += xi[col_edge[q]]
            post[j] = tot
            est[j] = 0 if tot >= 0.0 else 1
        ok = True
        for i in range(m):
            par = 0
            for e in range(row_ptr[i], row_ptr[i + 1]):
                par ^= est[row_idx[e]]
            if par:
                ok = False
                break
        if ok:
            return 0, it
    return 1, l_max


@dataclass(frozen=True)
class MinSumState:
    """Messages and decisions after a min-sum run.

    ``xi`` / ``eta`` are the check-to-bit / bit-to-check messages of the last
    iteration; ``posterior`` is lambda plus all incoming ``xi``.
    """

    lam: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    posterior: np.ndarray
    estimate: np.ndarray
    p: int
    iterations: int
    kappa: float
    l_max: int

    @property
    def extrinsic(self) -> np.ndarray:
        return self.posterior - self.lam


def llr_from_point(x) -> np.ndarray:
    """lambda_j = ln((1 - x_j) / x_j), reading x_j as P(bit j = 1)."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        raise ValueError("every coordinate must lie strictly inside (0, 1)")
    return np.log1p(-x) - np.log(x)


def minsum_run(H: SparseParityCheck, lam, kappa: float = 0.7, l_max: int = 20) -> MinSumState:
    lam = np.ascontiguousarray(lam, dtype=np.float64)
    if lam.shape != (H.n,):
        raise ValueError(f"expected {H.n} LLRs, got shape {lam.shape}")
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    xi = np.empty(H.num_edges)
    eta = np.empty(H.num_edges)
    post = np.empty(H.n)
    est = np.empty(H.n, dtype=np.uint8)
    p, it = minsum_kernel(
        lam, H.row_ptr, H.row_idx, H.col_ptr, H.col_edge, float(kappa), int(l_max), xi, eta, post, est
    )
    return MinSumState(lam, xi, eta, post, est, int(p), int(it), float(kappa), int(l_max))


def minsum_decode(H: SparseParityCheck, lam, kappa: float = 0.7, l_max: int = 20) -> tuple[int, np.ndarray]:
    """Return ``(p, estimate)``; ``p == 0`` iff the estimate is a codeword."""
    state = minsum_run(H, lam, kappa, l_max)
    return state.p, state.estimate


def round_gamma(x) -> np.ndarray:
    """Threshold at 1/2, ties going to 1."""
    return (np.asarray(x, dtype=np.float64) >= 0.5).astype(np.uint8)
