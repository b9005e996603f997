"""Banded symmetric linear solvers for the Newton equation.

Storage follows the LAPACK lower-band convention: ``band[d, p] = G[p + d, p]``
for ``0 <= d <= w``; entries with ``p + d >= n`` are unused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

CHOLESKY = 0
JACOBI = 1
SOLVER_KINDS = {"cholesky": CHOLESKY, "jacobi": JACOBI}


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class BandedSymmetric:
    band: np.ndarray

    def __post_init__(self):
        band = np.ascontiguousarray(self.band, dtype=np.float64)
        if band.ndim != 2 or band.shape[0] < 1:
            raise ValueError("band must have shape (w + 1, n)")
        object.__setattr__(self, "band", band)

    @property
    def n(self) -> int:
        return self.band.shape[1]

    @property
    def bandwidth(self) -> int:
        return self.band.shape[0] - 1

    @property
    def diagonal(self) -> np.ndarray:
        return self.band[0]

    @classmethod
    def from_dense(cls, M: np.ndarray, w: int) -> "BandedSymmetric":
        M = np.asarray(M, dtype=np.float64)
        n = M.shape[0]
        band = np.zeros((w + 1, n))
        for d in range(w + 1):
            band[d, : n - d] = np.diagonal(M, -d)
        return cls(band)

    def to_dense(self) -> np.ndarray:
        n, w = self.n, self.bandwidth
        M = np.zeros((n, n))
        for d in range(w + 1):
            idx = np.arange(n - d)
            M[idx + d, idx] = self.band[d, : n - d]
            M[idx, idx + d] = self.band[d, : n - d]
        return M

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return band_matvec(self.band, np.ascontiguousarray(v, dtype=np.float64))


@dataclass(frozen=True)
class SolverParams:
    kind: str = "cholesky"
    omega: float = 0.8
    iters: int = 30

    def __post_init__(self):
        if self.kind not in SOLVER_KINDS:
            raise ValueError(f"solver kind must be one of {sorted(SOLVER_KINDS)}")
        if not 0.0 < self.omega < 1.0:
            raise ValueError("under-relaxation factor must lie in (0, 1)")
        if self.iters < 1:
            raise ValueError("Jacobi iteration count must be >= 1")


@njit(cache=True)
def band_matvec(band, v):
    w = band.shape[0] - 1
    n = band.shape[1]
    out = band[0] * v
    for d in range(1, w + 1):
        for p in range(n - d):
            out[p + d] += band[d, p] * v[p]
            out[p] += band[d, p] * v[p + d]
    return out


@njit(cache=True)
def band_cholesky(band, L):
    """Factor G = L L^T into ``L`` (same band layout).

    Returns the number of multiply-adds, or -1 on a non-positive pivot.
    """
    w = band.shape[0] - 1
    n = band.shape[1]
    ops = 0
    for j in range(n):
        s = band[0, j]
        for k in range(max(0, j - w), j):
            s -= L[j - k, k] * L[j - k, k]
            ops += 1
        if not s > 0.0:
            return -1
        ljj = math.sqrt(s)
        L[0, j] = ljj
        for i in range(j + 1, min(j + w, n - 1) + 1):
            s = band[i - j, j]
            for k in range(max(0, i - w), j):
                s -= L[i - k, k] * L[j - k, k]
                ops += 1
            L[i - j, j] = s / ljj
            ops += 1
    return ops


@njit(cache=True)
def band_cholesky_substitute(L, rhs, out):
    """Solve L L^T out = rhs given the band factor; returns multiply-adds."""
    w = L.shape[0] - 1
    n = L.shape[1]
    ops = 0
    for i in range(n):
        s = rhs[i]
        for k in range(max(0, i - w), i):
            s -= L[i - k, k] * out[k]
            ops += 1
        out[i] = s / L[0, i]
    for i in range(n - 1, -1, -1):
        s = out[i]
        for k in range(i + 1, min(i + w, n - 1) + 1):
            s -= L[k - i, i] * out[k]
            ops += 1
        out[i] = s / L[0, i]
    return ops


@njit(cache=True)
def cholesky_solve(band, rhs, L, out):
    ops = band_cholesky(band, L)
    if ops < 0:
        return -1
    return ops + band_cholesky_substitute(L, rhs, out)


@njit(cache=True)
def jacobi_ur(band, rhs, omega, iters, out, prev):
    """Under-relaxed Jacobi from the zero vector; returns False on a zero pivot."""
    w = band.shape[0] - 1
    n = band.shape[1]
    for p in range(n):
        if band[0, p] == 0.0:
            return False
        out[p] = 0.0
    for _ in range(iters):
        for p in range(n):
            prev[p] = out[p]
            out[p] = rhs[p]
        # off-diagonal part, one band at a time so the inner loops have no branches
        for d in range(1, w + 1):
            for p in range(n - d):
                out[p] -= band[d, p] * prev[p + d]
                out[p + d] -= band[d, p] * prev[p]
        for p in range(n):
            out[p] = omega * (out[p] / band[0, p]) + (1.0 - omega) * prev[p]
    return True


def cholesky_factor(G: BandedSymmetric) -> BandedSymmetric:
    L = np.zeros_like(G.band)
    if band_cholesky(G.band, L) < 0:
        raise NotPositiveDefiniteError("matrix is not positive definite")
    return BandedSymmetric(L)


def cholesky_banded_solve(G: BandedSymmetric, rhs, return_ops: bool = False):
    """Solve G d = rhs for symmetric positive definite banded G.

    Cost is O((w + 1)^2 n); ``return_ops`` also returns the multiply-add count.
    """
    rhs = np.ascontiguousarray(rhs, dtype=np.float64)
    if rhs.shape != (G.n,):
        raise ValueError(f"right-hand side must have length {G.n}")
    L = np.zeros_like(G.band)
    out = np.empty(G.n)
    ops = cholesky_solve(G.band, rhs, L, out)
    if ops < 0:
        raise NotPositiveDefiniteError("matrix is not positive definite")
    return (out, ops) if return_ops else out


def jacobi_ur_solve(G: BandedSymmetric, rhs, params: SolverParams | None = None) -> np.ndarray:
    """Fixed-count under-relaxed Jacobi iteration started from zero.

    No convergence check is made; the iterate after ``params.iters`` sweeps
    is returned as is.
    """
    params = params or SolverParams(kind="jacobi")
    rhs = np.ascontiguousarray(rhs, dtype=np.float64)
    if rhs.shape != (G.n,):
        raise ValueError(f"right-hand side must have length {G.n}")
    out = np.empty(G.n)
    if not jacobi_ur(G.band, rhs, params.omega, params.iters, out, np.empty(G.n)):
        raise ZeroDivisionError("zero diagonal entry")
    return out
