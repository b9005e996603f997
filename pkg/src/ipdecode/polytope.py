"""Fundamental-polytope feasibility, per-check maxima and barrier terms.

For check ``i`` with support A_i, the parity constraints read

    1 + sum_{l in S} (x_l - 1) - sum_{l in A_i \\ S} x_l <= 0   for every odd S in A_i.

The largest left-hand side over odd S (``theta_i``) and the subset that
attains it (``S^(i)``) are found in O(|A_i|) without enumerating subsets:
take every coordinate on its larger side, then, if the selection has even
size, flip the coordinate closest to 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np
from numba import njit

from .code import SparseParityCheck

BOX = 0
PARITY = 1


@njit(cache=True)
def box_violation(x):
    """Index of the first coordinate outside the open interval (0, 1), else -1."""
    for j in range(x.shape[0]):
        if not (x[j] > 0.0 and x[j] < 1.0):
            return j
    return -1


@njit(cache=True)
def check_maxima(x, row_ptr, row_idx, theta, beta, early_exit):
    """Fill ``theta`` (per check) and ``beta`` (per edge) for the point ``x``.

    Returns the index of the first check with ``theta >= 0`` or -1. With
    ``early_exit`` the scan stops at that check and later entries are left
    untouched.
    """
    first_bad = -1
    m = row_ptr.shape[0] - 1
    for i in range(m):
        start = row_ptr[i]
        stop = row_ptr[i + 1]
        u = 1.0
        v = 0
        dmin = np.inf
        emin = -1
        for e in range(start, stop):
            xl = x[row_idx[e]]
            if xl - 1.0 > -xl:
                beta[e] = 1
                u += xl - 1.0
                v += 1
            else:
                beta[e] = 0
                u -= xl
            d = abs(2.0 * xl - 1.0)
            if d < dmin:
                dmin = d
                emin = e
        if v % 2 == 0 and emin >= 0:
            u -= dmin
            beta[emin] ^= 1
        theta[i] = u
        if u >= 0.0 and first_bad < 0:
            first_bad = i
            if early_exit:
                return first_bad
    return first_bad


@njit(cache=True)
def is_interior(x, row_ptr, row_idx, theta, beta):
    """Early-exit interior test used by the line search."""
    if box_violation(x) >= 0:
        return False
    return check_maxima(x, row_ptr, row_idx, theta, beta, True) < 0


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the feasibility test at a point.

    ``theta[i]`` is the largest parity-constraint value of check ``i``;
    ``beta`` holds one flag per edge (row-major edge order of H) marking
    membership in the maximizing odd subset S^(i).
    """

    feasible: bool
    theta: np.ndarray
    beta: np.ndarray
    box_ok: bool
    first_violation: tuple[str, int] | None
    H: SparseParityCheck

    def subset(self, i: int) -> tuple[int, ...]:
        """The maximizing odd subset S^(i) as sorted column indices."""
        lo, hi = self.H.row_ptr[i], self.H.row_ptr[i + 1]
        return tuple(int(j) for j, b in zip(self.H.row_idx[lo:hi], self.beta[lo:hi]) if b)


def _as_point(H: SparseParityCheck, x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (H.n,):
        raise ValueError(f"expected a length-{H.n} point, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point has non-finite entries")
    return x


def feasibility(H: SparseParityCheck, x) -> FeasibilityReport:
    """Full feasibility report: theta and S^(i) for every check.

    Exterior points are legal input; the report then names the first
    violated constraint (box constraints are checked first).
    """
    x = _as_point(H, x)
    theta = np.empty(H.m)
    beta = np.empty(H.num_edges, dtype=np.uint8)
    bad_bit = box_violation(x)
    bad_check = check_maxima(x, H.row_ptr, H.row_idx, theta, beta, False)
    if bad_bit >= 0:
        first = ("box", int(bad_bit))
    elif bad_check >= 0:
        first = ("parity", int(bad_check))
    else:
        first = None
    return FeasibilityReport(
        feasible=first is None,
        theta=theta,
        beta=beta,
        box_ok=bad_bit < 0,
        first_violation=first,
        H=H,
    )


def is_feasible(H: SparseParityCheck, x) -> bool:
    x = _as_point(H, x)
    theta = np.empty(H.m)
    beta = np.empty(H.num_edges, dtype=np.uint8)
    return bool(is_interior(x, H.row_ptr, H.row_idx, theta, beta))


def constraint_value(x, support: Iterable[int], S: Iterable[int]) -> float:
    """Left-hand side 1 + sum_{S}(x_l - 1) - sum_{A \\ S} x_l of one parity inequality."""
    S = set(S)
    return 1.0 + sum((x[l] - 1.0) if l in S else -x[l] for l in support)


def odd_subsets(support: tuple[int, ...]):
    for size in range(1, len(support) + 1, 2):
        yield from combinations(support, size)


def tau(H: SparseParityCheck, x, i: int, S: Iterable[int], k: int) -> float:
    """Partial derivative of -ln(-c) for the (i, S) parity constraint c, w.r.t. x_k."""
    support = H.rows[i]
    S = tuple(S)
    if len(S) % 2 == 0 or not set(S) <= set(support):
        raise ValueError("S must be an odd subset of the check support")
    denom = constraint_value(x, support, S)
    if not denom < 0.0:
        raise ValueError(f"constraint ({i}, {S}) is not strictly satisfied (value {denom})")
    if k not in support:
        return 0.0
    return ((k not in S) - (k in S)) / denom


def barrier_value(H: SparseParityCheck, x) -> float:
    """Log-barrier of the fundamental polytope, by explicit enumeration.

    Exponential in the row weight; meant for diagnostics and tests only.
    Returns ``inf`` outside the interior.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        return math.inf
    total = -float(np.sum(np.log(x) + np.log(1.0 - x)))
    for support in H.rows:
        for S in odd_subsets(support):
            c = constraint_value(x, support, S)
            if c >= 0.0:
                return math.inf
            total -= math.log(-c)
    return total
