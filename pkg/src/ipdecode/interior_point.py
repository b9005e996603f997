"""Interior point decoding of LDPC codes over PR channels.

The decoder minimizes the merit function t f(x) + B(x), where f is the
squared distance between the received word and the channel image of x and
B is the log-barrier of the fundamental polytope. Search points stay in the
polytope interior throughout; every ``i_max`` inner steps a min-sum pass
tries to read a codeword off the current point, and t is multiplied by
``alpha``.

Both gradient and Hessian keep, per check, only the term of the dominant
odd subset S^(i), and the Hessian keeps only the diagonal of the barrier
part. That makes one inner step O(w_r n) plus the cost of the channel terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .channel import PRChannelSpec, pr_gradient, pr_hessian_band, pr_objective
from .code import SparseParityCheck
from .minsum import minsum_kernel
from .polytope import check_maxima, is_interior
from .solvers import BandedSymmetric, SolverParams, cholesky_solve, jacobi_ur

GRADIENT = 0
NEWTON_CHOLESKY = 1
NEWTON_JACOBI = 2
MAX_HALVINGS = 60

DECODER_KINDS = {"gradient": GRADIENT, "newton-cholesky": NEWTON_CHOLESKY, "newton-jacobi": NEWTON_JACOBI}


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class DecoderParams:
    i_max: int = 5
    o_max: int = 5
    t0: float = 5.0
    alpha: float = 2.0
    inner_kind: str = "newton"
    solver: SolverParams = field(default_factory=SolverParams)
    minsum_lmax: int = 20
    minsum_kappa: float = 0.7
    stop_on_codeword: bool = True

    def __post_init__(self):
        if self.inner_kind not in ("gradient", "newton"):
            raise ConfigurationError("inner_kind must be 'gradient' or 'newton'")
        if not self.t0 > 0.0:
            raise ConfigurationError("t0 must be positive")
        if not self.alpha > 1.0:
            raise ConfigurationError("alpha must exceed 1")
        if self.i_max < 1 or self.o_max < 1 or self.minsum_lmax < 1:
            raise ConfigurationError("iteration counts must be >= 1")

    @classmethod
    def for_decoder(cls, name: str, i_max: int = 5, o_max: int = 5, **kw) -> "DecoderParams":
        """Build parameters from a decoder name: gradient, newton-cholesky, newton-jacobi."""
        if name not in DECODER_KINDS:
            raise ConfigurationError(f"unknown decoder {name!r}")
        omega = kw.pop("omega", 0.8)
        iters = kw.pop("jacobi_iters", 30)
        if name == "gradient":
            return cls(i_max=i_max, o_max=o_max, inner_kind="gradient", **kw)
        kind = name.split("-", 1)[1]
        return cls(
            i_max=i_max, o_max=o_max, inner_kind="newton",
            solver=SolverParams(kind=kind, omega=omega, iters=iters), **kw,
        )

    @property
    def kind_code(self) -> int:
        if self.inner_kind == "gradient":
            return GRADIENT
        return NEWTON_CHOLESKY if self.solver.kind == "cholesky" else NEWTON_JACOBI


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of one decode.

    ``estimate`` is None on failure (no parity-satisfying word found);
    ``tentative`` always holds the last hard decision so failures can still
    be scored bit by bit.
    """

    estimate: np.ndarray | None
    tentative: np.ndarray
    final_point: np.ndarray
    iterations_used: int
    objective_trace: np.ndarray
    t_trace: np.ndarray
    fallbacks: int = 0
    stalls: int = 0

    @property
    def outcome_kind(self) -> str:
        return "decoded" if self.estimate is not None else "failure"

    @property
    def decoded(self) -> bool:
        return self.estimate is not None


# ---------------------------------------------------------------------------
# kernels


@njit(cache=True)
def approx_gradient_kernel(h, r, x, t, row_ptr, row_idx, theta, beta, g):
    pr_gradient(h, r, x, t, g)
    for k in range(x.shape[0]):
        g[k] += -1.0 / x[k] - 1.0 / (x[k] - 1.0)
    check_maxima(x, row_ptr, row_idx, theta, beta, False)
    for i in range(row_ptr.shape[0] - 1):
        inv = 1.0 / theta[i]
        for e in range(row_ptr[i], row_ptr[i + 1]):
            g[row_idx[e]] += (1.0 - 2.0 * beta[e]) * inv


@njit(cache=True)
def approx_hessian_kernel(h, t, x, row_ptr, row_idx, theta, band):
    """Objective band plus diagonal barrier terms; ``theta`` must be current for x."""
    n = x.shape[0]
    pr_hessian_band(h, t, n, band)
    for k in range(n):
        band[0, k] += 1.0 / (x[k] * x[k]) + 1.0 / ((x[k] - 1.0) * (x[k] - 1.0))
    for i in range(row_ptr.shape[0] - 1):
        inv2 = 1.0 / (theta[i] * theta[i])
        for e in range(row_ptr[i], row_ptr[i + 1]):
            band[0, row_idx[e]] += inv2


@njit(cache=True)
def line_search_kernel(x, d, row_ptr, row_idx, theta, beta, probe):
    """Move x to x - s d for the largest feasible s in {1, 1/2, ..., 2^-60}.

    Returns the number of halvings, or -1 if no probe was feasible (x is
    left unchanged).
    """
    n = x.shape[0]
    s = 1.0
    for halvings in range(MAX_HALVINGS + 1):
        for k in range(n):
            probe[k] = x[k] - s * d[k]
        if is_interior(probe, row_ptr, row_idx, theta, beta):
            for k in range(n):
                x[k] = probe[k]
            return halvings
        s *= 0.5
    return -1


@njit(cache=True)
def _all_finite(v):
    for k in range(v.shape[0]):
        if not np.isfinite(v[k]):
            return False
    return True


@njit(cache=True)
def inner_step_kernel(h, r, x, t, kind, omega, jacobi_iters, row_ptr, row_idx, theta, beta, g, d, band, L, work):
    """One inner-loop execution; returns (halvings or -1, used_fallback)."""
    approx_gradient_kernel(h, r, x, t, row_ptr, row_idx, theta, beta, g)
    fallback = False
    if kind == GRADIENT:
        for k in range(x.shape[0]):
            d[k] = g[k]
    else:
        approx_hessian_kernel(h, t, x, row_ptr, row_idx, theta, band)
        if kind == NEWTON_CHOLESKY:
            ok = cholesky_solve(band, g, L, d) >= 0
        else:
            ok = jacobi_ur(band, g, omega, jacobi_iters, d, work)
        if not ok or not _all_finite(d):
            fallback = True
            for k in range(x.shape[0]):
                d[k] = g[k]
    return line_search_kernel(x, d, row_ptr, row_idx, theta, beta, work), fallback


@njit(cache=True)
def decode_kernel(
    h, r, row_ptr, row_idx, col_ptr, col_edge, kind, omega, jacobi_iters,
    i_max, o_max, t0, alpha, kappa, l_max, stop, x, trace, t_trace, est, stats,
):
    n = x.shape[0]
    ne = row_idx.shape[0]
    theta = np.empty(row_ptr.shape[0] - 1)
    beta = np.empty(ne, dtype=np.uint8)
    g = np.empty(n)
    d = np.empty(n)
    work = np.empty(n)
    w = h.shape[0] - 1
    if w > n - 1:
        w = n - 1
    band = np.empty((w + 1, n))
    L = np.empty((w + 1, n))
    lam = np.empty(n)
    xi = np.empty(ne)
    eta = np.empty(ne)
    post = np.empty(n)
    for k in range(n):
        x[k] = 0.5
    t = t0
    used = 0
    p = 1
    for o in range(o_max):
        t_trace[o] = t
        for _ in range(i_max):
            halvings, fb = inner_step_kernel(
                h, r, x, t, kind, omega, jacobi_iters, row_ptr, row_idx, theta, beta, g, d, band, L, work
            )
            if fb:
                stats[0] += 1
            if halvings < 0:
                stats[1] += 1
            trace[used] = pr_objective(h, r, x)
            used += 1
        for k in range(n):
            lam[k] = np.log((1.0 - x[k]) / x[k])
        p, _ = minsum_kernel(lam, row_ptr, row_idx, col_ptr, col_edge, kappa, l_max, xi, eta, post, est)
        if p == 0 and stop:
            return 0, used, o + 1
        t *= alpha
    return p, used, o_max


# ---------------------------------------------------------------------------
# public API


def _check_code(H: SparseParityCheck) -> None:
    if not H.row_regular or H.w_r < 3:
        raise ConfigurationError(
            "interior point decoding needs a row-regular parity-check matrix with row weight >= 3"
        )


def _interior_point(H: SparseParityCheck, x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (H.n,):
        raise ValueError(f"expected a length-{H.n} point, got shape {x.shape}")
    theta = np.empty(H.m)
    beta = np.empty(H.num_edges, dtype=np.uint8)
    if not np.all(np.isfinite(x)) or not is_interior(x, H.row_ptr, H.row_idx, theta, beta):
        raise ValueError("point is not in the interior of the fundamental polytope")
    return x


def initial_point(H: SparseParityCheck) -> np.ndarray:
    """The all-1/2 point, interior whenever H is row-regular with w_r >= 3."""
    _check_code(H)
    return np.full(H.n, 0.5)


def approx_gradient(H: SparseParityCheck, spec: PRChannelSpec, r, x, t: float) -> np.ndarray:
    x = _interior_point(H, x)
    r = np.ascontiguousarray(r, dtype=np.float64)
    g = np.empty(H.n)
    theta = np.empty(H.m)
    beta = np.empty(H.num_edges, dtype=np.uint8)
    approx_gradient_kernel(spec.taps, r, x, float(t), H.row_ptr, H.row_idx, theta, beta, g)
    return g


def approx_hessian(H: SparseParityCheck, spec: PRChannelSpec, x, t: float) -> BandedSymmetric:
    x = _interior_point(H, x)
    theta = np.empty(H.m)
    beta = np.empty(H.num_edges, dtype=np.uint8)
    check_maxima(x, H.row_ptr, H.row_idx, theta, beta, False)
    band = np.empty((min(spec.delta, H.n - 1) + 1, H.n))
    approx_hessian_kernel(spec.taps, float(t), x, H.row_ptr, H.row_idx, theta, band)
    return BandedSymmetric(band)


def line_search(H: SparseParityCheck, x, direction) -> tuple[np.ndarray, int]:
    """Step from interior ``x`` along ``-direction``, halving until interior.

    Returns the new point and the number of halvings (-1 when the cap was
    hit and ``x`` is returned unchanged).
    """
    x = _interior_point(H, x).copy()
    direction = np.ascontiguousarray(direction, dtype=np.float64)
    theta = np.empty(H.m)
    beta = np.empty(H.num_edges, dtype=np.uint8)
    halvings = line_search_kernel(x, direction, H.row_ptr, H.row_idx, theta, beta, np.empty(H.n))
    return x, int(halvings)


def _inner(H, spec, r, x, t, kind, solver: SolverParams) -> np.ndarray:
    x = _interior_point(H, x).copy()
    r = np.ascontiguousarray(r, dtype=np.float64)
    n = H.n
    w = min(spec.delta, n - 1)
    inner_step_kernel(
        spec.taps, r, x, float(t), kind, solver.omega, solver.iters, H.row_ptr, H.row_idx,
        np.empty(H.m), np.empty(H.num_edges, dtype=np.uint8), np.empty(n), np.empty(n),
        np.empty((w + 1, n)), np.empty((w + 1, n)), np.empty(n),
    )
    return x


def inner_loop_gradient(H: SparseParityCheck, spec: PRChannelSpec, r, x, t: float) -> np.ndarray:
    return _inner(H, spec, r, x, t, GRADIENT, SolverParams())


def inner_loop_newton(
    H: SparseParityCheck, spec: PRChannelSpec, r, x, t: float, solver: SolverParams | None = None
) -> np.ndarray:
    """One approximate Newton step; falls back to a gradient step if the solve fails."""
    solver = solver or SolverParams()
    kind = NEWTON_CHOLESKY if solver.kind == "cholesky" else NEWTON_JACOBI
    return _inner(H, spec, r, x, t, kind, solver)


def decode(H: SparseParityCheck, spec: PRChannelSpec, r, params: DecoderParams | None = None) -> DecodeOutcome:
    """Decode one received word.

    Runs up to ``o_max`` outer iterations of ``i_max`` inner steps each,
    followed by a min-sum attempt at the current point; stops at the first
    parity-satisfying estimate. With ``stop_on_codeword=False`` all
    iterations run (for convergence traces) and the last attempt decides.
    """
    params = params or DecoderParams()
    _check_code(H)
    r = np.ascontiguousarray(r, dtype=np.float64)
    if r.shape != (H.n,):
        raise ValueError(f"received word must have length {H.n}")
    x = np.empty(H.n)
    trace = np.empty(params.i_max * params.o_max)
    t_trace = np.empty(params.o_max)
    est = np.zeros(H.n, dtype=np.uint8)
    stats = np.zeros(2, dtype=np.int64)
    p, used, outer = decode_kernel(
        spec.taps, r, H.row_ptr, H.row_idx, H.col_ptr, H.col_edge, params.kind_code,
        params.solver.omega, params.solver.iters, params.i_max, params.o_max, params.t0,
        params.alpha, params.minsum_kappa, params.minsum_lmax, params.stop_on_codeword,
        x, trace, t_trace, est, stats,
    )
    return DecodeOutcome(
        estimate=est.copy() if p == 0 else None,
        tentative=est,
        final_point=x,
        iterations_used=int(used),
        objective_trace=trace[:used].copy(),
        t_trace=t_trace[:outer].copy(),
        fallbacks=int(stats[0]),
        stalls=int(stats[1]),
    )
