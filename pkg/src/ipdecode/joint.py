"""Joint message-passing baseline: PR-trellis BCJR exchanging extrinsic
LLRs with the damped min-sum LDPC decoder (turbo equalization).

Extrinsic convention: each component outputs its a-posteriori LLR minus the
prior it was fed. BCJR gets the min-sum extrinsic as prior (zero in the first
round); min-sum gets the BCJR extrinsic as its channel LLRs and restarts
from zero check messages every round.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .channel import PRChannelSpec
from .code import SparseParityCheck
from .interior_point import ConfigurationError, DecodeOutcome
from .minsum import minsum_kernel

MAX_MEMORY = 12


@dataclass(frozen=True)
class PRTrellis:
    """Trellis of a PR channel with state = the ``delta`` most recent bits.

    Bit ``d - 1`` of a state holds x_{j-d}. Before the block starts the
    channel sees x = 1/2, which contributes nothing to the output, so the
    first ``delta`` steps use truncated taps: ``outputs[min(j, delta), s, u]``
    is the noiseless sample for state ``s`` and input ``u`` at time ``j``.
    Decoding starts in state 0, whose placeholder bits are never read.
    """

    h: tuple[float, ...]
    outputs: np.ndarray
    next_state: np.ndarray

    @property
    def delta(self) -> int:
        return len(self.h) - 1

    @property
    def num_states(self) -> int:
        return self.next_state.shape[0]


@dataclass(frozen=True)
class JointMPDParams:
    overall_iters: int = 20
    minsum_iters_per_round: int = 10
    kappa: float = 0.7
    max_log: bool = False

    def __post_init__(self):
        if self.overall_iters < 1 or self.minsum_iters_per_round < 1:
            raise ConfigurationError("iteration counts must be >= 1")


def build_trellis(spec: PRChannelSpec) -> PRTrellis:
    delta = spec.delta
    if delta > MAX_MEMORY:
        raise ConfigurationError(
            f"channel memory {delta} exceeds {MAX_MEMORY}; a {2 ** delta}-state trellis is impractical"
        )
    S = 1 << delta
    outputs = np.zeros((delta + 1, S, 2))
    next_state = np.zeros((S, 2), dtype=np.int64)
    for s in range(S):
        for u in (0, 1):
            next_state[s, u] = ((s << 1) | u) & (S - 1)
            for avail in range(delta + 1):
                acc = spec.h[0] * (1 - 2 * u)
                for d in range(1, avail + 1):
                    acc += spec.h[d] * (1 - 2 * ((s >> (d - 1)) & 1))
                outputs[avail, s, u] = acc
    return PRTrellis(h=spec.h, outputs=outputs, next_state=next_state)


def trellis_path_outputs(trellis: PRTrellis, bits) -> np.ndarray:
    """Noiseless outputs read off the trellis along the path of ``bits``."""
    s = 0
    out = np.empty(len(bits))
    for j, u in enumerate(np.asarray(bits, dtype=np.int64)):
        out[j] = trellis.outputs[min(j, trellis.delta), s, u]
        s = trellis.next_state[s, u]
    return out


@njit(cache=True)
def _lse(a, b, max_log):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if max_log:
        return max(a, b)
    if a > b:
        return a + np.log1p(np.exp(b - a))
    return b + np.log1p(np.exp(a - b))


@njit(cache=True)
def bcjr_kernel(outputs, next_state, r, prior, sigma2, max_log, alpha, beta, ext):
    n = r.shape[0]
    S = next_state.shape[0]
    delta = outputs.shape[0] - 1
    inv = 1.0 / (2.0 * sigma2)
    for s in range(S):
        alpha[0, s] = -np.inf
        beta[n, s] = 0.0
    alpha[0, 0] = 0.0
    for j in range(n):
        jc = min(j, delta)
        for s in range(S):
            alpha[j + 1, s] = -np.inf
        for s in range(S):
            a = alpha[j, s]
            if a == -np.inf:
                continue
            for u in range(2):
                e = r[j] - outputs[jc, s, u]
                gam = -e * e * inv + (0.5 * prior[j] if u == 0 else -0.5 * prior[j])
                ns = next_state[s, u]
                alpha[j + 1, ns] = _lse(alpha[j + 1, ns], a + gam, max_log)
        top = -np.inf
        for s in range(S):
            top = max(top, alpha[j + 1, s])
        for s in range(S):
            alpha[j + 1, s] -= top
    for j in range(n - 1, -1, -1):
        jc = min(j, delta)
        top = -np.inf
        num0 = -np.inf
        num1 = -np.inf
        for s in range(S):
            acc = -np.inf
            for u in range(2):
                e = r[j] - outputs[jc, s, u]
                gam = -e * e * inv + (0.5 * prior[j] if u == 0 else -0.5 * prior[j])
                ns = next_state[s, u]
                acc = _lse(acc, gam + beta[j + 1, ns], max_log)
                if alpha[j, s] != -np.inf:
                    v = alpha[j, s] + gam + beta[j + 1, ns]
                    if u == 0:
                        num0 = _lse(num0, v, max_log)
                    else:
                        num1 = _lse(num1, v, max_log)
            beta[j, s] = acc
            top = max(top, acc)
        for s in range(S):
            beta[j, s] -= top
        ext[j] = num0 - num1 - prior[j]
    return ext


def bcjr_extrinsic(trellis: PRTrellis, r, prior_llr, sigma2: float, max_log: bool = False) -> np.ndarray:
    """Channel extrinsic LLRs (a-posteriori minus prior), exact log-sum-exp by default."""
    r = np.ascontiguousarray(r, dtype=np.float64)
    prior = np.ascontiguousarray(prior_llr, dtype=np.float64)
    if prior.shape != r.shape:
        raise ValueError("prior and received word must have equal length")
    if not sigma2 > 0.0:
        raise ValueError("noise variance must be positive")
    n, S = r.shape[0], trellis.num_states
    return bcjr_kernel(
        trellis.outputs, trellis.next_state, r, prior, float(sigma2), bool(max_log),
        np.empty((n + 1, S)), np.empty((n + 1, S)), np.empty(n),
    )


@njit(cache=True)
def joint_kernel(
    outputs, next_state, r, sigma2, max_log, row_ptr, row_idx, col_ptr, col_edge,
    kappa, overall_iters, minsum_iters, est, post,
):
    n = r.shape[0]
    S = next_state.shape[0]
    ne = row_idx.shape[0]
    alpha = np.empty((n + 1, S))
    beta = np.empty((n + 1, S))
    prior = np.zeros(n)
    ext = np.empty(n)
    xi = np.empty(ne)
    eta = np.empty(ne)
    for rnd in range(1, overall_iters + 1):
        bcjr_kernel(outputs, next_state, r, prior, sigma2, max_log, alpha, beta, ext)
        p, _ = minsum_kernel(ext, row_ptr, row_idx, col_ptr, col_edge, kappa, minsum_iters, xi, eta, post, est)
        if p == 0:
            return 0, rnd
        for j in range(n):
            prior[j] = post[j] - ext[j]
    return 1, overall_iters


def joint_decode(
    H: SparseParityCheck,
    spec: PRChannelSpec,
    r,
    params: JointMPDParams | None = None,
    trellis: PRTrellis | None = None,
) -> DecodeOutcome:
    params = params or JointMPDParams()
    trellis = trellis or build_trellis(spec)
    r = np.ascontiguousarray(r, dtype=np.float64)
    if r.shape != (H.n,):
        raise ValueError(f"received word must have length {H.n}")
    if not spec.sigma2 > 0.0:
        raise ValueError("noise variance must be positive")
    est = np.zeros(H.n, dtype=np.uint8)
    post = np.zeros(H.n)
    p, rounds = joint_kernel(
        trellis.outputs, trellis.next_state, r, spec.sigma2, params.max_log,
        H.row_ptr, H.row_idx, H.col_ptr, H.col_edge, params.kappa,
        params.overall_iters, params.minsum_iters_per_round, est, post,
    )
    # P(bit = 1) from the final posterior, so the rounding fallback sees the same decision
    prob_one = 1.0 / (1.0 + np.exp(np.clip(post, -700.0, 700.0)))
    return DecodeOutcome(
        estimate=est.copy() if p == 0 else None,
        tentative=est,
        final_point=prob_one,
        iterations_used=int(rounds),
        objective_trace=np.empty(0),
        t_trace=np.empty(0),
    )
