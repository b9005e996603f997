"""Linear vector channels and partial-response (PR) channels.

A PR channel with taps h_0..h_delta maps a (relaxed) bit vector x to

    s_j = sum_d h_d (1 - 2 x_{j-d}),        j = 0..n-1,

with x_{j-d} := 1/2 for j - d < 0, so that pre-block symbols contribute
nothing. Equivalently s = A x + b with a banded lower-triangular A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .solvers import BandedSymmetric

PR_PRESETS: dict[str, tuple[float, ...]] = {
    "dicode": (1.0, -1.0),
    "duobinary": (1.0, 1.0),
    "epr4": (1.0, 1.0, -1.0, -1.0),
    "pr-deg3": (1.0, 1.0, 1.0, -1.0),
    "longtail16": (
        1.000, 0.253, -0.293, 0.084, -0.057, 0.992, -1.438, -0.910, 0.106,
        -0.600, -0.844, 0.018, 0.197, -0.743, 0.490, -0.070, 1.43,
    ),
}


def parse_taps(text: str) -> tuple[float, ...]:
    """A preset name or a comma-separated list of PR coefficients."""
    key = text.strip().lower()
    if key in PR_PRESETS:
        return PR_PRESETS[key]
    try:
        taps = tuple(float(t) for t in key.split(",") if t.strip())
    except ValueError:
        raise ValueError(f"unknown channel {text!r}; presets: {', '.join(PR_PRESETS)}") from None
    if not taps:
        raise ValueError("empty coefficient list")
    return taps


def snr_db_to_sigma2(h, snr_db: float) -> float:
    return float(np.sum(np.square(h))) / 10.0 ** (snr_db / 10.0)


def sigma2_to_snr_db(h, sigma2: float) -> float:
    return 10.0 * math.log10(float(np.sum(np.square(h))) / sigma2)


@dataclass(frozen=True)
class PRChannelSpec:
    """PR taps h_0..h_delta and Gaussian noise variance."""

    h: tuple[float, ...]
    sigma2: float

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(float(v) for v in self.h))
        if not self.h:
            raise ValueError("at least one PR coefficient is required")
        if self.h[0] == 0.0:
            raise ValueError("h_0 must be nonzero (interference matrix would be singular)")
        if self.sigma2 < 0.0:
            raise ValueError("noise variance must be nonnegative")

    @classmethod
    def from_snr_db(cls, h, snr_db: float) -> "PRChannelSpec":
        h = tuple(float(v) for v in h)
        return cls(h=h, sigma2=snr_db_to_sigma2(h, snr_db))

    @property
    def delta(self) -> int:
        return len(self.h) - 1

    @property
    def taps(self) -> np.ndarray:
        return np.asarray(self.h, dtype=np.float64)

    @property
    def snr(self) -> float:
        return float(np.sum(np.square(self.h))) / self.sigma2

    @property
    def snr_db(self) -> float:
        return sigma2_to_snr_db(self.h, self.sigma2)


@dataclass(frozen=True)
class LinearVectorChannel:
    """r = A x + b + z with z ~ N(0, sigma2 I)."""

    A: np.ndarray
    b: np.ndarray
    sigma2: float

    @property
    def n(self) -> int:
        return self.b.shape[0]


def pr_to_linear(spec: PRChannelSpec, n: int) -> LinearVectorChannel:
    if n < 1:
        raise ValueError("block length must be positive")
    A = np.zeros((n, n))
    b = np.zeros(n)
    for j in range(n):
        for d in range(min(spec.delta, j) + 1):
            A[j, j - d] = -2.0 * spec.h[d]
            b[j] += spec.h[d]
    return LinearVectorChannel(A=A, b=b, sigma2=spec.sigma2)


@njit(cache=True)
def pr_signal(h, x):
    n = x.shape[0]
    s = np.zeros(n)
    for j in range(n):
        acc = 0.0
        for d in range(min(h.shape[0] - 1, j) + 1):
            acc += h[d] * (1.0 - 2.0 * x[j - d])
        s[j] = acc
    return s


@njit(cache=True)
def pr_objective(h, r, x):
    s = pr_signal(h, x)
    acc = 0.0
    for j in range(r.shape[0]):
        e = r[j] - s[j]
        acc += e * e
    return acc


@njit(cache=True)
def pr_gradient(h, r, x, t, out):
    """out[p] = d(t f)/dx_p = 4t sum_{j=p}^{min(p+delta, n-1)} h_{j-p} (r_j - s_j)."""
    n = x.shape[0]
    s = pr_signal(h, x)
    for p in range(n):
        acc = 0.0
        for d in range(min(h.shape[0], n - p)):
            acc += h[d] * (r[p + d] - s[p + d])
        out[p] = 4.0 * t * acc
    return out


@njit(cache=True)
def pr_hessian_band(h, t, n, band):
    """band[d, p] = d^2(t f)/dx_{p+d} dx_p for the block of length n.

    Rows near the end of the block lose the taps whose outputs fall past
    j = n - 1, so the matrix is Toeplitz except in its last delta rows.
    """
    delta = h.shape[0] - 1
    for d in range(band.shape[0]):
        for p in range(n - d):
            acc = 0.0
            for j in range(p + d, min(p + delta, n - 1) + 1):
                acc += h[j - p] * h[j - p - d]
            band[d, p] = 8.0 * t * acc
        for p in range(n - d, n):
            band[d, p] = 0.0
    return band


def _vec(v, n: int | None = None) -> np.ndarray:
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.ndim != 1 or (n is not None and v.shape[0] != n):
        raise ValueError(f"expected a length-{n} vector, got shape {v.shape}")
    return v


def noiseless_signal(spec: PRChannelSpec, x) -> np.ndarray:
    return pr_signal(spec.taps, _vec(x))


def transmit(channel: LinearVectorChannel | PRChannelSpec, x, rng: np.random.Generator) -> np.ndarray:
    """Received word r = A x + b + z, with z drawn from ``rng``."""
    x = _vec(x)
    if isinstance(channel, PRChannelSpec):
        s = pr_signal(channel.taps, x)
    else:
        if x.shape[0] != channel.n:
            raise ValueError(f"codeword length {x.shape[0]} != channel length {channel.n}")
        s = channel.A @ x + channel.b
    if channel.sigma2 == 0.0:
        return s
    return s + math.sqrt(channel.sigma2) * rng.standard_normal(s.shape[0])


def objective(spec: PRChannelSpec, r, x) -> float:
    """f(x) = ||r - s(x)||^2 for the PR channel."""
    r = _vec(r)
    return float(pr_objective(spec.taps, r, _vec(x, r.shape[0])))


def objective_gradient(spec: PRChannelSpec, r, x, t: float = 1.0) -> np.ndarray:
    r = _vec(r)
    x = _vec(x, r.shape[0])
    return pr_gradient(spec.taps, r, x, float(t), np.empty_like(x))


def objective_hessian_band(spec: PRChannelSpec, t: float, n: int) -> BandedSymmetric:
    """Hessian of t f as a banded symmetric matrix (half-bandwidth delta).

    f is quadratic, so this depends on neither x nor r.
    """
    band = np.empty((min(spec.delta, n - 1) + 1, n))
    return BandedSymmetric(pr_hessian_band(spec.taps, float(t), n, band))
