"""Independent reference implementations used as test oracles.

Everything here is deliberately naive: explicit subset enumeration, dense
matrices and exhaustive search.
"""

from __future__ import annotations

import itertools

import numpy as np


def odd_subsets(support):
    for size in range(1, len(support) + 1, 2):
        yield from itertools.combinations(support, size)


def parity_lhs(x, support, S):
    S = set(S)
    return 1.0 + sum(x[l] - 1.0 if l in S else -x[l] for l in support)


def theta_brute(x, rows):
    """Per-check maximum over all odd subsets, and one maximizing subset."""
    thetas, subsets = [], []
    for support in rows:
        best, arg = -np.inf, None
        for S in odd_subsets(support):
            v = parity_lhs(x, support, S)
            if v > best:
                best, arg = v, S
        thetas.append(best)
        subsets.append(arg)
    return np.array(thetas), subsets


def feasible_brute(x, rows):
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        return False
    return all(parity_lhs(x, sup, S) < 0.0 for sup in rows for S in odd_subsets(sup))


def random_row_regular(rng, n, m, w_r):
    """m checks of weight w_r on n bits; column weights may vary."""
    return [tuple(sorted(rng.choice(n, size=w_r, replace=False).tolist())) for _ in range(m)]


def dense_pr(h, n):
    """A, b of the PR channel built from the convolution definition directly."""
    h = np.asarray(h, dtype=float)
    A = np.zeros((n, n))
    b = np.zeros(n)
    for j in range(n):
        for d, hd in enumerate(h):
            if j - d >= 0:
                A[j, j - d] = -2.0 * hd
                b[j] += hd
    return A, b


def approx_gradient_brute(x, rows, h, r, t):
    """Approximate barrier gradient from explicit S^(i), plus t * dense channel gradient."""
    n = len(x)
    A, b = dense_pr(h, n)
    g = 2.0 * t * A.T @ (A @ x + b - r)
    g += -1.0 / x - 1.0 / (x - 1.0)
    thetas, subsets = theta_brute(x, rows)
    for support, S, th in zip(rows, subsets, thetas):
        for k in support:
            g[k] += ((k not in S) - (k in S)) / th
    return g


def codebook(H_dense):
    """All codewords of a small code by exhaustive search."""
    m, n = H_dense.shape
    words = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)
    ok = np.all((words @ H_dense.T) % 2 == 0, axis=1)
    return words[ok]


def mld(words, h, r):
    """Codeword minimizing ||r - (A c + b)||^2 (ties to the first)."""
    A, b = dense_pr(h, words.shape[1])
    d = np.sum((r - (words @ A.T + b)) ** 2, axis=1)
    return words[int(np.argmin(d))]


def bit_marginals_brute(h, r, prior_llr, sigma2):
    """Exact a-posteriori LLRs by summing over all 2^n inputs."""
    n = len(r)
    A, b = dense_pr(h, n)
    X = np.array(list(itertools.product((0, 1), repeat=n)), dtype=float)
    logp = -np.sum((r - (X @ A.T + b)) ** 2, axis=1) / (2.0 * sigma2)
    logp += np.sum(np.where(X == 0, 0.5, -0.5) * prior_llr, axis=1)
    out = np.empty(n)
    for j in range(n):
        l0 = np.logaddexp.reduce(logp[X[:, j] == 0])
        l1 = np.logaddexp.reduce(logp[X[:, j] == 1])
        out[j] = l0 - l1
    return out
