"""Binary LDPC codes: parity-check structure, alist I/O and systematic encoding.

Indices are 0-based everywhere in memory. The alist text format is 1-based;
conversion happens only in :func:`parse_alist` and :func:`write_alist`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class AlistError(ValueError):
    """Base class for alist parse errors; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class AlistHeaderError(AlistError):
    pass


class AlistIndexError(AlistError):
    pass


class AlistDuplicateError(AlistError):
    pass


class AlistWeightError(AlistError):
    pass


class AlistConsistencyError(AlistError):
    pass


@dataclass(frozen=True)
class SparseParityCheck:
    """Sparse binary parity-check matrix H (m x n).

    ``rows[i]`` is the sorted support A_i of check ``i`` and ``cols[j]`` the
    sorted set B_j of checks touching bit ``j``. The flat CSR arrays
    (``row_ptr``, ``row_idx``, ``col_ptr``, ``col_edge``) enumerate edges in
    row-major order; edge ``e`` of check ``i`` is ``row_ptr[i] <= e < row_ptr[i+1]``
    and ``col_edge`` lists, per bit, the ids of the edges incident to it.
    """

    n: int
    rows: tuple[tuple[int, ...], ...]
    cols: tuple[tuple[int, ...], ...] = field(repr=False)
    row_ptr: np.ndarray = field(init=False, repr=False, compare=False)
    row_idx: np.ndarray = field(init=False, repr=False, compare=False)
    col_ptr: np.ndarray = field(init=False, repr=False, compare=False)
    col_edge: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.cols) != self.n:
            raise ValueError(f"expected {self.n} column sets, got {len(self.cols)}")
        for i, row in enumerate(self.rows):
            if len(set(row)) != len(row):
                raise ValueError(f"duplicate index in row {i}")
            if any(j < 0 or j >= self.n for j in row):
                raise ValueError(f"column index out of range in row {i}")
        dual: list[list[int]] = [[] for _ in range(self.n)]
        for i, row in enumerate(self.rows):
            for j in row:
                dual[j].append(i)
        if tuple(tuple(sorted(c)) for c in dual) != tuple(tuple(sorted(c)) for c in self.cols):
            raise ValueError("row and column index sets are not dual")

        row_ptr = np.zeros(self.m + 1, dtype=np.int64)
        row_ptr[1:] = np.cumsum([len(r) for r in self.rows])
        row_idx = np.fromiter((j for r in self.rows for j in r), dtype=np.int64, count=int(row_ptr[-1]))
        edges_of_col: list[list[int]] = [[] for _ in range(self.n)]
        for e, j in enumerate(row_idx):
            edges_of_col[j].append(e)
        col_ptr = np.zeros(self.n + 1, dtype=np.int64)
        col_ptr[1:] = np.cumsum([len(c) for c in edges_of_col])
        col_edge = np.fromiter((e for c in edges_of_col for e in c), dtype=np.int64, count=int(col_ptr[-1]))
        for name, arr in (("row_ptr", row_ptr), ("row_idx", row_idx), ("col_ptr", col_ptr), ("col_edge", col_edge)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_rows(cls, n: int, rows: Sequence[Sequence[int]]) -> "SparseParityCheck":
        rows_t = tuple(tuple(sorted(int(j) for j in r)) for r in rows)
        cols: list[list[int]] = [[] for _ in range(n)]
        for i, r in enumerate(rows_t):
            for j in r:
                if 0 <= j < n:
                    cols[j].append(i)
        return cls(n=n, rows=rows_t, cols=tuple(tuple(c) for c in cols))

    @classmethod
    def from_dense(cls, H: np.ndarray) -> "SparseParityCheck":
        H = np.asarray(H)
        return cls.from_rows(H.shape[1], [np.flatnonzero(row).tolist() for row in H])

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def num_edges(self) -> int:
        return int(self.row_ptr[-1])

    @property
    def w_r(self) -> int:
        return max((len(r) for r in self.rows), default=0)

    @property
    def row_regular(self) -> bool:
        return len({len(r) for r in self.rows}) <= 1

    @property
    def column_weights(self) -> list[int]:
        return [len(c) for c in self.cols]

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            H[i, list(r)] = 1
        return H


def parse_alist(text: str) -> SparseParityCheck:
    """Parse an alist description of a parity-check matrix.

    Zero entries in the column and row index lists are padding and are
    skipped. Every inconsistency raises a subclass of :class:`AlistError`
    naming the offending (1-based) line.
    """
    lines = [(k + 1, ln.split()) for k, ln in enumerate(text.splitlines()) if ln.strip()]
    pos = 0

    def take(what: str, cls=AlistHeaderError):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 0
            raise cls(f"unexpected end of input while reading {what}", last + 1)
        lineno, toks = lines[pos]
        pos += 1
        try:
            return lineno, [int(t) for t in toks]
        except ValueError:
            raise cls(f"non-integer token in {what}", lineno) from None

    lineno, hdr = take("header 'n m'")
    if len(hdr) != 2 or hdr[0] <= 0 or hdr[1] <= 0:
        raise AlistHeaderError("expected two positive integers 'n m'", lineno)
    n, m = hdr
    lineno, mx = take("'max_col_weight max_row_weight'")
    if len(mx) != 2 or min(mx) < 0:
        raise AlistHeaderError("expected 'max_col_weight max_row_weight'", lineno)
    max_cw, max_rw = mx
    lineno, col_w = take("column weights")
    if len(col_w) != n:
        raise AlistHeaderError(f"expected {n} column weights, got {len(col_w)}", lineno)
    if any(w < 0 or w > max_cw for w in col_w):
        raise AlistWeightError("column weight outside [0, max_col_weight]", lineno)
    col_w_line = lineno
    lineno, row_w = take("row weights")
    if len(row_w) != m:
        raise AlistHeaderError(f"expected {m} row weights, got {len(row_w)}", lineno)
    if any(w < 0 or w > max_rw for w in row_w):
        raise AlistWeightError("row weight outside [0, max_row_weight]", lineno)

    def index_block(count: int, weights: list[int], bound: int, what: str) -> list[list[int]]:
        out = []
        for k in range(count):
            lineno, vals = take(f"{what} {k + 1} index list", AlistIndexError)
            idx = [v for v in vals if v != 0]
            if any(v < 0 or v > bound for v in idx):
                raise AlistIndexError(f"{what} {k + 1}: index out of range 1..{bound}", lineno)
            if len(set(idx)) != len(idx):
                raise AlistDuplicateError(f"{what} {k + 1}: duplicate index", lineno)
            if len(idx) != weights[k]:
                raise AlistWeightError(
                    f"{what} {k + 1}: declared weight {weights[k]} but {len(idx)} indices listed", lineno
                )
            out.append([v - 1 for v in idx])
        return out

    cols = index_block(n, col_w, m, "column")
    rows = index_block(m, row_w, n, "row")
    dual: list[list[int]] = [[] for _ in range(n)]
    for i, r in enumerate(rows):
        for j in r:
            dual[j].append(i)
    for j in range(n):
        if sorted(dual[j]) != sorted(cols[j]):
            raise AlistConsistencyError(f"column {j + 1} list disagrees with the row lists", col_w_line)
    return SparseParityCheck(
        n=n, rows=tuple(tuple(sorted(r)) for r in rows), cols=tuple(tuple(sorted(c)) for c in cols)
    )


def load_alist(path: str | Path) -> SparseParityCheck:
    return parse_alist(Path(path).read_text())


def write_alist(H: SparseParityCheck) -> str:
    """Serialize ``H`` to alist text, zero-padding short index lists."""
    cw = H.column_weights
    rw = [len(r) for r in H.rows]
    max_cw, max_rw = max(cw, default=0), max(rw, default=0)
    out = [f"{H.n} {H.m}", f"{max_cw} {max_rw}", " ".join(map(str, cw)), " ".join(map(str, rw))]
    for c in H.cols:
        out.append(" ".join(str(i + 1) for i in c) + " 0" * (max_cw - len(c)))
    for r in H.rows:
        out.append(" ".join(str(j + 1) for j in r) + " 0" * (max_rw - len(r)))
    return "\n".join(s.strip() for s in out) + "\n"


def syndrome(H: SparseParityCheck, bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.shape != (H.n,):
        raise ValueError(f"expected a length-{H.n} vector, got shape {bits.shape}")
    row_of_edge = np.repeat(np.arange(H.m), np.diff(H.row_ptr))
    ones = np.bincount(row_of_edge, weights=(bits[H.row_idx] & 1), minlength=H.m)
    return ones.astype(np.int64) & 1


def check_parity(H: SparseParityCheck, bits: np.ndarray) -> bool:
    """True iff every check has even overlap with ``bits``."""
    return not syndrome(H, np.asarray(bits).astype(np.int64)).any()


def gf2_rref(M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2); returns (R, pivot columns)."""
    R = (np.asarray(M) & 1).astype(np.uint8).copy()
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(R[r:, c])
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            R[[r, p]] = R[[p, r]]
        others = np.flatnonzero(R[:, c])
        others = others[others != r]
        R[others] ^= R[r]
        pivots.append(c)
        r += 1
    return R[:r], pivots


@dataclass(frozen=True)
class Encoder:
    """Systematic encoder derived from H by GF(2) elimination.

    Message bits are placed on the non-pivot (``info_cols``) positions;
    pivot positions are filled from ``parity_map``. Codewords come out in the
    original column order of H.
    """

    H: SparseParityCheck = field(repr=False)
    info_cols: np.ndarray
    pivot_cols: np.ndarray
    parity_map: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return int(self.info_cols.size)

    @property
    def n(self) -> int:
        return self.H.n

    def encode(self, message: np.ndarray) -> np.ndarray:
        return encode(self, message)


def build_encoder(H: SparseParityCheck) -> Encoder:
    if H.n == 0:
        raise ValueError("empty parity-check matrix")
    R, pivots = gf2_rref(H.to_dense())
    pivot_cols = np.asarray(pivots, dtype=np.int64)
    info_cols = np.setdiff1d(np.arange(H.n), pivot_cols)
    parity_map = R[:, info_cols].astype(np.uint8)
    return Encoder(H=H, info_cols=info_cols, pivot_cols=pivot_cols, parity_map=parity_map)


def encode(E: Encoder, message: np.ndarray) -> np.ndarray:
    message = np.asarray(message).astype(np.uint8) & 1
    if message.shape != (E.k,):
        raise ValueError(f"message must have length k={E.k}, got shape {message.shape}")
    x = np.zeros(E.n, dtype=np.uint8)
    x[E.info_cols] = message
    if E.pivot_cols.size:
        x[E.pivot_cols] = (E.parity_map.astype(np.int64) @ message) & 1
    return x


def gf2_rank(M: np.ndarray) -> int:
    return len(gf2_rref(M)[1])
