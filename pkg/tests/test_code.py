import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ipdecode.code import (
    AlistConsistencyError,
    AlistDuplicateError,
    AlistError,
    AlistHeaderError,
    AlistIndexError,
    AlistWeightError,
    SparseParityCheck,
    build_encoder,
    check_parity,
    encode,
    gf2_rank,
    parse_alist,
    write_alist,
)

SMALL = """3 2
2 2
1 2 1
2 2
1 0
1 2
2 0
1 2
2 3
"""


def test_parse_small_matrix():
    H = parse_alist(SMALL)
    assert (H.n, H.m) == (3, 2)
    assert H.rows == ((0, 1), (1, 2))
    assert H.cols[1] == (0, 1)
    assert H.to_dense().tolist() == [[1, 1, 0], [0, 1, 1]]


def test_bundled_204_code_shape(code204):
    assert (code204.n, code204.m) == (204, 102)
    assert all(len(r) == 6 for r in code204.rows)
    assert set(code204.column_weights) == {3}
    assert code204.row_regular and code204.w_r == 6


@pytest.mark.parametrize(
    "text, exc, line",
    [
        ("3\n1 2\n", AlistHeaderError, 1),
        ("3 2\n2 2\n1 2 1\n2 2\n1 2\n1 2\n2 0\n1 2\n2 3\n", AlistWeightError, 5),
        ("3 2\n2 2\n1 2 1\n2 2\n1 0\n1 5\n2 0\n1 2\n2 3\n", AlistIndexError, 6),
        ("3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 1\n2 3\n", AlistDuplicateError, 8),
        ("3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 3\n2 3\n", AlistConsistencyError, 3),
        ("3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n", AlistIndexError, 7),
    ],
)
def test_parse_errors_name_line(text, exc, line):
    with pytest.raises(exc) as info:
        parse_alist(text)
    assert info.value.lineno == line
    assert isinstance(info.value, AlistError)


def test_weight_mismatch_three_listed_for_weight_two():
    text = "3 3\n3 2\n2 1 1\n2 1 1\n1 2 3\n1\n1\n1 2\n1\n1\n"
    with pytest.raises(AlistWeightError) as info:
        parse_alist(text)
    assert info.value.lineno == 5


def test_zero_padding_is_ignored():
    padded = SMALL.replace("2 0\n1 2", "2 0 0\n1 2 0")
    assert parse_alist(padded) == parse_alist(SMALL)


def test_alist_round_trip(code204, toy15):
    for H in (code204, toy15, parse_alist(SMALL)):
        again = parse_alist(write_alist(H))
        assert again == H
        assert write_alist(again) == write_alist(H)


@st.composite
def sparse_matrices(draw):
    n = draw(st.integers(1, 12))
    m = draw(st.integers(1, 8))
    rows = [draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n)) for _ in range(m)]
    return SparseParityCheck.from_rows(n, rows)


@given(sparse_matrices())
@settings(max_examples=60, deadline=None)
def test_round_trip_and_duality_property(H):
    assert parse_alist(write_alist(H)) == H
    for i, row in enumerate(H.rows):
        for j in row:
            assert i in H.cols[j]
    for j, col in enumerate(H.cols):
        for i in col:
            assert j in H.rows[i]


def test_constructor_rejects_broken_duality():
    with pytest.raises(ValueError):
        SparseParityCheck(n=2, rows=((0, 1),), cols=((0,), ()))
    with pytest.raises(ValueError):
        SparseParityCheck.from_rows(2, [(0, 2)])


def test_edge_arrays_are_row_major(toy15):
    H = toy15
    assert H.row_idx.tolist() == [j for r in H.rows for j in r]
    for j in range(H.n):
        edges = H.col_edge[H.col_ptr[j] : H.col_ptr[j + 1]]
        assert sorted(H.row_idx[edges].tolist()) == [j] * len(edges)


def test_single_check_encoder():
    H = SparseParityCheck.from_dense(np.array([[1, 1, 1]]))
    E = build_encoder(H)
    assert E.k == 2
    c = encode(E, np.array([1, 0]))
    assert c.sum() % 2 == 0 and check_parity(H, c)


def test_dependent_rows_reduce_rank():
    H = SparseParityCheck.from_dense(np.array([[1, 0, 1, 1], [1, 0, 1, 1]]))
    assert gf2_rank(H.to_dense()) == 1
    assert build_encoder(H).k == 3


def test_encoder_204(code204, enc204, rng):
    assert enc204.k == code204.n - gf2_rank(code204.to_dense())
    assert enc204.k >= 102
    assert not encode(enc204, np.zeros(enc204.k)).any()
    seen = set()
    for _ in range(100):
        msg = rng.integers(0, 2, enc204.k)
        c = encode(enc204, msg)
        assert check_parity(code204, c)
        # parity recomputed densely
        assert not ((code204.to_dense().astype(int) @ c) % 2).any()
        seen.add(c.tobytes())
    assert len(seen) == 100


def test_encoder_is_injective_on_toy(toy15):
    E = build_encoder(toy15)
    words = {encode(E, np.array([(v >> b) & 1 for b in range(E.k)])).tobytes() for v in range(2**E.k)}
    assert len(words) == 2**E.k


def test_encode_wrong_length(enc204):
    with pytest.raises(ValueError):
        encode(enc204, np.zeros(enc204.k + 1))


def test_check_parity():
    H = parse_alist(SMALL)
    assert check_parity(H, np.zeros(3, dtype=np.uint8))
    assert not check_parity(H, np.array([1, 0, 0]))
    assert check_parity(H, np.array([1, 1, 1]))
    with pytest.raises(ValueError):
        check_parity(H, np.zeros(4, dtype=np.uint8))
