import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st
from oracles import feasible_brute, odd_subsets, parity_lhs, random_row_regular, theta_brute

from ipdecode.code import SparseParityCheck
from ipdecode.polytope import barrier_value, constraint_value, feasibility, is_feasible, tau

ONE_CHECK = SparseParityCheck.from_rows(3, [(0, 1, 2)])


def test_all_half_on_36_code(code204):
    rep = feasibility(code204, np.full(204, 0.5))
    assert rep.feasible and rep.box_ok and rep.first_violation is None
    np.testing.assert_allclose(rep.theta, -2.0, atol=0)


def test_box_boundary_is_infeasible(code204):
    x = np.full(204, 0.5)
    x[17] = 0.0
    rep = feasibility(code204, x)
    assert not rep.feasible and not rep.box_ok
    assert rep.first_violation == ("box", 17)
    assert not is_feasible(code204, x)


def test_single_check_at_point_nine():
    x = np.array([0.9, 0.9, 0.9])
    rep = feasibility(ONE_CHECK, x)
    assert rep.theta[0] == pytest.approx(0.7, abs=1e-15)
    assert not rep.feasible and rep.first_violation == ("parity", 0)
    assert max(parity_lhs(x, (0, 1, 2), S) for S in odd_subsets((0, 1, 2))) == pytest.approx(0.7, abs=1e-15)
    assert rep.subset(0) == (0, 1, 2)


def test_tie_rules():
    # x_l = 1/2 sits on the "0" side; the flip goes to the smallest index among equals
    rep = feasibility(ONE_CHECK, np.array([0.5, 0.5, 0.5]))
    assert rep.subset(0) == (0,)
    H = SparseParityCheck.from_rows(4, [(0, 1, 2, 3)])
    rep = feasibility(H, np.array([0.75, 0.75, 0.25, 0.25]))
    assert rep.subset(0) == (1,)
    assert rep.theta[0] == parity_lhs([0.75, 0.75, 0.25, 0.25], (0, 1, 2, 3), (1,))


def test_rejects_bad_input(toy15):
    with pytest.raises(ValueError):
        feasibility(toy15, np.full(14, 0.5))
    x = np.full(15, 0.5)
    x[3] = np.nan
    with pytest.raises(ValueError):
        feasibility(toy15, x)


@st.composite
def code_and_point(draw):
    w_r = draw(st.integers(3, 6))
    n = draw(st.integers(w_r, 16))
    m = draw(st.integers(1, 6))
    seed = draw(st.integers(0, 2**32 - 1))
    rows = random_row_regular(np.random.default_rng(seed), n, m, w_r)
    x = np.array(draw(st.lists(st.floats(-0.2, 1.2), min_size=n, max_size=n)))
    return SparseParityCheck.from_rows(n, rows), x


@given(code_and_point())
@example((SparseParityCheck.from_rows(3, [(0, 1, 2)]), np.array([0.5, 0.5, 5e-170])))
@settings(max_examples=300, deadline=None)
def test_matches_brute_force(case):
    H, x = case
    rep = feasibility(H, x)
    thetas, _ = theta_brute(x, H.rows)
    np.testing.assert_allclose(rep.theta, thetas, atol=1e-12, rtol=0)
    # the verdict is only well defined away from rounding distance of a facet
    margin = min(np.min(np.abs(thetas)), np.min(np.abs(x)), np.min(np.abs(1.0 - x)))
    if margin > 1e-12:
        assert rep.feasible == feasible_brute(x, H.rows)
    assert is_feasible(H, x) == rep.feasible
    assert rep.feasible == (rep.box_ok and bool(np.all(rep.theta < 0)))
    for i, row in enumerate(H.rows):
        S = rep.subset(i)
        assert len(S) % 2 == 1
        assert constraint_value(x, row, S) == pytest.approx(rep.theta[i], abs=1e-12)


def test_no_subset_enumeration_on_wide_rows():
    # 2^39 odd subsets would be hopeless to enumerate
    w = 40
    H = SparseParityCheck.from_rows(w, [tuple(range(w))])
    x = np.random.default_rng(0).uniform(0.3, 0.7, w)
    rep = feasibility(H, x)
    big = np.where(x > 0.5, x - 1.0, -x)
    expected = 1.0 + big.sum()
    if np.count_nonzero(x > 0.5) % 2 == 0:
        expected -= np.min(np.abs(2 * x - 1))
    assert rep.theta[0] == pytest.approx(expected, abs=1e-12)


def test_tau_hand_values(toy15):
    x = np.full(3, 0.5)
    assert tau(ONE_CHECK, x, 0, (0,), 0) == pytest.approx(2.0)
    assert tau(ONE_CHECK, x, 0, (0,), 1) == pytest.approx(-2.0)
    H = SparseParityCheck.from_rows(4, [(0, 1, 2)])
    assert tau(H, np.full(4, 0.5), 0, (0,), 3) == 0.0


def test_tau_errors():
    with pytest.raises(ValueError):
        tau(ONE_CHECK, np.full(3, 0.5), 0, (0, 1), 0)
    with pytest.raises(ValueError):
        tau(ONE_CHECK, np.full(3, 0.9), 0, (0, 1, 2), 0)


def test_dominant_subset_has_largest_tau():
    rng = np.random.default_rng(3)
    rows = random_row_regular(rng, 12, 5, 5)
    H = SparseParityCheck.from_rows(12, rows)
    done = 0
    while done < 100:
        x = rng.uniform(0.05, 0.95, 12)
        if not is_feasible(H, x):
            continue
        rep = feasibility(H, x)
        for i, row in enumerate(H.rows):
            best = rep.subset(i)
            for k in row:
                top = abs(tau(H, x, i, best, k))
                for S in odd_subsets(row):
                    assert top >= abs(tau(H, x, i, S, k)) - 1e-12
        done += 1


def test_barrier_all_half_single_check():
    assert barrier_value(ONE_CHECK, np.full(3, 0.5)) == pytest.approx(10 * math.log(2))


def test_barrier_infinite_off_interior(toy15):
    x = np.full(15, 0.5)
    x[0] = 1.0
    assert barrier_value(toy15, x) == math.inf
    assert barrier_value(ONE_CHECK, np.array([0.9, 0.9, 0.9])) == math.inf


def test_barrier_decreases_toward_center():
    rng = np.random.default_rng(9)
    rows = random_row_regular(rng, 12, 6, 6)
    H = SparseParityCheck.from_rows(12, rows)
    center = np.full(12, 0.5)
    for _ in range(10):
        far = rng.uniform(0.0, 1.0, 12)
        # walk from near the boundary of the segment's feasible part to the center
        ts = np.linspace(0.0, 1.0, 201)
        pts = [center + s * (far - center) for s in ts]
        ok = [s for s, p in zip(ts, pts) if is_feasible(H, p)]
        edge = max(ok)
        vals = [barrier_value(H, center + s * (far - center)) for s in np.linspace(edge, 0.0, 25)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
