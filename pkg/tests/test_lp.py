from fractions import Fraction as F

from hypothesis import given
from hypothesis import strategies as st

from tverberg.lp import check_farkas, solve_feasibility


def test_feasible_simple():
    res = solve_feasibility([[1, 1]], [1])
    assert res.feasible
    assert sum(res.x) == 1 and all(v >= 0 for v in res.x)


def test_infeasible_simple():
    # x1 + x2 = -1 with x >= 0
    res = solve_feasibility([[1, 1]], [-1])
    assert not res.feasible
    assert check_farkas([[1, 1]], [-1], res.farkas)


def test_rational_entries():
    a = [[F(1, 2), F(1, 3)], [1, -1]]
    res = solve_feasibility(a, [1, 0])
    assert res.feasible
    assert res.x == (F(6, 5), F(6, 5))


def test_empty_system():
    assert solve_feasibility([], []).feasible


def test_farkas_checker_rejects_nonsense():
    assert not check_farkas([[1, 1]], [1], [F(1)])
    assert not check_farkas([[1, 1]], [1], [])


@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_verdict_has_a_proof(m, n, data):
    ints = st.integers(-4, 4)
    a = data.draw(st.lists(st.lists(ints, min_size=n, max_size=n), min_size=m, max_size=m))
    b = data.draw(st.lists(ints, min_size=m, max_size=m))
    res = solve_feasibility(a, b)
    if res.feasible:
        assert all(v >= 0 for v in res.x)
        assert all(sum(F(r[j]) * res.x[j] for j in range(n)) == bi for r, bi in zip(a, b))
    else:
        assert check_farkas(a, b, res.farkas)
    assert solve_feasibility(a, b, integral=True) == res
