import numpy as np
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from signsat.simplex import phase_one


def test_simple_feasible():
    res = phase_one([[1, 1, 0], [0, 1, 1]], [1, 1])
    assert res.feasible
    assert np.allclose(np.array([[1, 1, 0], [0, 1, 1]]) @ res.x, [1, 1])
    assert np.all(res.x >= 0)


def test_simple_infeasible():
    res = phase_one([[1, 1], [1, 1]], [1, 2])
    assert not res.feasible
    assert res.infeasibility > 0


def test_negative_rhs():
    res = phase_one([[-1, 0], [0, 1]], [-2, 3])
    assert res.feasible and np.allclose(res.x, [2, 3])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 5), st.integers(3, 40))
def test_agrees_with_highs(seed, m, n):
    g = np.random.default_rng(seed)
    A = g.normal(size=(m, n))
    if g.random() < 0.5:
        b = A @ g.exponential(size=n)
    else:
        b = g.normal(size=m)
    ours = phase_one(A, b)
    ref = linprog(np.zeros(n), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert ours.feasible == (ref.status == 0)
    if ours.feasible:
        assert np.all(ours.x >= 0)
        assert np.allclose(A @ ours.x, b, atol=1e-8)
