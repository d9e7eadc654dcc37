"""Cross-check of the in-house solver against cvxpy on small instances."""
import numpy as np
import pytest

from dynent.channels import random_channel, swap_channel
from dynent.measures import diamond_distance, generalized_robustness

cp = pytest.importorskip("cvxpy")

DIMS = (2, 2, 2, 2)
# Clarabel flags some of these solves as inaccurate; agreement is asserted directly
pytestmark = pytest.mark.filterwarnings("ignore:Solution may be inaccurate")


def cvx_diamond(n, m):
    d_in, d_out = n.d_in, n.d_out
    diff = d_in * (n.choi - m.choi)
    w = cp.Variable((d_in * d_out, d_in * d_out), hermitian=True)
    rho = cp.Variable((d_in, d_in), hermitian=True)
    cons = [w >> 0, rho >> 0, cp.trace(rho) == 1, cp.kron(rho, np.eye(d_out)) - w >> 0]
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(diff @ w))), cons)
    prob.solve(solver="CLARABEL")
    return prob.value


def cvx_generalized_robustness(n):
    d_in, d_out = n.d_in, n.d_out
    y = cp.Variable((d_in * d_out, d_in * d_out), hermitian=True)
    t = cp.Variable()
    pt = cp.partial_transpose(cp.partial_transpose(y, list(n.dims), 1), list(n.dims), 3)
    marg = cp.partial_trace(y, [d_in, d_out], 1)
    cons = [y - n.choi >> 0, pt >> 0, marg == t * np.eye(d_in) / d_in]
    prob = cp.Problem(cp.Minimize(t), cons)
    prob.solve(solver="CLARABEL")
    return prob.value - 1


@pytest.mark.parametrize("seed", range(3))
def test_diamond_agrees(seed):
    n, m = random_channel(DIMS, seed), random_channel(DIMS, 100 + seed)
    assert abs(diamond_distance(n, m) - cvx_diamond(n, m)) < 1e-5


@pytest.mark.parametrize("seed", range(3))
def test_generalized_robustness_agrees(seed):
    n = random_channel(DIMS, seed)
    assert abs(generalized_robustness(n).value - cvx_generalized_robustness(n)) < 1e-5


def test_swap_robustness_agrees():
    assert abs(cvx_generalized_robustness(swap_channel(2)) - 3) < 1e-5
