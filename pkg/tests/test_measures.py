import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dynent.channels import (depolarizing_channel, identity_channel, isotropic_state, maximally_entangled,
                             random_channel, random_separable_channel, swap_channel, swap_gate, unitary_channel)
from dynent.linalg import DensityOperator, random_unitary
from dynent.measures import (MeasureReport, choi_input, diamond_choi_sandwich_check, diamond_distance, dmax,
                             eh_fixed_input, eh_maximize, eh_swapped_minimax, fidelity_diamond_transfer_check,
                             generalized_robustness, hypothesis_testing_divergence, inequality_suite,
                             isotropic_threshold, liberal_smoothed_log_robustness, log_robustness,
                             mes_overlap_ppt, mes_overlap_sampled, nielsen_unitary_robustness,
                             smoothed_log_robustness, standard_robustness)

DIMS = (2, 2, 2, 2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def neyman_pearson(p, q, eps):
    """Optimal type-II error for commuting states: fill the test by likelihood ratio."""
    order = np.argsort(-(p / np.maximum(q, 1e-300)))
    need, beta = 1.0 - eps, 0.0
    for i in order:
        if need <= 0:
            break
        take = min(1.0, need / p[i]) if p[i] > 0 else 0.0
        need -= take * p[i]
        beta += take * q[i]
    return beta


# -- diamond distance and dmax ----------------------------------------------------
def test_diamond_trivial_cases():
    n = random_channel(DIMS, 3)
    assert diamond_distance(n, n) < 1e-7
    x = np.kron(np.array([[0, 1], [1, 0]]), np.eye(2))
    assert abs(diamond_distance(identity_channel(2, 2), unitary_channel(x, DIMS)) - 1) < 1e-6
    with pytest.raises(ValueError):
        diamond_distance(n, random_channel((2, 2, 2, 3), 0))


@pytest.mark.parametrize("theta", [0.3, 1.1, 2.0, 3.0])
def test_diamond_of_phase_gate(theta):
    # numerical-range oracle: the hull of {1, e^{i theta}} sits at distance cos(theta/2) from 0
    u = np.kron(np.diag([1, np.exp(1j * theta)]), np.eye(2))
    d = diamond_distance(identity_channel(2, 2), unitary_channel(u, DIMS))
    assert abs(d - math.sin(theta / 2)) < 1e-6


def test_diamond_triangle(rng):
    for s in range(4):
        a, b, c = (random_channel(DIMS, 10 * s + i) for i in range(3))
        assert diamond_distance(a, c) <= diamond_distance(a, b) + diamond_distance(b, c) + 1e-8


def test_dmax_examples():
    n = random_channel(DIMS, 1)
    assert abs(dmax(n, n)) < 1e-9
    assert abs(dmax(swap_channel(2), depolarizing_channel(DIMS, 1.0)) - math.log2(16)) < 1e-9
    assert dmax(depolarizing_channel(DIMS, 1.0), swap_channel(2)) == math.inf
    assert dmax(n, random_channel(DIMS, 2)) >= 0


# -- robustness -----------------------------------------------------------------------
def test_swap_robustness_golden():
    g, s = generalized_robustness(swap_channel(2)), standard_robustness(swap_channel(2))
    assert abs(g.value - 3) < 1e-5 and abs(s.value - 3) < 1e-5
    assert g.bound_kind == "lower-bound-via-PPT"
    assert abs(log_robustness(swap_channel(2)) - 2) < 1e-5


def test_free_channel_robustness():
    s = random_separable_channel(DIMS, 5, terms=3)
    assert abs(generalized_robustness(s).value) < 1e-6
    assert abs(standard_robustness(s).value) < 1e-6
    assert abs(log_robustness(s)) < 1e-6


@pytest.mark.parametrize("seed", range(30))
def test_standard_dominates_generalized(seed):
    n = random_channel(DIMS, seed)
    assert standard_robustness(n).value >= generalized_robustness(n).value - 1e-6


@pytest.mark.parametrize("seed", range(10))
def test_log_robustness_is_min_dmax(seed):
    # the optimal free channel, checked by the eigenvalue route of dmax
    n = random_channel(DIMS, seed)
    rep = generalized_robustness(n)
    lr = math.log2(1 + rep.value)
    assert abs(dmax(n, rep.artifacts["free"]) - lr) < 1e-5
    assert rep.artifacts["free"].is_ppt().min_pt_eigenvalue > -1e-7


def test_robustness_artifacts_decompose():
    n = random_channel(DIMS, 8)
    rep = standard_robustness(n)
    t = 1 + rep.value
    recon = (n.choi + rep.value * rep.artifacts["mix"].choi) / t
    assert np.allclose(recon, rep.artifacts["free"].choi, atol=1e-6)
    assert rep.artifacts["mix"].is_ppt().min_pt_eigenvalue > -1e-7


def test_smoothing_endpoints():
    n = random_channel(DIMS, 4)
    assert abs(smoothed_log_robustness(n, 0).value - log_robustness(n)) < 1e-6
    assert abs(smoothed_log_robustness(n, 1.0).value) < 1e-6
    with pytest.raises(ValueError):
        smoothed_log_robustness(n, -0.1)


@pytest.mark.parametrize("seed", range(10))
def test_smoothing_monotone_and_liberal_below(seed):
    n = random_channel(DIMS, 100 + seed)
    a = smoothed_log_robustness(n, 0.01).value
    b = smoothed_log_robustness(n, 0.1).value
    assert b <= a + 1e-6
    c = smoothed_log_robustness(n, 0.05).value
    lib = liberal_smoothed_log_robustness(n, choi_input(n.dims), 0.05).value
    assert lib <= c + 1e-6


def test_smoothed_channel_within_ball():
    n = random_channel(DIMS, 9)
    rep = smoothed_log_robustness(n, 0.05)
    assert diamond_distance(n, rep.artifacts["smoothed"]) <= 0.05 + 1e-6


def test_liberal_at_zero_with_full_rank_input():
    n = random_channel(DIMS, 12)
    lib = liberal_smoothed_log_robustness(n, choi_input(n.dims), 0).value
    assert abs(lib - smoothed_log_robustness(n, 0).value) < 1e-5
    s = random_separable_channel(DIMS, 1, 2)
    assert abs(liberal_smoothed_log_robustness(s, choi_input(DIMS), 0.05).value) < 1e-6


# -- closed form for unitaries -------------------------------------------------------
def test_nielsen_values():
    assert abs(nielsen_unitary_robustness(swap_gate(2), (2, 2)).value - 3) < 1e-9
    assert abs(nielsen_unitary_robustness(swap_gate(3), (3, 3)).value - 8) < 1e-9
    rng = np.random.default_rng(1)
    prod = np.kron(random_unitary(2, rng), random_unitary(3, rng))
    assert abs(nielsen_unitary_robustness(prod, (2, 3)).value) < 1e-9


def test_nielsen_matches_sdp_for_cnot():
    rep = nielsen_unitary_robustness(CNOT, (2, 2))
    assert abs(rep.value - 1) < 1e-9
    assert abs(generalized_robustness(unitary_channel(CNOT, DIMS)).value - rep.value) < 1e-5


def test_nielsen_inapplicable_for_generic_unitary():
    rep = nielsen_unitary_robustness(random_unitary(6, np.random.default_rng(3)), (2, 3))
    assert rep.status == "inapplicable" and rep.value is None


@pytest.mark.parametrize("seed", range(3))
def test_nielsen_matches_sdp_for_two_qubit_unitaries(seed):
    # two-qubit Schmidt factors are local rotations of Paulis, so the closed form always applies
    u = random_unitary(4, np.random.default_rng(seed))
    rep = nielsen_unitary_robustness(u, (2, 2))
    assert rep.status == "ok"
    ch = unitary_channel(u, DIMS)
    assert abs(generalized_robustness(ch).value - rep.value) < 1e-5
    assert abs(standard_robustness(ch).value - rep.value) < 1e-5


# -- hypothesis testing --------------------------------------------------------------
def test_hypothesis_testing_examples():
    rho = DensityOperator(np.diag([0.7, 0.3]), (2,))
    assert abs(hypothesis_testing_divergence(rho, rho, 0)) < 1e-7
    a = DensityOperator(np.diag([1.0, 0.0]), (2,))
    b = DensityOperator(np.diag([0.0, 1.0]), (2,))
    assert hypothesis_testing_divergence(a, b, 0) == math.inf
    phi = maximally_entangled(2)
    mixed = DensityOperator(np.eye(4) / 4, (2, 2))
    assert abs(hypothesis_testing_divergence(phi, mixed, 0) - 2) < 1e-7
    with pytest.raises(ValueError):
        hypothesis_testing_divergence(phi, mixed, 1.0)


@given(st.integers(0, 10 ** 6), st.floats(0.01, 0.9))
def test_hypothesis_testing_matches_neyman_pearson(seed, eps):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
    want = -math.log2(neyman_pearson(p, q, eps))
    got = hypothesis_testing_divergence(DensityOperator(np.diag(p), (4,)), DensityOperator(np.diag(q), (4,)), eps)
    assert abs(got - want) < 1e-5


def test_eh_swap_and_free():
    assert abs(eh_fixed_input(swap_channel(2), choi_input(DIMS), 0).value - 2) < 1e-6
    s = random_separable_channel(DIMS, 2, 2)
    assert abs(eh_fixed_input(s, choi_input(DIMS), 0).value) < 1e-6
    assert abs(eh_maximize(s, 0, restarts=2).value) < 1e-6


@pytest.mark.parametrize("eps", [0.05, 0.2])
def test_eh_free_channel_at_positive_eps(eps):
    s = random_separable_channel(DIMS, 3, 2)
    assert abs(eh_fixed_input(s, choi_input(DIMS), eps).value + math.log2(1 - eps)) < 1e-6


@pytest.mark.parametrize("seed", range(3))
def test_eh_two_routes_agree(seed):
    n = random_channel(DIMS, 200 + seed)
    psi = choi_input(DIMS)
    a = eh_fixed_input(n, psi, 0.1).value
    b = eh_swapped_minimax(n, psi, 0.1).value
    assert abs(a - b) < 1e-5


@pytest.mark.parametrize("seed", range(5))
def test_eh_monotone_in_eps(seed):
    n = random_channel(DIMS, 300 + seed)
    psi = choi_input(DIMS)
    assert eh_fixed_input(n, psi, 0.1).value >= eh_fixed_input(n, psi, 0).value - 1e-6


def test_eh_maximize_dominates_ansatz():
    n = random_channel(DIMS, 41)
    rep = eh_maximize(n, 0.1, restarts=1, rounds=2)
    assert rep.bound_kind == "heuristic"
    assert rep.value >= eh_fixed_input(n, choi_input(DIMS), 0.1).value - 1e-9
    assert eh_maximize(swap_channel(2), 0, restarts=1).value >= 2 - 1e-6


# -- overlap and inequality checks -----------------------------------------------------
@pytest.mark.parametrize("k", [2, 3, 4])
def test_mes_overlap(k):
    assert abs(mes_overlap_ppt(k).value - 1 / k) < 1e-6
    assert mes_overlap_sampled(k, samples=200, seed=k) <= 1 / k + 1e-9


def test_isotropic_threshold():
    for k in (2, 3, 4):
        assert abs(isotropic_threshold(k) - 1 / k) < 1e-8
    assert isotropic_state(2, 0.5).dims == (2, 2)


def test_checks_on_equal_pair():
    n = random_channel(DIMS, 6)
    t = fidelity_diamond_transfer_check(n, n, samples=3)
    assert abs(t["slack_output_fidelity"]) < 1e-6 and t["slack_choi_fidelity"] > -1e-6
    s = diamond_choi_sandwich_check(n, n)
    assert not s["violated"] and not t["violated"]


def test_checks_on_near_identical_pair():
    n = random_channel(DIMS, 7)
    m = random_channel(DIMS, 8)
    lo, hi = 0.0, 0.01
    # bisect the mixing weight so the pair sits at diamond distance about 1e-3
    from dynent.channels import mixture
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if diamond_distance(n, mixture([n, m], [1 - mid, mid])) < 1e-3:
            lo = mid
        else:
            hi = mid
    near = mixture([n, m], [1 - lo, lo])
    t = fidelity_diamond_transfer_check(n, near, samples=5)
    assert abs(t["diamond"] - 1e-3) < 1e-5
    assert t["slack_choi_fidelity"] >= -1e-8 and not t["violated"]


def test_inequality_suite_clean():
    out = inequality_suite(pairs=50, seed=7)
    assert out["violations"] == 0


def test_report_json_round_trip():
    rep = generalized_robustness(swap_channel(2))
    data = json.loads(rep.to_json())
    assert {"name", "value", "bound_kind", "epsilon", "residuals"} <= set(data)
    back = MeasureReport.from_dict(data)
    assert back.value == rep.value and back.bound_kind == rep.bound_kind
    inf = MeasureReport("dmax", math.inf, "exact")
    assert MeasureReport.from_dict(json.loads(inf.to_json())).value == math.inf
