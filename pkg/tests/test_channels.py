import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dynent.channels import (BipartiteChannel, apply, depolarizing_channel, from_kraus, identity_channel, is_ppt,
                             isotropic_state, maximally_entangled, mixture, operator_schmidt, product_channel,
                             random_channel, random_local_choi, random_separable_channel, swap_channel,
                             swap_gate, tensor, unitary_channel)
from dynent.linalg import (DensityOperator, min_eigenvalue, partial_trace, partial_transpose,
                           permute_subsystems, random_unitary)
from dynent.measures import generalized_robustness


def brute_choi(kraus, d_in):
    """Choi by feeding every |i><j| through the Kraus set (normalized)."""
    d_out = kraus[0].shape[0]
    j = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for a in range(d_in):
        for b in range(d_in):
            e = np.zeros((d_in, d_in))
            e[a, b] = 1
            j += np.kron(e, sum(k @ e @ k.conj().T for k in kraus))
    return j / d_in


def test_identity_channel_choi():
    phi = maximally_entangled(2).matrix
    want = permute_subsystems(np.kron(phi, phi), (2, 2, 2, 2), [0, 2, 1, 3])
    assert np.allclose(identity_channel(2, 2).choi, want, atol=1e-12)
    assert np.allclose(from_kraus([np.eye(4)], (2, 2, 2, 2)).choi, want, atol=1e-12)


def test_fully_depolarizing_choi():
    assert np.allclose(depolarizing_channel((2, 2, 2, 2), 1.0).choi, np.eye(16) / 16)


def test_swap_from_kraus_matches_oracle():
    f = swap_gate(2)
    assert np.allclose(from_kraus([f], (2, 2, 2, 2)).choi, swap_channel(2).choi, atol=1e-12)
    # the operator ordering (A0 B0 A1 B1) is the plain (in, out) ordering of the brute-force Choi
    assert np.allclose(brute_choi([f], 4), swap_channel(2).choi, atol=1e-12)


def test_from_kraus_rejects_non_tp():
    with pytest.raises(ValueError):
        from_kraus([0.5 * np.eye(4)], (2, 2, 2, 2))


@pytest.mark.parametrize("k", [2, 3])
def test_swap_choi_is_twisted_product(k):
    phi = maximally_entangled(k).matrix
    # kron on (A0, B1, A1, B0) reordered to (A0, B0, A1, B1)
    want = permute_subsystems(np.kron(phi, phi), (k, k, k, k), [0, 3, 2, 1])
    assert np.max(np.abs(swap_channel(k).choi - want)) <= 1e-12


def test_swap_choi_rank_and_pt():
    j = swap_channel(2).choi
    assert j.shape == (16, 16) and np.linalg.matrix_rank(j, tol=1e-10) == 1
    assert abs(np.trace(j) - 1) < 1e-12
    lam = np.linalg.eigvalsh(partial_transpose(j, (2, 2, 2, 2), [1, 3]))
    assert abs(lam[0] + 0.25) < 1e-12
    flag = is_ppt(swap_channel(2))
    assert not flag and abs(flag.min_pt_eigenvalue + 0.25) < 1e-12


def test_swap_basis_action():
    ket = np.zeros(4)
    ket[1] = 1  # |01>
    out = apply(swap_channel(2), DensityOperator.from_vector(ket, (2, 2)))
    want = np.zeros((4, 4))
    want[2, 2] = 1  # |10>
    assert np.allclose(out.matrix, want)


@pytest.mark.parametrize("k", [2, 3])
def test_teleportation_identity(k):
    phi = maximally_entangled(k).matrix
    # Phi_{A2 A1} (x) Phi_{B2 B1} on (A2, B2, A1, B1); A2 B2 go into the swap
    state = DensityOperator(permute_subsystems(np.kron(phi, phi), (k, k, k, k), [0, 2, 1, 3]), (k, k, k, k))
    out = apply(swap_channel(k), state)
    # expected Phi_{A_out B1} (x) Phi_{B_out A1}: kron on (Aout, B1, Bout, A1) -> (Aout, Bout, A1, B1)
    want = permute_subsystems(np.kron(phi, phi), (k, k, k, k), [0, 2, 3, 1])
    assert np.allclose(out.matrix, want, atol=1e-12)


def test_apply_identity_and_depolarizing(rng):
    from dynent.linalg import random_density
    rho = random_density((2, 2), rng)
    assert np.allclose(apply(identity_channel(2, 2), rho).matrix, rho.matrix, atol=1e-12)
    assert np.allclose(apply(depolarizing_channel((2, 2, 2, 2), 1.0), rho).matrix, np.eye(4) / 4, atol=1e-12)
    with pytest.raises(ValueError):
        apply(identity_channel(2, 2), random_density((3, 2), rng))


def test_maximally_entangled():
    assert np.allclose(maximally_entangled(1).matrix, [[1.0]])
    phi = maximally_entangled(3).matrix
    assert np.linalg.matrix_rank(phi, tol=1e-10) == 1
    assert np.allclose(partial_trace(phi, (3, 3), [0]), np.eye(3) / 3)


def test_max_overlap_with_product_states(rng):
    from dynent.measures import mes_overlap_sampled
    assert mes_overlap_sampled(2, samples=300, seed=1) <= 0.5 + 1e-9


@pytest.mark.parametrize("k", [2, 3, 4])
def test_isotropic_boundary(k):
    def lam(p):
        return min_eigenvalue(partial_transpose(isotropic_state(k, p).matrix, (k, k), [1]))

    assert abs(lam(1.0 / k)) < 1e-9
    assert lam(1.0 / k - 1e-3) > 0 > lam(1.0 / k + 1e-3)


def test_isotropic_examples():
    assert np.allclose(isotropic_state(2, 1.0).matrix, maximally_entangled(2).matrix)
    assert np.allclose(isotropic_state(3, 1 / 9).matrix, np.eye(9) / 9)
    with pytest.raises(ValueError):
        isotropic_state(2, 1.5)


def test_schmidt_of_swap():
    terms = operator_schmidt(swap_gate(2), (2, 2))
    coeffs = np.array([c for c, _, _ in terms])
    assert np.allclose(coeffs, 1.0)
    assert abs(coeffs.sum() ** 2 / 4 - 1 - 3) < 1e-12


def test_schmidt_of_product_unitary():
    terms = operator_schmidt(np.eye(6), (2, 3))
    assert len(terms) == 1 and abs(terms[0][0] - np.sqrt(6)) < 1e-12


def test_schmidt_rejects_non_unitary():
    with pytest.raises(ValueError):
        operator_schmidt(2 * np.eye(4), (2, 2))


@given(st.integers(0, 10 ** 6), st.sampled_from([(2, 2), (2, 3), (3, 2)]))
def test_schmidt_reconstruction_and_norm(seed, dims):
    u = random_unitary(dims[0] * dims[1], np.random.default_rng(seed))
    terms = operator_schmidt(u, dims)
    rec = sum(c * np.kron(a, b) for c, a, b in terms)
    assert np.max(np.abs(rec - u)) <= 1e-9
    coeffs = [c for c, _, _ in terms]
    assert coeffs == sorted(coeffs, reverse=True)
    assert abs(sum(c * c for c in coeffs) - dims[0] * dims[1]) < 1e-9
    gram = np.array([[np.vdot(a, a2) for _, a2, _ in terms] for _, a, _ in terms])
    assert np.allclose(gram, np.eye(len(terms)), atol=1e-9)


def test_product_and_mixture_are_ppt(rng):
    p = product_channel(random_local_choi(2, 2, rng), random_local_choi(2, 2, rng), (2, 2, 2, 2))
    q = product_channel(random_local_choi(2, 2, rng), random_local_choi(2, 2, rng), (2, 2, 2, 2))
    assert is_ppt(p) and is_ppt(mixture([p, q], [0.3, 0.7]))
    assert mixture([p, q], [0.3, 0.7]).certified_separable


@pytest.mark.parametrize("seed", range(100))
def test_random_channel_valid(seed):
    n = random_channel((2, 2, 2, 2), seed)
    marg = partial_trace(n.choi, (4, 4), [0])
    assert np.max(np.abs(marg - np.eye(4) / 4)) <= 1e-9
    assert n.choi.shape == (16, 16) and abs(np.trace(n.choi) - 1) < 1e-12
    s = random_separable_channel((2, 2, 2, 2), seed, terms=3)
    assert is_ppt(s) and s.certified_separable


def test_random_channel_deterministic():
    assert np.array_equal(random_channel((2, 2, 2, 2), 5).choi, random_channel((2, 2, 2, 2), 5).choi)
    assert not np.array_equal(random_channel((2, 2, 2, 2), 5).choi, random_channel((2, 2, 2, 2), 6).choi)


def test_single_term_separable_is_product():
    s = random_separable_channel((2, 2, 2, 2), 3, terms=1)
    # a product channel's Choi factorizes across (A0 A1 : B0 B1)
    j = permute_subsystems(s.choi, (2, 2, 2, 2), [0, 2, 1, 3])
    ja, jb = partial_trace(j, (4, 4), [0]), partial_trace(j, (4, 4), [1])
    assert np.allclose(j, np.kron(ja, jb), atol=1e-12)


def test_separable_has_zero_robustness():
    s = random_separable_channel((2, 2, 2, 2), 11, terms=2)
    assert abs(generalized_robustness(s).value) < 1e-6


def test_channel_validation_messages():
    with pytest.raises(ValueError, match="trace"):
        BipartiteChannel(np.eye(16) / 8, (2, 2, 2, 2))
    with pytest.raises(ValueError, match="trace preserving"):
        BipartiteChannel(np.diag([1.0] + [0.0] * 15), (2, 2, 2, 2))
    with pytest.raises(ValueError, match="shape"):
        BipartiteChannel(np.eye(8) / 8, (2, 2, 2, 2))


def test_json_round_trip():
    n = random_channel((2, 2, 2, 2), 4)
    data = json.loads(n.to_json())
    assert set(data) >= {"dims", "choi_re", "choi_im"}
    m = BipartiteChannel.from_json(n.to_json())
    assert np.array_equal(m.choi, n.choi) and m.dims == n.dims


def test_tensor_of_product_channels_is_ppt(rng):
    p = random_separable_channel((2, 1, 2, 1), 1)
    q = random_separable_channel((1, 2, 1, 2), 2)
    t = tensor(p, q)
    assert t.dims == (2, 2, 2, 2) and is_ppt(t)


def test_unitary_channel_matches_kraus(rng):
    u = random_unitary(4, rng)
    assert np.allclose(unitary_channel(u, (2, 2, 2, 2)).choi, brute_choi([u], 4), atol=1e-12)
