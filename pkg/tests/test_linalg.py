import numpy as np
import pytest
from hypothesis import given, strategies as st

from dynent.channels import maximally_entangled
from dynent.linalg import (DensityOperator, fidelity, kron, min_eigenvalue, partial_trace, partial_transpose,
                           permute_subsystems, random_density, random_unitary, trace_norm)


def random_matrix(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def random_hermitian(rng, d):
    m = random_matrix(rng, d)
    return m + m.conj().T


def naive_partial_trace(m, da, db, keep_first):
    """Element-wise summation oracle for a bipartite partial trace."""
    out = np.zeros((da, da) if keep_first else (db, db), dtype=complex)
    for i in range(da):
        for j in range(da):
            for k in range(db):
                for l in range(db):
                    v = m[i * db + k, j * db + l]
                    if keep_first and k == l:
                        out[i, j] += v
                    if not keep_first and i == j:
                        out[k, l] += v
    return out


seeds = st.integers(0, 2 ** 31 - 1)


def test_kron_examples():
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    x = np.array([[0, 1], [1, 0]])
    p0 = np.diag([1, 0])
    out = kron(p0, x)
    assert np.allclose(out[:2, :2], x)
    assert np.allclose(out[2:, :], 0) and np.allclose(out[:, 2:], 0)
    phi = maximally_entangled(2).matrix
    pp = kron(phi, phi)
    assert abs(np.trace(pp) - 1) < 1e-12
    assert np.linalg.matrix_rank(pp) == 1


@given(seeds)
def test_kron_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_matrix(rng, d) for d in (2, 3, 2))
    assert np.max(np.abs(kron(kron(a, b), c) - kron(a, kron(b, c)))) < 1e-12


def test_partial_trace_examples(rng):
    phi = maximally_entangled(2).matrix
    assert np.allclose(partial_trace(phi, (2, 2), [0]), np.eye(2) / 2)
    rho, sigma = random_density((2,), rng).matrix, random_density((3,), rng).matrix
    assert np.allclose(partial_trace(kron(rho, sigma), (2, 3), [1]), sigma)
    with pytest.raises(ValueError):
        partial_trace(np.eye(6), (2, 2), [0])


def test_partial_trace_matches_summation_oracle(rng):
    for _ in range(20):
        m = random_hermitian(rng, 6)
        assert np.allclose(partial_trace(m, (2, 3), [0]), naive_partial_trace(m, 2, 3, True))
        assert np.allclose(partial_trace(m, (2, 3), [1]), naive_partial_trace(m, 2, 3, False))
        assert abs(np.trace(partial_trace(m, (2, 3), [1])) - np.trace(m)) < 1e-10


@given(seeds)
def test_partial_trace_of_product_recovers_factors(seed):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(rng, 2), random_hermitian(rng, 3)
    assert np.allclose(partial_trace(kron(a, b), (2, 3), [0]), a * np.trace(b))
    assert np.allclose(partial_trace(kron(a, b), (2, 3), [1]), b * np.trace(a))


@given(seeds)
def test_partial_transpose_involution(seed):
    rng = np.random.default_rng(seed)
    m = random_hermitian(rng, 12)
    pt = partial_transpose(m, (2, 3, 2), [1])
    assert np.allclose(partial_transpose(pt, (2, 3, 2), [1]), m)
    assert abs(np.trace(pt) - np.trace(m)) < 1e-10
    assert np.allclose(pt, pt.conj().T)


def test_partial_transpose_examples(rng):
    phi = maximally_entangled(2).matrix
    w = np.linalg.eigvalsh(partial_transpose(phi, (2, 2), [1]))
    assert np.allclose(w, [-0.5, 0.5, 0.5, 0.5])
    assert abs(min_eigenvalue(partial_transpose(phi, (2, 2), [1])) + 0.5) < 1e-12
    prod = kron(random_density((2,), rng).matrix, random_density((3,), rng).matrix)
    assert min_eigenvalue(partial_transpose(prod, (2, 3), [1])) > -1e-12


def test_permute_subsystems_swaps_factors(rng):
    a, b, c = random_matrix(rng, 2), random_matrix(rng, 3), random_matrix(rng, 4)
    out = permute_subsystems(kron(a, b, c), (2, 3, 4), [2, 0, 1])
    assert np.allclose(out, kron(c, a, b))


def test_trace_norm_examples(rng):
    rho = random_density((3,), rng).matrix
    assert abs(trace_norm(rho) - 1) < 1e-12
    assert trace_norm(rho - rho) == 0
    assert abs(trace_norm(np.diag([3.0, -4.0])) - 7) < 1e-12


@given(seeds, st.floats(-3, 3))
def test_trace_norm_is_a_norm(seed, c):
    rng = np.random.default_rng(seed)
    a, b = random_matrix(rng, 4), random_matrix(rng, 4)
    assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-10
    assert abs(trace_norm(c * a) - abs(c) * trace_norm(a)) < 1e-10 * max(1.0, trace_norm(a))


def test_fidelity_examples(rng):
    rho = random_density((3,), rng).matrix
    assert abs(fidelity(rho, rho) - 1) < 1e-10
    p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert abs(fidelity(p0, p1)) < 1e-12
    assert abs(fidelity(p0, np.eye(2) / 2) - 0.5) < 1e-12


@given(seeds)
def test_fidelity_of_pure_states_is_squared_overlap(seed):
    rng = np.random.default_rng(seed)
    u, v = rng.normal(size=3) + 1j * rng.normal(size=3), rng.normal(size=3) + 1j * rng.normal(size=3)
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    f = fidelity(np.outer(u, u.conj()), np.outer(v, v.conj()))
    assert abs(f - abs(np.vdot(u, v)) ** 2) < 1e-8


def test_fuchs_van_de_graaf_on_random_pairs(rng):
    for _ in range(100):
        rho, sigma = random_density((4,), rng).matrix, random_density((4,), rng).matrix
        f = fidelity(rho, sigma)
        t = 0.5 * trace_norm(rho - sigma)
        assert 1 - np.sqrt(f) <= t + 1e-9
        assert t <= np.sqrt(1 - f) + 1e-9
        assert abs(f - fidelity(sigma, rho)) < 1e-9


def test_min_eigenvalue_examples(rng):
    assert min_eigenvalue(np.eye(3)) == pytest.approx(1.0)
    for _ in range(5):
        assert min_eigenvalue(random_density((3,), rng).matrix) >= -1e-12
    with pytest.raises(ValueError):
        min_eigenvalue(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_density_operator_validation():
    with pytest.raises(ValueError):
        DensityOperator(np.diag([0.5, 0.6]), (2,))
    with pytest.raises(ValueError):
        DensityOperator(np.diag([1.2, -0.2]), (2,))
    with pytest.raises(ValueError):
        DensityOperator(np.eye(4) / 4, (2, 3))
    with pytest.raises(ValueError):
        DensityOperator(np.array([[0.5, 0.1], [0.0, 0.5]]), (2,))


def test_random_unitary_is_unitary(rng):
    u = random_unitary(5, rng)
    assert np.allclose(u @ u.conj().T, np.eye(5))
