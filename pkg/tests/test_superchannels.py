import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dynent.channels import (BipartiteChannel, apply_choi, identity_channel, is_ppt, mixture, random_channel,
                             random_separable_channel, swap_channel, tensor, unitary_channel)
from dynent.linalg import partial_trace, random_unitary
from dynent.measures import choi_input, diamond_distance, standard_robustness
from dynent.superchannels import (MeasureAndPrepare, PrePost, ceil_snap, dilution_superchannel,
                                  distillation_superchannel, floor_snap, garbage_channel,
                                  random_free_superchannel, seppsc_certify, superchannel_from_json,
                                  trivial_channel, unconditional_superchannel)
from dynent.twirl import CatalystChannel

DIMS = (2, 2, 2, 2)


def swap_distiller(k=2):
    """Distillation map with the Choi-input probe and the projector onto the swap's output."""
    psi = choi_input((k, k, k, k))
    out = apply_choi(swap_channel(k).choi, k * k, k * k, psi.matrix, k * k)
    w, v = np.linalg.eigh(out)
    q = np.outer(v[:, -1], v[:, -1].conj())
    return distillation_superchannel(psi, q, k, (k, k, k, k))


def tp_error(ch):
    d_in = ch.dims[0] * ch.dims[1]
    return np.max(np.abs(partial_trace(ch.choi, (d_in, ch.dims[2] * ch.dims[3]), [0]) - np.eye(d_in) / d_in))


def test_snapping():
    assert ceil_snap(2.0000001) == 2 and ceil_snap(2.01) == 3
    assert floor_snap(2.9999999) == 3 and floor_snap(2.99) == 2


def test_identity_supermap():
    ident = identity_channel(2, 2).choi
    theta = PrePost(ident, ident, DIMS, DIMS)
    n = random_channel(DIMS, 1)
    assert np.allclose(theta.apply(n).choi, n.choi, atol=1e-12)


def test_constant_effect():
    target = random_channel(DIMS, 2)
    theta = unconditional_superchannel(target, DIMS)
    for s in range(3):
        assert np.allclose(theta.apply(random_channel(DIMS, 10 + s)).choi, target.choi)


def make_constructions():
    n = random_channel(DIMS, 3)
    rep = standard_robustness(n)
    k = ceil_snap(np.sqrt(1 + rep.value))
    return {
        "free": random_free_superchannel(DIMS, seed=4),
        "dilution": dilution_superchannel(n, rep.artifacts["mix"], rep.value, k),
        "distillation": swap_distiller(2),
    }


CONSTRUCTIONS = make_constructions()


@pytest.mark.parametrize("name", sorted(CONSTRUCTIONS))
def test_linearity(name, rng):
    theta = CONSTRUCTIONS[name]
    for _ in range(3):
        e, f = random_channel(theta.slot_dims, rng), random_channel(theta.slot_dims, rng)
        both = theta.apply(mixture([e, f], [0.5, 0.5])).choi
        assert np.max(np.abs(both - 0.5 * theta.apply(e).choi - 0.5 * theta.apply(f).choi)) <= 1e-10


@pytest.mark.parametrize("name", sorted(CONSTRUCTIONS))
def test_outputs_are_channels(name):
    theta = CONSTRUCTIONS[name]
    rng = np.random.default_rng(77)
    for _ in range(100):
        assert tp_error(theta.apply(random_channel(theta.slot_dims, rng))) <= 1e-8


@pytest.mark.parametrize("name", ["dilution", "distillation"])
def test_prepost_realization(name, rng):
    theta = CONSTRUCTIONS[name]
    pp = theta.to_prepost()
    for _ in range(3):
        e = random_channel(theta.slot_dims, rng)
        assert np.allclose(pp.apply(e).choi, theta.apply(e).choi, atol=1e-12)


@pytest.mark.parametrize("name", sorted(CONSTRUCTIONS))
def test_json_round_trip(name):
    theta = CONSTRUCTIONS[name]
    back = superchannel_from_json(theta.to_json())
    assert json.loads(theta.to_json())["form"] in ("pre-post", "measure-and-prepare")
    e = random_channel(theta.slot_dims, 9)
    assert np.allclose(back.apply(e).choi, theta.apply(e).choi, atol=1e-14)


# -- dilution ---------------------------------------------------------------------------
def test_dilution_of_swap():
    rep = standard_robustness(swap_channel(2))
    theta = dilution_superchannel(swap_channel(2), rep.artifacts["mix"], rep.value, 2)
    assert np.max(np.abs(theta.apply(swap_channel(2)).choi - swap_channel(2).choi)) <= 1e-9


def test_dilution_of_free_channel():
    s = random_separable_channel(DIMS, 1, 2)
    theta = dilution_superchannel(s, s, 0.0, 1)
    assert np.allclose(theta.apply(trivial_channel()).choi, s.choi)


def test_dilution_of_random_channel():
    n = random_channel(DIMS, 3)
    theta = CONSTRUCTIONS["dilution"]
    k = theta.slot_dims[0]
    assert np.max(np.abs(theta.apply(swap_channel(k)).choi - n.choi)) <= 1e-7
    cert = seppsc_certify(theta, 10, 0.0, seed=1)
    assert cert.verdict == "pass" and cert.max_output_robustness <= 1e-6


@pytest.mark.parametrize("k", [2, 3])
def test_free_probe_overlap(k):
    fk = swap_channel(k).choi
    for s in range(100 if k == 2 else 20):
        e = random_separable_channel((k, k, k, k), s, terms=3)
        assert np.real(np.vdot(fk, e.choi)) <= 1 / k ** 2 + 1e-9


def test_dilution_premises():
    n = random_channel(DIMS, 3)
    with pytest.raises(ValueError, match="PPT"):
        dilution_superchannel(n, n, 0.1, 2)
    rep = standard_robustness(n)
    with pytest.raises(ValueError, match="below"):
        dilution_superchannel(n, rep.artifacts["mix"], 10.0, 2)


# -- distillation -----------------------------------------------------------------------
def test_distillation_of_swap():
    theta = CONSTRUCTIONS["distillation"]
    assert diamond_distance(theta.apply(swap_channel(2)), swap_channel(2)) <= 1e-7


def test_distillation_zero_effect():
    psi = choi_input(DIMS)
    theta = distillation_superchannel(psi, np.zeros((16, 16)), 2, DIMS)
    assert np.allclose(theta.apply(random_channel(DIMS, 0)).choi, garbage_channel(2).choi)


@pytest.mark.parametrize("k", [2, 3])
def test_garbage_channel_is_ppt(k):
    g = garbage_channel(k)
    assert is_ppt(g).min_pt_eigenvalue >= -1e-9


def test_distillation_free_hit_probability():
    theta = CONSTRUCTIONS["distillation"]
    for s in range(30):
        q = theta.hit_probability(random_separable_channel(DIMS, s, terms=2))
        assert q <= 0.25 + 1e-9
        assert is_ppt(theta.apply(random_separable_channel(DIMS, s, terms=2)))


def test_effect_validation():
    with pytest.raises(ValueError):
        MeasureAndPrepare(2 * np.eye(16), swap_channel(2), swap_channel(2), DIMS)
    with pytest.raises(ValueError):
        MeasureAndPrepare(np.eye(16), swap_channel(2), trivial_channel(), DIMS)
    with pytest.raises(ValueError):
        CONSTRUCTIONS["free"].apply(random_channel((2, 2, 2, 3), 0))


# -- certification ------------------------------------------------------------------------
def test_seppsc_unconditional_swap():
    theta = unconditional_superchannel(swap_channel(2), DIMS)
    bad = seppsc_certify(theta, 3, 0.0)
    assert bad.verdict == "fail" and abs(bad.max_output_robustness - 3) < 1e-5
    assert seppsc_certify(theta, 3, 3.1).verdict == "pass"
    assert "not a proof" in bad.to_dict()["note"]


def test_random_free_superchannel_preserves_ppt():
    theta = random_free_superchannel(DIMS, seed=11, terms=3)
    for s in range(20):
        assert is_ppt(theta.apply(random_separable_channel(DIMS, s, 2)))
    assert random_free_superchannel(DIMS, (2, 1, 2, 1), seed=1).out_dims == (2, 1, 2, 1)


# -- pinching of a near-catalyst channel --------------------------------------------------
@given(st.integers(0, 10 ** 6), st.floats(0.0, 0.2))
def test_pinching_keeps_swap_weight(seed, eps):
    rng = np.random.default_rng(seed)
    n = random_channel(DIMS, rng)
    target = tensor(n, swap_channel(2))
    # an eps-ball element as a mixture (half-diamond distance <= eps)
    e = mixture([target, random_channel(target.dims, rng)], [1 - eps, eps])
    assert CatalystChannel.from_channel(e, DIMS, 2).swap_weight >= 1 - 2 * eps - 1e-12


@given(st.integers(0, 10 ** 6))
def test_pinching_under_unitary_perturbation(seed):
    rng = np.random.default_rng(seed)
    n = random_channel(DIMS, rng)
    target = tensor(n, swap_channel(2))
    h = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    h = (h + h.conj().T) / 2
    h /= np.linalg.norm(h, 2)
    w, v = np.linalg.eigh(0.05 * h)
    u = (v * np.exp(1j * w)) @ v.conj().T
    # bound on half the diamond distance of post-composing with u
    eps = np.linalg.norm(u - np.eye(16), 2)
    e_choi = np.kron(np.eye(16), u) @ target.choi @ np.kron(np.eye(16), u).conj().T
    e = BipartiteChannel((e_choi + e_choi.conj().T) / 2, target.dims)
    assert CatalystChannel.from_channel(e, DIMS, 2).swap_weight >= 1 - 2 * eps - 1e-12


def test_unitary_channel_roundtrip_through_free_superchannel():
    u = random_unitary(4, np.random.default_rng(2))
    out = CONSTRUCTIONS["free"].apply(unitary_channel(u, DIMS))
    assert tp_error(out) <= 1e-8
