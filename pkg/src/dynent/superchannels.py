"""Superchannels: maps from bipartite channels to bipartite channels.

Two concrete forms are supported.

``PrePost``
    ``Theta[E] = post o (E (x) id_mem) o pre`` with ``pre: A0' B0' -> A0 B0 mem``
    and ``post: A1 B1 mem -> A1' B1'`` given as normalized Choi matrices.

``MeasureAndPrepare``
    ``Theta[E] = q(E) hit + (1 - q(E)) miss`` with ``q(E) = tr(Q J_E)`` (Choi probe)
    or ``q(E) = tr(Q (E (x) id)(psi))`` for a supplied probe state ``psi``.

Every ``MeasureAndPrepare`` converts to an equivalent ``PrePost``
(:meth:`MeasureAndPrepare.to_prepost`): the real input is parked in memory,
the slot is probed, ``{Q, I - Q}`` is measured on its output and the
outcome selects ``hit`` or ``miss`` applied to the parked input.
"""
from __future__ import annotations

import dataclasses
import json
import math
from typing import Sequence

import numpy as np

from .channels import (BipartiteChannel, apply_choi, random_local_choi, random_separable_channel,
                       swap_channel)
from .config import get_tolerances
from .linalg import DensityOperator, hermitian_part, partial_trace, permute_subsystems
from .twirl import CatalystChannel, mix_catalyst, twisted_twirl

__all__ = [
    "MeasureAndPrepare", "PrePost", "SeppscCertificate", "apply_superchannel", "ceil_snap",
    "dilution_superchannel", "distillation_superchannel", "garbage_channel", "random_free_superchannel",
    "seppsc_certify", "superchannel_from_dict", "superchannel_from_json", "trivial_channel",
    "twisted_twirl", "unconditional_superchannel",
]

_SNAP = 1e-6


def ceil_snap(x: float) -> int:
    """``ceil(x)``, except that values within 1e-6 of an integer snap to it."""
    n = round(x)
    return int(n) if abs(x - n) <= _SNAP else int(math.ceil(x))


def floor_snap(x: float) -> int:
    n = round(x)
    return int(n) if abs(x - n) <= _SNAP else int(math.floor(x))


def trivial_channel() -> BipartiteChannel:
    """The unique channel on one-dimensional systems (the zero-cost resource)."""
    return BipartiteChannel(np.ones((1, 1)), (1, 1, 1, 1), certified_separable=True)


def garbage_channel(k: int) -> BipartiteChannel:
    """Channel with Choi ``(I - J_{F^k}) / (k^4 - 1)``: separable, orthogonal to the swap."""
    f = swap_channel(k).choi
    d = k ** 4
    return BipartiteChannel((np.eye(d) - f) / (d - 1), (k, k, k, k), certified_separable=True)


def _swap_or_trivial(k: int) -> BipartiteChannel:
    return trivial_channel() if k == 1 else swap_channel(k)


def _choi_of(ch) -> np.ndarray:
    return ch.to_choi() if isinstance(ch, CatalystChannel) else ch.choi


def _mix(a, b, q: float):
    """``q a + (1 - q) b`` for two channels of the same kind."""
    q = min(max(float(q), 0.0), 1.0)
    if isinstance(a, CatalystChannel):
        return mix_catalyst([a, b], [q, 1.0 - q])
    return BipartiteChannel(hermitian_part(q * a.choi + (1 - q) * b.choi), a.dims)


def _check_choi(j: np.ndarray, d_in: int, d_out: int, what: str) -> np.ndarray:
    tol = get_tolerances()
    j = np.asarray(j, dtype=complex)
    if j.shape != (d_in * d_out, d_in * d_out):
        raise ValueError(f"{what} Choi has shape {j.shape}, expected {(d_in * d_out,) * 2}")
    if np.max(np.abs(j - j.conj().T)) > tol.hermitian:
        raise ValueError(f"{what} Choi is not Hermitian")
    if np.linalg.eigvalsh(hermitian_part(j))[0] < tol.psd:
        raise ValueError(f"{what} is not completely positive")
    marg = partial_trace(j, (d_in, d_out), [0])
    if np.max(np.abs(marg - np.eye(d_in) / d_in)) > tol.trace:
        raise ValueError(f"{what} is not trace preserving")
    return hermitian_part(j)


def _mat_dict(prefix: str, m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {f"{prefix}_re": m.real.tolist(), f"{prefix}_im": m.imag.tolist()}


def _mat_load(d: dict, prefix: str) -> np.ndarray:
    try:
        return np.array(d[f"{prefix}_re"], dtype=float) + 1j * np.array(d[f"{prefix}_im"], dtype=float)
    except KeyError as exc:
        raise ValueError(f"missing field {exc.args[0]!r}") from None


# -- pre/post form ------------------------------------------------------------------
@dataclasses.dataclass(frozen=True, eq=False)
class PrePost:
    """``Theta[E] = post o (E (x) id_mem) o pre``.

    :param pre: normalized Choi of ``A0' B0' -> (A0 B0, mem)``.
    :param post: normalized Choi of ``(A1 B1, mem) -> A1' B1'``.
    :param slot_dims: dims of the channels ``Theta`` accepts.
    :param out_dims: dims of the channels ``Theta`` returns.
    :param memory: memory dimension.
    """

    pre: np.ndarray = dataclasses.field(repr=False)
    post: np.ndarray = dataclasses.field(repr=False)
    slot_dims: tuple
    out_dims: tuple
    memory: int = 1
    check: bool = dataclasses.field(default=True, repr=False)

    def __post_init__(self):
        sd = tuple(int(d) for d in self.slot_dims)
        od = tuple(int(d) for d in self.out_dims)
        object.__setattr__(self, "slot_dims", sd)
        object.__setattr__(self, "out_dims", od)
        s_in, s_out = sd[0] * sd[1], sd[2] * sd[3]
        o_in, o_out = od[0] * od[1], od[2] * od[3]
        mem = int(self.memory)
        object.__setattr__(self, "pre", _check_choi(self.pre, o_in, s_in * mem, "pre-processing"))
        object.__setattr__(self, "post", _check_choi(self.post, s_out * mem, o_out, "post-processing"))
        if self.check:
            rng = np.random.default_rng(12345)
            for _ in range(5):
                probe = BipartiteChannel(random_local_choi(s_in, s_out, rng), sd)
                self.apply(probe)  # raises if the output is not a channel

    def apply(self, e: BipartiteChannel) -> BipartiteChannel:
        if e.dims != self.slot_dims:
            raise ValueError(f"channel dims {e.dims} do not match the slot {self.slot_dims}")
        od, sd, mem = self.out_dims, self.slot_dims, self.memory
        o_in, o_out = od[0] * od[1], od[2] * od[3]
        s_in, s_out = sd[0] * sd[1], sd[2] * sd[3]
        phi = np.zeros(o_in * o_in)
        phi[:: o_in + 1] = 1.0 / np.sqrt(o_in)
        x = apply_choi(self.pre, o_in, s_in * mem, np.outer(phi, phi), o_in)
        y = apply_choi(e.choi, s_in, s_out, x, mem * o_in)
        z = apply_choi(self.post, s_out * mem, o_out, y, o_in)
        j = permute_subsystems(z, (o_out, o_in), [1, 0])
        return BipartiteChannel(hermitian_part(j), od)

    __call__ = apply

    @classmethod
    def local(cls, pre_a: np.ndarray, pre_b: np.ndarray, post_a: np.ndarray, post_b: np.ndarray,
              slot_dims, out_dims, mem_a: int = 1, mem_b: int = 1) -> "PrePost":
        """Product pre/post-processing with a local memory on each side.

        ``pre_a: A0' -> A0 E_A``, ``pre_b: B0' -> B0 E_B``, ``post_a: A1 E_A -> A1'``,
        ``post_b: B1 E_B -> B1'`` (local normalized Choi matrices, input first).
        """
        return cls.local_mixture([(1.0, pre_a, pre_b, post_a, post_b)], slot_dims, out_dims, mem_a, mem_b)

    @classmethod
    def local_mixture(cls, terms, slot_dims, out_dims, mem_a: int = 1, mem_b: int = 1) -> "PrePost":
        """Shared-randomness mixture of local pre/post pairs.

        Each term is ``(weight, pre_a, pre_b, post_a, post_b)``.  The term index
        is copied into a classical register on each side at pre-processing and
        read by the post-processing, so the result is a single pre/post
        superchannel with memory ``(E_A F) (x) (E_B F)``, ``F`` the register.
        """
        a0, b0, a1, b1 = (int(d) for d in slot_dims)
        a0p, b0p, a1p, b1p = (int(d) for d in out_dims)
        nt = len(terms)
        ma, mb = mem_a * nt, mem_b * nt
        pre = 0
        post_a_full = 0
        post_b_full = 0
        for k, (w, pa, pb, qa, qb) in enumerate(terms):
            flag = np.zeros((nt, nt))
            flag[k, k] = 1.0
            ja = np.kron(pa, flag)  # (A0', A0, E_A, F)
            jb = np.kron(pb, flag)
            j = np.kron(ja, jb)
            pre = pre + w * permute_subsystems(j, (a0p, a0, mem_a, nt, b0p, b0, mem_b, nt),
                                               [0, 4, 1, 5, 2, 3, 6, 7])
            # read the register: (A1 E_A, F) -> A1'
            post_a_full = post_a_full + permute_subsystems(np.kron(qa, flag / nt), (a1 * mem_a, a1p, nt),
                                                           [0, 2, 1])
            post_b_full = post_b_full + permute_subsystems(np.kron(qb, flag / nt), (b1 * mem_b, b1p, nt),
                                                           [0, 2, 1])
        post = permute_subsystems(np.kron(post_a_full, post_b_full), (a1, ma, a1p, b1, mb, b1p),
                                  [0, 3, 1, 4, 2, 5])
        return cls(pre, post, (a0, b0, a1, b1), (a0p, b0p, a1p, b1p), ma * mb)

    def to_dict(self) -> dict:
        d = {"form": "pre-post", "slot_dims": list(self.slot_dims), "out_dims": list(self.out_dims),
             "memory": self.memory}
        d.update(_mat_dict("pre", self.pre))
        d.update(_mat_dict("post", self.post))
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# -- measure-and-prepare form -----------------------------------------------------------
@dataclasses.dataclass(frozen=True, eq=False)
class MeasureAndPrepare:
    """``Theta[E] = q hit + (1 - q) miss`` with ``q = tr(Q J_E)`` or ``tr(Q (E (x) id)(probe))``.

    ``hit`` and ``miss`` may be plain or catalyst channels (of the same kind).
    """

    effect: np.ndarray = dataclasses.field(repr=False)
    hit: object = dataclasses.field(repr=False)
    miss: object = dataclasses.field(repr=False)
    slot_dims: tuple = ()
    probe: DensityOperator | None = dataclasses.field(default=None, repr=False)
    check: bool = dataclasses.field(default=True, repr=False)

    def __post_init__(self):
        sd = tuple(int(d) for d in self.slot_dims)
        object.__setattr__(self, "slot_dims", sd)
        s_in, s_out = sd[0] * sd[1], sd[2] * sd[3]
        if self.probe is None:
            n_q = s_in * s_out
        else:
            if tuple(self.probe.dims[:2]) != sd[:2]:
                raise ValueError(f"probe dims {self.probe.dims} do not start with the slot inputs {sd[:2]}")
            n_q = s_out * (self.probe.dim // s_in)
        q = np.asarray(self.effect, dtype=complex)
        if q.shape != (n_q, n_q):
            raise ValueError(f"effect has shape {q.shape}, expected {(n_q, n_q)}")
        tol = get_tolerances()
        if np.max(np.abs(q - q.conj().T)) > tol.hermitian:
            raise ValueError("effect is not Hermitian")
        w = np.linalg.eigvalsh(hermitian_part(q))
        if w[0] < -1e-9 or w[-1] > 1 + 1e-9:
            raise ValueError(f"effect must satisfy 0 <= Q <= I (eigenvalues in [{w[0]:.3e}, {w[-1]:.3e}])")
        q = hermitian_part(q)
        q.flags.writeable = False
        object.__setattr__(self, "effect", q)
        if type(self.hit) is not type(self.miss) or self.hit.dims != self.miss.dims:
            raise ValueError("hit and miss channels must have the same kind and dims")
        if self.check:
            rng = np.random.default_rng(12345)
            for _ in range(5):
                p = self.hit_probability(BipartiteChannel(random_local_choi(s_in, s_out, rng), sd))
                if not -1e-9 <= p <= 1 + 1e-9:
                    raise ValueError(f"effect gives probability {p} on a channel")

    @property
    def out_dims(self) -> tuple:
        return self.hit.dims

    def hit_probability(self, e: BipartiteChannel) -> float:
        if e.dims != self.slot_dims:
            raise ValueError(f"channel dims {e.dims} do not match the slot {self.slot_dims}")
        if self.probe is None:
            return float(np.real(np.vdot(self.effect, e.choi)))
        d_ref = self.probe.dim // e.d_in
        out = apply_choi(e.choi, e.d_in, e.d_out, self.probe.matrix, d_ref)
        return float(np.real(np.vdot(self.effect, out)))

    def apply(self, e: BipartiteChannel):
        return _mix(self.hit, self.miss, self.hit_probability(e))

    __call__ = apply

    def to_prepost(self) -> PrePost:
        """Equivalent pre/post realization (memory = probe reference (x) parked input)."""
        sd, od = self.slot_dims, self.out_dims
        s_in, s_out = sd[0] * sd[1], sd[2] * sd[3]
        o_in, o_out = od[0] * od[1], od[2] * od[3]
        if self.probe is None:
            v = np.zeros(s_in * s_in)
            v[:: s_in + 1] = 1.0 / np.sqrt(s_in)
            psi = np.outer(v, v)
            # tr(Q J_E) = tr(Q' (E (x) id)(Phi)) with Q' the effect reordered to (out, ref)
            q = permute_subsystems(self.effect, (s_in, s_out), [1, 0])
            d_ref = s_in
        else:
            psi = self.probe.matrix
            q = self.effect
            d_ref = self.probe.dim // s_in
        # pre: rho -> psi (x) rho, memory = (ref, parked input)
        w = np.zeros(o_in * o_in)
        w[:: o_in + 1] = 1.0 / np.sqrt(o_in)
        pre = permute_subsystems(np.kron(np.outer(w, w), psi), (o_in, o_in, s_in * d_ref), [0, 2, 1])
        n_q = s_out * d_ref
        jh, jm = _choi_of(self.hit), _choi_of(self.miss)
        post = np.kron(q.T / n_q, jh) + np.kron((np.eye(n_q) - q).T / n_q, jm)
        return PrePost(pre, post, sd, od, d_ref * o_in, check=False)

    def to_dict(self) -> dict:
        hit = self.hit.to_channel() if isinstance(self.hit, CatalystChannel) else self.hit
        miss = self.miss.to_channel() if isinstance(self.miss, CatalystChannel) else self.miss
        d = {"form": "measure-and-prepare", "slot_dims": list(self.slot_dims),
             "out_dims": list(self.out_dims), "hit": hit.to_dict(), "miss": miss.to_dict(),
             "probe": None}
        d.update(_mat_dict("effect", self.effect))
        if self.probe is not None:
            pd = {"dims": list(self.probe.dims)}
            pd.update(_mat_dict("rho", self.probe.matrix))
            d["probe"] = pd
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def superchannel_from_dict(d: dict):
    form = d.get("form")
    if form == "pre-post":
        return PrePost(_mat_load(d, "pre"), _mat_load(d, "post"), d["slot_dims"], d["out_dims"],
                       int(d.get("memory", 1)))
    if form == "measure-and-prepare":
        probe = None
        if d.get("probe") is not None:
            probe = DensityOperator(_mat_load(d["probe"], "rho"), tuple(d["probe"]["dims"]))
        return MeasureAndPrepare(_mat_load(d, "effect"), BipartiteChannel.from_dict(d["hit"]),
                                 BipartiteChannel.from_dict(d["miss"]), d["slot_dims"], probe)
    raise ValueError(f"unknown superchannel form {form!r}")


def superchannel_from_json(text: str):
    return superchannel_from_dict(json.loads(text))


def apply_superchannel(theta, e: BipartiteChannel):
    return theta.apply(e)


# -- constructions --------------------------------------------------------------------
def dilution_superchannel(target, mix, r: float, k: int) -> MeasureAndPrepare:
    """Simulate ``target`` from the ``k``-swap: ``Theta[E] = q target + (1 - q) mix``, ``q = tr(J_{F^k} J_E)``.

    Requires ``(target + r mix) / (1 + r)`` to be PPT and ``k >= ceil(sqrt(1 + r))``;
    then every separable probe has ``q <= 1/k^2 <= 1/(1 + r)`` and the output
    stays in the free set, while ``Theta[F^k] = target`` exactly.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if isinstance(target, CatalystChannel):
        lam = mix_catalyst([target, mix], [1 / (1 + r), r / (1 + r)]).min_pt_eigenvalue()
    else:
        from .channels import is_ppt
        lam = is_ppt(BipartiteChannel(hermitian_part((target.choi + r * mix.choi) / (1 + r)),
                                      target.dims)).min_pt_eigenvalue
    if lam < -1e-7:
        raise ValueError(f"(target + r mix)/(1 + r) is not PPT (min PT eigenvalue {lam:.3e})")
    k_min = ceil_snap(math.sqrt(1 + r))
    if k < k_min:
        raise ValueError(f"k = {k} is below ceil(sqrt(1 + r)) = {k_min}")
    slot = _swap_or_trivial(k)
    return MeasureAndPrepare(slot.choi, target, mix, slot.dims)


def distillation_superchannel(psi_star: DensityOperator, q_star: np.ndarray, k: int,
                              slot_dims) -> MeasureAndPrepare:
    """``Theta[E] = q F^k + (1 - q) G^k`` with ``q = tr(Q* (E (x) id)(psi*))``.

    ``G^k`` is :func:`garbage_channel`; for ``k = 1`` both outcomes are the trivial channel.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k == 1:
        hit = miss = trivial_channel()
    else:
        hit, miss = swap_channel(k), garbage_channel(k)
    return MeasureAndPrepare(q_star, hit, miss, slot_dims, probe=psi_star)


def unconditional_superchannel(channel, slot_dims) -> MeasureAndPrepare:
    """Discard the input and prepare ``channel``."""
    sd = tuple(int(d) for d in slot_dims)
    n = sd[0] * sd[1] * sd[2] * sd[3]
    return MeasureAndPrepare(np.eye(n), channel, channel, sd)


def random_free_superchannel(slot_dims, out_dims=None, seed=None, memory: tuple = (2, 2),
                             terms: int = 2) -> PrePost:
    """Random mixture of local pre/post-processings with local memory.

    It maps PPT channels to PPT channels, so PPT-based measures cannot increase under it.
    """
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    sd = tuple(int(d) for d in slot_dims)
    od = sd if out_dims is None else tuple(int(d) for d in out_dims)
    ea, eb = memory
    w = rng.dirichlet(np.ones(terms)) if terms > 1 else np.ones(1)
    tl = []
    for wt in w:
        tl.append((wt, random_local_choi(od[0], sd[0] * ea, rng), random_local_choi(od[1], sd[1] * eb, rng),
                   random_local_choi(sd[2] * ea, od[2], rng), random_local_choi(sd[3] * eb, od[3], rng)))
    return PrePost.local_mixture(tl, sd, od, ea, eb)


# -- certification ----------------------------------------------------------------------
@dataclasses.dataclass
class SeppscCertificate:
    """Outcome of a sampled separability-preservation check (necessary, not sufficient)."""

    samples: int
    max_output_robustness: float
    delta_claim: float
    verdict: str
    worst_witness: BipartiteChannel | None = dataclasses.field(default=None, repr=False)
    note: str = "sampled necessary check over random separable probes; not a proof"

    def to_dict(self, witness: bool = True) -> dict:
        d = {"samples": self.samples, "max_output_robustness": self.max_output_robustness,
             "delta_claim": self.delta_claim, "verdict": self.verdict, "note": self.note}
        if witness and self.worst_witness is not None:
            d["worst_witness"] = self.worst_witness.to_dict()
        return d


def seppsc_certify(theta, samples: int, delta: float, seed=0, terms: int = 2,
                   tol: float | None = None) -> SeppscCertificate:
    """Apply ``theta`` to random separable channels and compare output robustness with ``delta``."""
    from .measures.robustness import generalized_robustness
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    worst, witness = -np.inf, None
    for _ in range(samples):
        probe = random_separable_channel(theta.slot_dims, rng, terms)
        r = float(generalized_robustness(theta.apply(probe), tol=tol).value)
        if r > worst:
            worst, witness = r, probe
    verdict = "pass" if worst <= delta + 1e-6 else "fail"
    return SeppscCertificate(samples, float(worst), float(delta), verdict, witness)
