"""Bipartite quantum channels represented by normalized Choi matrices.

A channel ``N: A0 B0 -> A1 B1`` is stored as

    J = (id (x) N)(Phi_{A0 A0'} (x) Phi_{B0 B0'})

on subsystems ordered ``(A0, B0, A1, B1)`` (indices 0..3), where ``Phi`` are
normalized maximally entangled states, so ``tr J = 1`` and trace preservation
reads ``tr_{A1 B1} J = I / (|A0| |B0|)``.  The channel acts as

    N(rho) = d_in * tr_{A0 B0}[(rho^T (x) I) J],   d_in = |A0| |B0|.

Separability is judged across the cut ``A0 A1 : B0 B1``; the partial
transpose used for the PPT test acts on subsystems ``PPT_CUT = (1, 3)``.
"""
from __future__ import annotations

import dataclasses
import json
from typing import Sequence

import numpy as np

from .config import get_tolerances
from .linalg import (DensityOperator, as_matrix, hermitian_part, is_hermitian, partial_trace,
                     partial_transpose, permute_subsystems)

__all__ = [
    "PPT_CUT", "BipartiteChannel", "PptFlag", "apply", "apply_choi", "choi_from_superop",
    "depolarizing_channel", "from_kraus", "identity_channel", "is_ppt", "isotropic_state",
    "maximally_entangled", "mixture", "operator_schmidt", "product_channel", "random_channel",
    "random_local_choi", "random_separable_channel", "repair_choi", "superop_from_choi",
    "swap_channel", "swap_gate", "tensor", "unitary_channel",
]

PPT_CUT = (1, 3)


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


# -- Choi / superoperator conversions ---------------------------------------
def apply_choi(choi: np.ndarray, d_in: int, d_out: int, rho: np.ndarray, d_ref: int = 1) -> np.ndarray:
    """Apply the channel with normalized Choi ``choi`` (ordered in, out) to ``rho`` on (in, ref)."""
    j4 = choi.reshape(d_in, d_out, d_in, d_out)
    r4 = np.asarray(rho).reshape(d_in, d_ref, d_in, d_ref)
    out = d_in * np.einsum("irjs,iojp->orps", r4, j4)
    return out.reshape(d_out * d_ref, d_out * d_ref)


def superop_from_choi(choi: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """Transfer matrix ``S`` with ``vec(N(rho)) = S vec(rho)`` (row-major vec)."""
    j4 = np.asarray(choi).reshape(d_in, d_out, d_in, d_out)
    return d_in * j4.transpose(1, 3, 0, 2).reshape(d_out * d_out, d_in * d_in)


def choi_from_superop(s: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    s4 = np.asarray(s).reshape(d_out, d_out, d_in, d_in)
    return s4.transpose(2, 0, 3, 1).reshape(d_in * d_out, d_in * d_out) / d_in


def repair_choi(choi: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """Closest-in-spirit valid Choi: clip negative eigenvalues, then restore trace preservation.

    Used on solver output, whose constraints hold only to solver tolerance.
    """
    w, v = np.linalg.eigh(hermitian_part(np.asarray(choi, dtype=complex)))
    j = (v * np.clip(w, 0.0, None)) @ v.conj().T
    marg = partial_trace(j, (d_in, d_out), [0]) * d_in
    mw, mv = np.linalg.eigh(hermitian_part(marg))
    if mw[0] <= 0:
        raise ValueError("cannot repair a Choi matrix with a singular input marginal")
    fix = (mv / np.sqrt(mw)) @ mv.conj().T
    k = np.kron(fix, np.eye(d_out))
    return hermitian_part(k @ j @ k)


@dataclasses.dataclass(frozen=True)
class PptFlag:
    is_ppt_across_AB: bool
    min_pt_eigenvalue: float

    def __bool__(self):
        return self.is_ppt_across_AB


@dataclasses.dataclass(frozen=True, eq=False)
class BipartiteChannel:
    """Channel ``A0 B0 -> A1 B1`` given by its normalized Choi matrix.

    :param choi: Choi matrix on ``(A0, B0, A1, B1)``; stored read-only.
    :param dims: ``(|A0|, |B0|, |A1|, |B1|)``.
    :param certified_separable: set by constructors that only produce
        mixtures of product channels.
    """

    choi: np.ndarray
    dims: tuple
    certified_separable: bool = False

    def __post_init__(self):
        tol = get_tolerances()
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 4 or min(dims) < 1:
            raise ValueError(f"dims must be four positive integers, got {self.dims}")
        j = as_matrix(self.choi).copy()
        total = int(np.prod(dims))
        if j.shape != (total, total):
            raise ValueError(f"Choi matrix has shape {j.shape}, dims {dims} need ({total}, {total})")
        if not is_hermitian(j, tol.hermitian):
            raise ValueError("Choi matrix is not Hermitian")
        tr = np.trace(j).real
        if abs(tr - 1.0) > tol.trace:
            raise ValueError(f"Choi matrix has trace {tr!r}, expected 1 (normalized convention)")
        lam = np.linalg.eigvalsh(hermitian_part(j))[0]
        if lam < tol.psd:
            raise ValueError(f"Choi matrix is not PSD (min eigenvalue {lam:.3e}): map is not CP")
        d_in = dims[0] * dims[1]
        marg = partial_trace(j, (d_in, dims[2] * dims[3]), [0])
        err = np.max(np.abs(marg - np.eye(d_in) / d_in))
        if err > tol.trace:
            raise ValueError(f"map is not trace preserving (marginal error {err:.3e})")
        j.flags.writeable = False
        object.__setattr__(self, "choi", j)
        object.__setattr__(self, "dims", dims)

    # -- shape ---------------------------------------------------------------
    @property
    def d_in(self) -> int:
        return self.dims[0] * self.dims[1]

    @property
    def d_out(self) -> int:
        return self.dims[2] * self.dims[3]

    @property
    def dim(self) -> int:
        return self.choi.shape[0]

    @property
    def is_real(self) -> bool:
        return bool(np.max(np.abs(self.choi.imag), initial=0.0) <= 1e-13)

    @classmethod
    def from_solver(cls, choi, dims, certified_separable: bool = False) -> "BipartiteChannel":
        """Build from an approximately valid Choi matrix (e.g. SDP output) after repair."""
        dims = tuple(int(d) for d in dims)
        j = repair_choi(choi, dims[0] * dims[1], dims[2] * dims[3])
        return cls(j, dims, certified_separable)

    # -- operations ------------------------------------------------------------
    def apply(self, state) -> DensityOperator:
        return apply(self, state)

    def superoperator(self) -> np.ndarray:
        return superop_from_choi(self.choi, self.d_in, self.d_out)

    def choi_state(self) -> DensityOperator:
        return DensityOperator(self.choi, self.dims)

    def is_ppt(self) -> PptFlag:
        return is_ppt(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dict(self) -> dict:
        d = {"dims": list(self.dims), "choi_re": self.choi.real.tolist(),
             "choi_im": self.choi.imag.tolist()}
        if self.certified_separable:
            d["certified_separable"] = True
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "BipartiteChannel":
        for key in ("dims", "choi_re", "choi_im"):
            if key not in data:
                raise ValueError(f"channel record is missing field {key!r}")
        try:
            re = np.array(data["choi_re"], dtype=float)
            im = np.array(data["choi_im"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"choi_re/choi_im must be numeric matrices: {exc}") from None
        if re.shape != im.shape:
            raise ValueError(f"choi_re has shape {re.shape} but choi_im has shape {im.shape}")
        return cls(re + 1j * im, tuple(data["dims"]), bool(data.get("certified_separable", False)))

    @classmethod
    def from_json(cls, text: str) -> "BipartiteChannel":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"channel file is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ValueError("channel file must contain a JSON object")
        return cls.from_dict(data)


# -- constructors -------------------------------------------------------------
def from_kraus(kraus: Sequence[np.ndarray], dims: Sequence[int]) -> BipartiteChannel:
    """Channel with Kraus operators ``K_i: A0 B0 -> A1 B1`` (row index = output)."""
    dims = tuple(int(d) for d in dims)
    d_in, d_out = dims[0] * dims[1], dims[2] * dims[3]
    ks = [as_matrix(k, square=False) for k in kraus]
    for k in ks:
        if k.shape != (d_out, d_in):
            raise ValueError(f"Kraus operator of shape {k.shape}, expected {(d_out, d_in)}")
    tp = sum(k.conj().T @ k for k in ks)
    err = np.max(np.abs(tp - np.eye(d_in)))
    if err > get_tolerances().trace:
        raise ValueError(f"Kraus operators are not trace preserving (error {err:.3e})")
    # |K>> = sum_i |i> (x) K|i>  has row-major entries K^T
    vecs = [k.T.reshape(-1) for k in ks]
    j = sum(np.outer(v, v.conj()) for v in vecs) / d_in
    return BipartiteChannel(j, dims)


def unitary_channel(u: np.ndarray, dims: Sequence[int]) -> BipartiteChannel:
    return from_kraus([u], dims)


def swap_gate(k: int) -> np.ndarray:
    """``F = sum_ij |ij><ji|`` on two ``k``-dimensional systems."""
    f = np.zeros((k * k, k * k))
    for i in range(k):
        for j in range(k):
            f[i * k + j, j * k + i] = 1.0
    return f


def swap_channel(k: int) -> BipartiteChannel:
    """The K-swap channel on ``(k, k) -> (k, k)``."""
    if int(k) != k or k < 2:
        raise ValueError(f"swap_channel needs k >= 2, got {k}")
    k = int(k)
    return unitary_channel(swap_gate(k), (k, k, k, k))


def identity_channel(a: int, b: int) -> BipartiteChannel:
    return unitary_channel(np.eye(a * b), (a, b, a, b))


def depolarizing_channel(dims: Sequence[int], p: float) -> BipartiteChannel:
    """``rho -> (1 - p) rho + p tr(rho) I / d``; for ``p = 1`` input and output dims may differ."""
    dims = tuple(int(d) for d in dims)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing parameter must lie in [0, 1], got {p}")
    d_in, d_out = dims[0] * dims[1], dims[2] * dims[3]
    mixed = np.eye(d_in * d_out) / (d_in * d_out)
    if p == 1.0:
        return BipartiteChannel(mixed, dims, certified_separable=True)
    if dims[:2] != dims[2:]:
        raise ValueError("partially depolarizing channel needs equal input and output dims")
    ident = identity_channel(dims[0], dims[1]).choi
    return BipartiteChannel((1 - p) * ident + p * mixed, dims)


def maximally_entangled(k: int) -> DensityOperator:
    """``|Phi^k> = sum_i |ii> / sqrt(k)`` on two ``k``-dimensional systems."""
    if k < 1:
        raise ValueError("k must be at least 1")
    v = np.zeros(k * k)
    v[:: k + 1] = 1.0 / np.sqrt(k)
    return DensityOperator(np.outer(v, v), (k, k))


def isotropic_state(k: int, p: float) -> DensityOperator:
    """``p Phi + (1 - p) (I - Phi) / (k^2 - 1)``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"isotropic weight must lie in [0, 1], got {p}")
    if k < 2:
        raise ValueError("isotropic states need k >= 2")
    phi = maximally_entangled(k).matrix
    return DensityOperator(p * phi + (1 - p) * (np.eye(k * k) - phi) / (k * k - 1), (k, k))


def random_local_choi(d_in: int, d_out: int, rng, env: int | None = None) -> np.ndarray:
    """Normalized Choi (in, out) of a random channel from a Gaussian Stinespring isometry."""
    rng = _rng(rng)
    need = -(-d_in // d_out)  # an isometry needs d_out * env >= d_in
    env = max(d_out, need) if env is None else env
    if d_out * env < d_in:
        raise ValueError(f"environment dimension {env} too small for a {d_in} -> {d_out} channel")
    g = rng.standard_normal((d_out * env, d_in)) + 1j * rng.standard_normal((d_out * env, d_in))
    v, _ = np.linalg.qr(g)
    ks = v.reshape(d_out, env, d_in).transpose(1, 0, 2)
    vecs = np.array([k.T.reshape(-1) for k in ks])
    return hermitian_part(vecs.T @ vecs.conj() / d_in)


def random_channel(dims: Sequence[int], seed=None, env: int | None = None) -> BipartiteChannel:
    """Random bipartite channel; environment dimension defaults to ``|A1||B1|``."""
    dims = tuple(int(d) for d in dims)
    d_in, d_out = dims[0] * dims[1], dims[2] * dims[3]
    return BipartiteChannel(random_local_choi(d_in, d_out, seed, env), dims)


def product_channel(choi_a: np.ndarray, choi_b: np.ndarray, dims: Sequence[int]) -> BipartiteChannel:
    """``E_A (x) F_B`` from local Chois on ``(A0, A1)`` and ``(B0, B1)``."""
    a0, b0, a1, b1 = (int(d) for d in dims)
    j = permute_subsystems(np.kron(choi_a, choi_b), (a0, a1, b0, b1), [0, 2, 1, 3])
    return BipartiteChannel(j, (a0, b0, a1, b1), certified_separable=True)


def random_separable_channel(dims: Sequence[int], seed=None, terms: int = 1) -> BipartiteChannel:
    """Random convex mixture of ``terms`` product channels (certified separable)."""
    if terms < 1:
        raise ValueError("terms must be at least 1")
    a0, b0, a1, b1 = (int(d) for d in dims)
    rng = _rng(seed)
    w = rng.dirichlet(np.ones(terms)) if terms > 1 else np.ones(1)
    j = 0
    for wt in w:
        pa = random_local_choi(a0, a1, rng)
        pb = random_local_choi(b0, b1, rng)
        j = j + wt * product_channel(pa, pb, dims).choi
    return BipartiteChannel(j, (a0, b0, a1, b1), certified_separable=True)


def mixture(channels: Sequence[BipartiteChannel], weights: Sequence[float]) -> BipartiteChannel:
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise ValueError("mixture weights must be a probability vector")
    dims = channels[0].dims
    if any(c.dims != dims for c in channels):
        raise ValueError("mixture of channels with different dims")
    j = sum(w * c.choi for w, c in zip(weights, channels))
    sep = all(c.certified_separable for c in channels)
    return BipartiteChannel(j, dims, certified_separable=sep)


def tensor(n: BipartiteChannel, m: BipartiteChannel) -> BipartiteChannel:
    """``N_{AB} (x) M_{CD}`` as a bipartite channel across ``AC : BD``.

    Grouped dims are ``(|A0||C0|, |B0||D0|, |A1||C1|, |B1||D1|)`` with the
    ``N`` factor first inside each group.
    """
    a0, b0, a1, b1 = n.dims
    c0, d0, c1, d1 = m.dims
    j = permute_subsystems(np.kron(n.choi, m.choi), (a0, b0, a1, b1, c0, d0, c1, d1),
                           [0, 4, 1, 5, 2, 6, 3, 7])
    return BipartiteChannel(j, (a0 * c0, b0 * d0, a1 * c1, b1 * d1),
                            n.certified_separable and m.certified_separable)


# -- states through channels ----------------------------------------------------
def apply(channel: BipartiteChannel, state) -> DensityOperator:
    """``(N (x) id_R)(rho)`` for ``rho`` on ``(A0, B0, R...)``.

    The state's dims must start with ``(|A0|, |B0|)``; any further subsystems
    form the untouched reference and keep their place after ``(A1, B1)``.
    """
    if not isinstance(state, DensityOperator):
        raise TypeError("apply() expects a DensityOperator")
    a0, b0, a1, b1 = channel.dims
    if tuple(state.dims[:2]) != (a0, b0):
        raise ValueError(f"state dims {state.dims} do not start with the channel inputs {(a0, b0)}")
    ref = tuple(state.dims[2:])
    d_ref = int(np.prod(ref)) if ref else 1
    out = apply_choi(channel.choi, channel.d_in, channel.d_out, state.matrix, d_ref)
    return DensityOperator(hermitian_part(out), (a1, b1) + ref)


def is_ppt(channel: BipartiteChannel) -> PptFlag:
    """PPT test of the Choi matrix across ``A0 A1 : B0 B1``."""
    lam = float(np.linalg.eigvalsh(hermitian_part(
        partial_transpose(channel.choi, channel.dims, PPT_CUT)))[0])
    return PptFlag(lam >= get_tolerances().psd, lam)


# -- operator Schmidt decomposition ----------------------------------------------
def operator_schmidt(u, dims: Sequence[int], tol: float = 1e-12):
    """Operator Schmidt decomposition ``u = sum_j c_j A_j (x) B_j``.

    Computed from the SVD of the realigned matrix
    ``R[(a a'), (b b')] = u[(a b), (a' b')]``.  Coefficients are real,
    nonnegative and descending; ``A_j`` and ``B_j`` are orthonormal in the
    Hilbert-Schmidt inner product.  Terms with ``c_j <= tol * c_0`` are dropped.

    :return: list of ``(c_j, A_j, B_j)``.
    """
    u = as_matrix(u)
    da, db = int(dims[0]), int(dims[1])
    if u.shape != (da * db, da * db):
        raise ValueError(f"operator of shape {u.shape} does not match dims {(da, db)}")
    if np.max(np.abs(u.conj().T @ u - np.eye(da * db))) > 1e-9:
        raise ValueError("operator_schmidt expects a unitary")
    r = u.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)
    w, s, vh = np.linalg.svd(r)
    keep = s > tol * s[0]
    return [(float(s[j]), w[:, j].reshape(da, da), vh[j].reshape(db, db))
            for j in np.flatnonzero(keep)]
