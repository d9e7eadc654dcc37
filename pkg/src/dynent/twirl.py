"""Twisted twirling and channels with a twirl-invariant catalyst part.

The twisted twirl of a channel ``E: A0 B0 -> A1 B1`` averages
``(U_{A1} (x) V_{B1}) o E o (V_{A0}^H (x) U_{B0}^H)`` over independent Haar
unitaries ``U`` and ``V``.  On the Choi matrix this is the ``conj(V) (x) V``
twirl on the pair ``(A0, B1)`` together with the ``conj(U) (x) U`` twirl on the
pair ``(B0, A1)``.  Each pair twirl projects onto ``span{Phi, I - Phi}``, so
the image is spanned by the four products

    Phi (x) Phi,  Phi (x) Phi_perp,  Phi_perp (x) Phi,  Phi_perp (x) Phi_perp

(first factor on ``(A0, B1)``, second on ``(B0, A1)``, ``Phi_perp = (I - Phi) / (k^2 - 1)``),
and ``Phi (x) Phi`` is the Choi matrix of the swap channel.

:class:`CatalystChannel` stores a channel on ``AC : BD`` whose ``CD`` part has
been twisted-twirled, as four operators on the ``AB`` Choi space.  The PSD,
PPT and trace-preservation conditions decouple block by block, which keeps
catalysis computations at the size of the ``AB`` problem.
"""
from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from .channels import PPT_CUT, BipartiteChannel, repair_choi
from .config import get_tolerances
from .linalg import hermitian_part, partial_trace, partial_transpose, permute_subsystems

__all__ = ["CatalystChannel", "pair_twirl", "twirl_basis", "twirl_coefficients", "twisted_twirl",
           "catalyst_pt_coefficients"]

# Choi subsystem order (A0, B0, A1, B1); the twirl pairs
_V_PAIR = (0, 3)
_U_PAIR = (1, 2)


def _mes_projector(k: int) -> np.ndarray:
    v = np.zeros(k * k)
    v[:: k + 1] = 1.0 / np.sqrt(k)
    return np.outer(v, v)


def pair_twirl(m: np.ndarray, dims: Sequence[int], pair: tuple[int, int]) -> np.ndarray:
    """Average of ``(conj(U) (x) U) M (conj(U) (x) U)^H`` over Haar ``U`` on two subsystems.

    Closed form from the second-moment (Weingarten) formula: with ``X`` the
    partial trace of ``M`` over the pair and ``Y`` the partial trace of
    ``(Phi (x) I) M``, the average is
    ``I (x) (X - Y)/(k^2 - 1) + Phi (x) (k^2 Y - X)/(k^2 - 1)``.
    """
    dims = tuple(int(d) for d in dims)
    p, q = pair
    k = dims[p]
    if dims[q] != k:
        raise ValueError(f"twirl pair {pair} has unequal dims {dims[p]}, {dims[q]}")
    n = len(dims)
    rest = [i for i in range(n) if i not in pair]
    order = [p, q] + rest
    mm = permute_subsystems(m, dims, order)
    rd = int(np.prod([dims[i] for i in rest])) if rest else 1
    phi = _mes_projector(k)
    x = partial_trace(mm, (k * k, rd), [1])
    y = partial_trace(np.kron(phi, np.eye(rd)) @ mm, (k * k, rd), [1])
    kk = k * k - 1
    out = np.kron(np.eye(k * k), (x - y) / kk) + np.kron(phi, (k * k * y - x) / kk)
    inverse = np.argsort(order)
    return permute_subsystems(out, [dims[i] for i in order], inverse)


def _check_twistable(dims):
    a0, b0, a1, b1 = dims
    if a0 != b1 or b0 != a1:
        raise ValueError(f"twisted twirl needs |A0| = |B1| and |B0| = |A1|, got dims {dims}")


def twisted_twirl(e: BipartiteChannel) -> BipartiteChannel:
    """Twisted twirl of a channel, evaluated exactly."""
    _check_twistable(e.dims)
    j = pair_twirl(e.choi, e.dims, _V_PAIR)
    j = pair_twirl(j, e.dims, _U_PAIR)
    return BipartiteChannel(hermitian_part(j), e.dims, e.certified_separable)


def _projectors(dims) -> list[np.ndarray]:
    """The four orthogonal projectors of the twirl image on (A0, B0, A1, B1)."""
    a0, b0, a1, b1 = dims
    pv, pu = _mes_projector(a0), _mes_projector(b0)
    out = []
    for x in (pv, np.eye(a0 * a0) - pv):
        for y in (pu, np.eye(b0 * b0) - pu):
            # kron order (A0, B1, B0, A1) -> (A0, B0, A1, B1)
            out.append(permute_subsystems(np.kron(x, y), (a0, b1, b0, a1), [0, 2, 3, 1]))
    return out


def twirl_basis(dims) -> list[np.ndarray]:
    """Trace-one basis of the twirl image; element 0 is the swap Choi matrix."""
    _check_twistable(dims)
    return [p / np.trace(p).real for p in _projectors(dims)]


def twirl_coefficients(e: BipartiteChannel) -> np.ndarray:
    """Weights of the twirled Choi on :func:`twirl_basis` (they sum to one)."""
    _check_twistable(e.dims)
    return np.array([np.real(np.vdot(p, e.choi)) for p in _projectors(e.dims)])


def catalyst_pt_coefficients(l: int) -> np.ndarray:
    """Matrix ``c`` with ``P_i^Gamma = sum_j c[i, j] Q_j`` on the catalyst.

    ``P_i`` is :func:`twirl_basis` for dims ``(l, l, l, l)``, ``Gamma`` the partial
    transpose on the B side, and ``Q_j`` the products of symmetric/antisymmetric
    projectors ``SS, SA, AS, AA`` on the pairs ``(C0, D1)`` and ``(D0, C1)``.
    """
    phi = np.array([1.0 / l, -1.0 / l])
    perp = np.array([1.0 / (l * (l + 1)), 1.0 / (l * (l - 1))])
    factors = [phi, perp]
    c = np.zeros((4, 4))
    for i, (f1, f2) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
        c[i] = np.outer(factors[f1], factors[f2]).ravel()
    return c


def _catalyst_sym_projectors(l: int) -> list[np.ndarray]:
    """``SS, SA, AS, AA`` on (C0, D0, C1, D1), pairs (C0, D1) and (D0, C1)."""
    f = np.zeros((l * l, l * l))
    for i in range(l):
        for j in range(l):
            f[i * l + j, j * l + i] = 1.0
    s = 0.5 * (np.eye(l * l) + f)
    a = 0.5 * (np.eye(l * l) - f)
    out = []
    for x in (s, a):
        for y in (s, a):
            out.append(permute_subsystems(np.kron(x, y), (l, l, l, l), [0, 2, 3, 1]))
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class CatalystChannel:
    """Channel on ``AC : BD`` of the form ``sum_i X_i (x) P_i``.

    ``P_i`` is :func:`twirl_basis` on the catalyst ``CD`` (all four dims ``l``),
    so ``P_0`` is the swap Choi ``F^l``.  ``X_i`` are PSD operators on the
    ``AB`` Choi space with ``sum_i tr_{A1 B1} X_i = I / (|A0||B0|)``.

    :param blocks: the four operators ``X_i``.
    :param ab_dims: ``(|A0|, |B0|, |A1|, |B1|)``.
    :param l: catalyst dimension.
    """

    blocks: tuple
    ab_dims: tuple
    l: int

    def __post_init__(self):
        tol = get_tolerances()
        dims = tuple(int(d) for d in self.ab_dims)
        d = int(np.prod(dims))
        if self.l < 2:
            raise ValueError("catalyst dimension must be at least 2")
        blocks = []
        if len(self.blocks) != 4:
            raise ValueError("a catalyst channel has exactly four blocks")
        for x in self.blocks:
            x = np.array(x, dtype=complex)
            if x.shape != (d, d):
                raise ValueError(f"block of shape {x.shape}, expected {(d, d)}")
            if np.max(np.abs(x - x.conj().T)) > tol.hermitian:
                raise ValueError("catalyst block is not Hermitian")
            if np.linalg.eigvalsh(hermitian_part(x))[0] < tol.psd:
                raise ValueError("catalyst block is not PSD")
            x.flags.writeable = False
            blocks.append(x)
        d_in = dims[0] * dims[1]
        marg = sum(partial_trace(x, (d_in, dims[2] * dims[3]), [0]) for x in blocks)
        if np.max(np.abs(marg - np.eye(d_in) / d_in)) > tol.trace:
            raise ValueError("catalyst channel is not trace preserving")
        object.__setattr__(self, "blocks", tuple(blocks))
        object.__setattr__(self, "ab_dims", dims)

    # -- construction -------------------------------------------------------------
    @classmethod
    def product(cls, n: BipartiteChannel, l: int) -> "CatalystChannel":
        """``N (x) F^l``."""
        z = np.zeros_like(n.choi)
        return cls((n.choi, z, z, z), n.dims, l)

    @classmethod
    def from_blocks_repaired(cls, blocks, ab_dims, l) -> "CatalystChannel":
        """Build from approximately valid blocks (solver output)."""
        dims = tuple(int(d) for d in ab_dims)
        d_in, d_out = dims[0] * dims[1], dims[2] * dims[3]
        fixed = []
        for x in blocks:
            w, v = np.linalg.eigh(hermitian_part(np.asarray(x, dtype=complex)))
            fixed.append((v * np.clip(w, 0, None)) @ v.conj().T)
        marg = sum(partial_trace(x, (d_in, d_out), [0]) for x in fixed) * d_in
        mw, mv = np.linalg.eigh(hermitian_part(marg))
        k = np.kron((mv / np.sqrt(mw)) @ mv.conj().T, np.eye(d_out))
        return cls(tuple(hermitian_part(k @ x @ k) for x in fixed), dims, l)

    @classmethod
    def from_channel(cls, e: BipartiteChannel, ab_dims, l: int) -> "CatalystChannel":
        """Twisted-twirl the catalyst part of a channel on ``AC : BD``."""
        a0, b0, a1, b1 = (int(d) for d in ab_dims)
        if e.dims != (a0 * l, b0 * l, a1 * l, b1 * l):
            raise ValueError(f"channel dims {e.dims} do not factor as {ab_dims} with catalyst {l}")
        j = permute_subsystems(e.choi, (a0, l, b0, l, a1, l, b1, l), [0, 2, 4, 6, 1, 3, 5, 7])
        dab, dcd = a0 * b0 * a1 * b1, l ** 4
        j4 = j.reshape(dab, dcd, dab, dcd)
        blocks = [np.einsum("acbd,dc->ab", j4, p) for p in _projectors((l, l, l, l))]
        return cls(tuple(hermitian_part(x) for x in blocks), (a0, b0, a1, b1), l)

    # -- views -----------------------------------------------------------------------
    @property
    def dims(self) -> tuple:
        a0, b0, a1, b1 = self.ab_dims
        l = self.l
        return (a0 * l, b0 * l, a1 * l, b1 * l)

    @property
    def d_in(self) -> int:
        return self.dims[0] * self.dims[1]

    @property
    def is_real(self) -> bool:
        return all(np.max(np.abs(x.imag), initial=0.0) <= 1e-13 for x in self.blocks)

    @property
    def swap_weight(self) -> float:
        """Weight ``p`` of the ``(.) (x) F^l`` component."""
        return float(np.trace(self.blocks[0]).real)

    def to_choi(self) -> np.ndarray:
        a0, b0, a1, b1 = self.ab_dims
        l = self.l
        basis = twirl_basis((l, l, l, l))
        j = sum(np.kron(x, p) for x, p in zip(self.blocks, basis))
        return permute_subsystems(j, (a0, b0, a1, b1, l, l, l, l), [0, 4, 1, 5, 2, 6, 3, 7])

    def to_channel(self) -> BipartiteChannel:
        return BipartiteChannel(hermitian_part(self.to_choi()), self.dims)

    def pt_blocks(self) -> list[np.ndarray]:
        """Blocks of the partially transposed Choi; it is PSD iff all of these are."""
        c = catalyst_pt_coefficients(self.l)
        gam = [partial_transpose(x, self.ab_dims, PPT_CUT) for x in self.blocks]
        return [hermitian_part(sum(c[i, j] * gam[i] for i in range(4))) for j in range(4)]

    def min_pt_eigenvalue(self) -> float:
        return min(float(np.linalg.eigvalsh(b)[0]) for b in self.pt_blocks())

    def factor(self) -> tuple[float, BipartiteChannel | None]:
        """Split off the swap component as ``p * (N (x) F^l)``.

        Returns ``(p, N)``; ``N`` is ``None`` when the normalized block is not
        trace preserving on ``AB``.
        """
        p = self.swap_weight
        if p <= 0:
            return 0.0, None
        x = self.blocks[0] / p
        dims = self.ab_dims
        d_in = dims[0] * dims[1]
        marg = partial_trace(x, (d_in, dims[2] * dims[3]), [0])
        if np.max(np.abs(marg - np.eye(d_in) / d_in)) > 1e-7:
            return p, None
        return p, BipartiteChannel(repair_choi(x, d_in, dims[2] * dims[3]), dims)


def mix_catalyst(channels: Sequence[CatalystChannel], weights: Sequence[float]) -> CatalystChannel:
    first = channels[0]
    blocks = tuple(sum(w * c.blocks[i] for w, c in zip(weights, channels)) for i in range(4))
    return CatalystChannel(blocks, first.ab_dims, first.l)
