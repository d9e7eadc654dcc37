"""Layout of a channel-valued SDP variable.

Measures are written once against this small interface and run either on
full Choi matrices or on the four-block representation of channels whose
catalyst part is twirl invariant (:class:`~dynent.twirl.CatalystChannel`).
"""
from __future__ import annotations

import numpy as np

from ..channels import PPT_CUT, BipartiteChannel
from ..twirl import CatalystChannel, catalyst_pt_coefficients

__all__ = ["FullSpace", "CatalystSpace", "space_of", "field_for"]


class FullSpace:
    """One block: the normalized Choi matrix on ``(A0, B0, A1, B1)``."""

    nblocks = 1

    def __init__(self, dims):
        self.dims = tuple(int(d) for d in dims)
        self.d_in = self.dims[0] * self.dims[1]
        self.d_out = self.dims[2] * self.dims[3]
        self.block_dim = self.d_in * self.d_out

    def data(self, channel) -> list:
        if not isinstance(channel, BipartiteChannel) or channel.dims != self.dims:
            raise ValueError(f"expected a channel with dims {self.dims}")
        return [channel.choi]

    def variables(self, prog, name: str) -> list:
        return [prog.variable(name, self.block_dim)]

    def zeros(self) -> list:
        return [np.zeros((self.block_dim, self.block_dim))]

    def ppt(self, prog, xs) -> None:
        prog.psd(xs[0].ptranspose(self.dims, PPT_CUT))

    def marginal(self, xs):
        """Input marginal ``sum_i tr_out X_i`` (``I / d_in`` for a channel)."""
        return xs[0].ptrace((self.d_in, self.d_out), [0])

    def channel(self, blocks) -> BipartiteChannel:
        return BipartiteChannel.from_solver(blocks[0], self.dims)

    def same_as(self, other) -> bool:
        return isinstance(other, FullSpace) and other.dims == self.dims


class CatalystSpace(FullSpace):
    """Four blocks on the ``AB`` Choi space, one per twirl-basis element of the catalyst."""

    nblocks = 4

    def __init__(self, ab_dims, l: int):
        super().__init__(ab_dims)
        self.l = int(l)
        self._c = catalyst_pt_coefficients(self.l)

    def data(self, channel) -> list:
        if not isinstance(channel, CatalystChannel) or channel.ab_dims != self.dims or channel.l != self.l:
            raise ValueError(f"expected a catalyst channel with dims {self.dims} and l = {self.l}")
        return list(channel.blocks)

    def variables(self, prog, name: str) -> list:
        return [prog.variable(f"{name}{i}", self.block_dim) for i in range(4)]

    def zeros(self) -> list:
        return [np.zeros((self.block_dim, self.block_dim)) for _ in range(4)]

    def ppt(self, prog, xs) -> None:
        gam = [x.ptranspose(self.dims, PPT_CUT) for x in xs]
        for j in range(4):
            prog.psd(sum((self._c[i, j] * gam[i] for i in range(1, 4)), self._c[0, j] * gam[0]))

    def marginal(self, xs):
        out = xs[0].ptrace((self.d_in, self.d_out), [0])
        for x in xs[1:]:
            out = out + x.ptrace((self.d_in, self.d_out), [0])
        return out

    def channel(self, blocks) -> CatalystChannel:
        return CatalystChannel.from_blocks_repaired(blocks, self.dims, self.l)

    def same_as(self, other) -> bool:
        return isinstance(other, CatalystSpace) and other.dims == self.dims and other.l == self.l


def space_of(channel):
    if isinstance(channel, CatalystChannel):
        return CatalystSpace(channel.ab_dims, channel.l)
    if isinstance(channel, BipartiteChannel):
        return FullSpace(channel.dims)
    raise TypeError(f"not a channel: {type(channel).__name__}")


def field_for(*arrays) -> str:
    """``real`` when every array is real, which halves the problem size exactly."""
    for a in arrays:
        a = np.asarray(a)
        if np.iscomplexobj(a) and np.max(np.abs(a.imag), initial=0.0) > 1e-13:
            return "complex"
    return "real"
