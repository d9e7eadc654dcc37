"""Orthonormal real coordinates for Hermitian (or real symmetric) matrices.

A Hermitian ``n x n`` matrix is stored as a real vector of length ``n**2``:
the upper triangle in row-major order (diagonal entries as is, off-diagonal
entries scaled by ``sqrt(2)`` on their real part), followed by ``sqrt(2)``
times the imaginary parts of the strict upper triangle.  For the real field
the imaginary block is absent and the length is ``n (n + 1) / 2``.  The map
is an isometry between the trace inner product and the Euclidean one.

Each coordinate ``k`` has a basis matrix
``E_k = w0[k] |a_k><b_k| + w1[k] |b_k><a_k|`` with ``w1 = conj(w0)``;
diagonal entries are split as ``1/2 + 1/2`` so that this form is uniform.
"""
from __future__ import annotations

import functools

import numpy as np
import scipy.sparse as sp

FIELDS = ("real", "complex")
_R2 = np.sqrt(0.5)


def size(n: int, field: str) -> int:
    return n * n if field == "complex" else n * (n + 1) // 2


class Basis:
    """Coordinate system for ``n x n`` Hermitian matrices over ``field``."""

    def __init__(self, n: int, field: str):
        if field not in FIELDS:
            raise ValueError(f"unknown field {field!r}")
        self.n = n
        self.field = field
        a, b = np.triu_indices(n)
        w0 = np.where(a == b, 0.5, _R2).astype(complex)
        if field == "complex":
            strict = a < b
            a = np.concatenate([a, a[strict]])
            b = np.concatenate([b, b[strict]])
            w0 = np.concatenate([w0, np.full(int(strict.sum()), 1j * _R2)])
        self.a = a
        self.b = b
        self.w0 = w0 if field == "complex" else w0.real
        self.w1 = self.w0.conj()
        self.size = len(a)
        self.dtype = complex if field == "complex" else float

    # -- conversions ---------------------------------------------------
    def vec(self, m: np.ndarray) -> np.ndarray:
        """Coordinates of the Hermitian part of ``m``."""
        m = np.asarray(m)
        v = self.w0.conj() * m[self.a, self.b] + self.w1.conj() * m[self.b, self.a]
        return np.real(v).astype(float)

    def mat(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=self.dtype)
        np.add.at(out, (self.a, self.b), self.w0 * v)
        np.add.at(out, (self.b, self.a), self.w1 * v)
        return out

    @functools.cached_property
    def to_full(self) -> sp.csr_matrix:
        """Sparse map from coordinates to the row-major vectorization of the matrix."""
        rows = np.concatenate([self.a * self.n + self.b, self.b * self.n + self.a])
        cols = np.concatenate([np.arange(self.size)] * 2)
        vals = np.concatenate([self.w0, self.w1])
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n * self.n, self.size))

    @functools.cached_property
    def from_full(self) -> sp.csr_matrix:
        """Conjugate transpose of :attr:`to_full`; take the real part of its product."""
        return self.to_full.conj().T.tocsr()

    def operator(self, lin, out: "Basis") -> sp.csr_matrix:
        """Real coordinate matrix of a complex-linear map given on full vectorizations.

        ``lin`` maps ``vec(X)`` (length ``n**2``) to ``vec(f(X))``; ``f`` must send
        Hermitian matrices to Hermitian matrices.
        """
        m = out.from_full @ sp.csr_matrix(lin) @ self.to_full
        m = sp.csr_matrix(m)
        m.data = np.real(m.data) if np.iscomplexobj(m.data) else m.data
        m = sp.csr_matrix(m, dtype=float)
        m.eliminate_zeros()
        return m

    # -- Schur complement block ------------------------------------------
    def congruence_matrix(self, v: np.ndarray) -> np.ndarray:
        """Matrix of ``X -> V X V`` in these coordinates, for Hermitian ``V``.

        Entry ``(k, l)`` is ``Re tr(E_k V E_l V)``; computed by gathering
        entries of ``V`` instead of forming a Kronecker product.
        """
        v = np.asarray(v, dtype=self.dtype)
        va = v[self.a]
        vb = v[self.b]
        g_ba = vb[:, self.a]
        g_ab = va[:, self.b]
        t = g_ba * g_ab.conj()
        del g_ba, g_ab
        t *= np.multiply.outer(self.w0, self.w0)
        g_bb = vb[:, self.b]
        g_aa = va[:, self.a]
        u = g_bb * g_aa.conj()
        del g_bb, g_aa
        u *= np.multiply.outer(self.w0, self.w1)
        t += u
        del u
        k = 2.0 * np.real(t) if np.iscomplexobj(t) else 2.0 * t
        return np.ascontiguousarray(k)


@functools.lru_cache(maxsize=64)
def basis(n: int, field: str) -> Basis:
    return Basis(n, field)
