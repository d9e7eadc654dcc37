"""Dense linear algebra on tensor-product structured operators.

Subsystems are indexed from zero in the order they appear in the Kronecker
product, with row-major vectorization: for ``dims = (d0, d1, d2)`` the basis
vector ``|i0 i1 i2>`` sits at position ``(i0 * d1 + i1) * d2 + i2``.
"""
from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .config import get_tolerances

__all__ = [
    "DensityOperator",
    "as_matrix",
    "hermitian_part",
    "is_hermitian",
    "kron",
    "partial_trace",
    "partial_transpose",
    "permute_subsystems",
    "trace_norm",
    "fidelity",
    "min_eigenvalue",
    "sqrtm_psd",
    "random_density",
    "random_pure_state",
    "random_unitary",
]


def as_matrix(m, square: bool = True) -> np.ndarray:
    """Return ``m`` as a finite complex 2-D array, raising ``ValueError`` otherwise."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def is_hermitian(m: np.ndarray, tol: float | None = None) -> bool:
    tol = get_tolerances().hermitian if tol is None else tol
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def kron(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor first."""
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op))
    return out


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError(f"subsystem dimensions must be positive, got {dims}")
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise ValueError(f"dims {dims} (product {total}) do not match matrix shape {m.shape}")
    return dims


def _check_indices(indices, n: int) -> list[int]:
    idx = sorted(set(int(i) for i in indices))
    if idx and (idx[0] < 0 or idx[-1] >= n):
        raise ValueError(f"subsystem indices {idx} out of range for {n} subsystems")
    return idx


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    :param m: square matrix on ``prod(dims)``.
    :param dims: subsystem dimensions in Kronecker order.
    :param keep: indices of the subsystems to keep; their relative order is preserved.
    :return: the reduced operator on ``prod(dims[keep])``.
    """
    m = np.asarray(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    keep = _check_indices(keep, n)
    traced = [i for i in range(n) if i not in keep]
    t = m.reshape(dims + dims)
    # trace pairs from the highest index down so axis numbers stay valid
    for count, i in enumerate(sorted(traced, reverse=True)):
        remaining = n - count
        t = np.trace(t, axis1=i, axis2=i + remaining)
    dk = int(np.prod([dims[i] for i in keep]))
    return t.reshape(dk, dk)


def partial_transpose(m, dims: Sequence[int], transposed) -> np.ndarray:
    """Transpose the listed subsystems, leaving the others untouched."""
    m = np.asarray(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    sys = _check_indices(transposed, n)
    perm = list(range(2 * n))
    for i in sys:
        perm[i], perm[n + i] = n + i, i
    return m.reshape(dims + dims).transpose(perm).reshape(m.shape)


def permute_subsystems(m, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so that new factor ``j`` is old factor ``order[j]``."""
    m = np.asarray(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    order = [int(i) for i in order]
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order} is not a permutation of {n} subsystems")
    perm = order + [n + i for i in order]
    return m.reshape(dims + dims).transpose(perm).reshape(m.shape)


def trace_norm(m) -> float:
    """Sum of singular values."""
    m = as_matrix(m, square=False)
    if m.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def min_eigenvalue(m) -> float:
    """Smallest eigenvalue of a Hermitian matrix; raises on non-Hermitian input."""
    m = as_matrix(m)
    if not is_hermitian(m):
        raise ValueError("min_eigenvalue requires a Hermitian matrix")
    return float(np.linalg.eigvalsh(hermitian_part(m))[0])


def sqrtm_psd(m) -> np.ndarray:
    """Square root of a PSD matrix; eigenvalues down to the PSD tolerance are clamped at 0."""
    m = as_matrix(m)
    w, v = np.linalg.eigh(hermitian_part(m))
    if w.size and w[0] < get_tolerances().psd:
        raise ValueError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Squared fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

    For pure states this is ``|<psi|phi>|**2``.
    """
    a = rho.matrix if isinstance(rho, DensityOperator) else as_matrix(rho)
    b = sigma.matrix if isinstance(sigma, DensityOperator) else as_matrix(sigma)
    if a.shape != b.shape:
        raise ValueError(f"fidelity of operators with shapes {a.shape} and {b.shape}")
    # nuclear norm of sqrt(a) sqrt(b) is better conditioned than the nested square root
    s = np.linalg.svd(sqrtm_psd(a) @ sqrtm_psd(b), compute_uv=False)
    return float(min(max(np.sum(s) ** 2, 0.0), 1.0))


@dataclasses.dataclass(frozen=True, eq=False)
class DensityOperator:
    """A unit-trace PSD operator tagged with its subsystem dimensions.

    The stored matrix is read-only.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        tol = get_tolerances()
        m = as_matrix(self.matrix).copy()
        dims = _check_dims(m, self.dims)
        if not is_hermitian(m, tol.hermitian):
            raise ValueError("density operator is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > max(tol.hermitian, 1e-10):
            raise ValueError(f"density operator has trace {tr!r}, expected 1")
        lam = np.linalg.eigvalsh(hermitian_part(m))[0]
        if lam < tol.psd:
            raise ValueError(f"density operator has negative eigenvalue {lam:.3e}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_vector(cls, psi, dims) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), tuple(dims))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def ptrace(self, keep) -> "DensityOperator":
        keep = _check_indices(keep, len(self.dims))
        return DensityOperator(partial_trace(self.matrix, self.dims, keep),
                               tuple(self.dims[i] for i in keep))

    def ptranspose(self, transposed) -> np.ndarray:
        return partial_transpose(self.matrix, self.dims, transposed)

    def tensor(self, other: "DensityOperator") -> "DensityOperator":
        return DensityOperator(np.kron(self.matrix, other.matrix), self.dims + other.dims)

    def permute(self, order) -> "DensityOperator":
        return DensityOperator(permute_subsystems(self.matrix, self.dims, order),
                               tuple(self.dims[i] for i in order))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with phase fix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def random_pure_state(dims: Sequence[int], rng: np.random.Generator) -> DensityOperator:
    d = int(np.prod(dims))
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return DensityOperator.from_vector(v, dims)


def random_density(dims: Sequence[int], rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Random mixed state from the induced (Ginibre) measure."""
    d = int(np.prod(dims))
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    rho = hermitian_part(rho / np.trace(rho).real)
    return DensityOperator(rho, tuple(dims))


def matrix_inverse_sqrt_psd(m: np.ndarray, cutoff: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Pseudo-inverse square root on the support and the projector onto the support."""
    w, v = sla.eigh(hermitian_part(m))
    keep = w > cutoff * max(1.0, float(np.max(np.abs(w), initial=0.0)))
    vk = v[:, keep]
    return (vk / np.sqrt(w[keep])) @ vk.conj().T, vk @ vk.conj().T
