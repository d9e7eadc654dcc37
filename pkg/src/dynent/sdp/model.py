"""A small modeling layer for building cone programs from matrix expressions.

Expressions are affine in the program's variables and carry their matrix
order.  Structured linear maps (partial trace, partial transpose, subsystem
permutation, tensoring with an identity) are compiled to sparse coordinate
matrices, so large Choi-matrix programs stay cheap to assemble.

Example::

    prog = Program("complex")
    X = prog.variable("X", 2)
    prog.psd(X)
    prog.equal(X.entry(0, 0), 1.0)
    prog.minimize(X.trace())
    sol = prog.solve()
    sol.value          # -> 1.0
"""
from __future__ import annotations

import dataclasses
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from . import hvec
from .solver import ConeProblem, ConeResult, solve_cone
from ..config import get_tolerances

__all__ = ["Program", "Expr", "Solution", "SolverError"]


class SolverError(RuntimeError):
    """Raised when a solve does not end with status ``optimal``."""

    def __init__(self, message: str, solution: "Solution | None" = None):
        super().__init__(message)
        self.solution = solution


def _vec_perm(dims, perm_axes) -> sp.csr_matrix:
    """Sparse permutation acting on row-major vectorizations for an axis permutation."""
    dims = tuple(dims)
    d = int(np.prod(dims))
    idx = np.arange(d * d).reshape(dims + dims).transpose(perm_axes).ravel()
    # new position j holds old index idx[j]
    return sp.csr_matrix((np.ones(d * d), (np.arange(d * d), idx)), shape=(d * d, d * d))


def _ptrace_map(dims, keep) -> sp.csr_matrix:
    dims = tuple(dims)
    n = len(dims)
    d = int(np.prod(dims))
    keep = sorted(keep)
    traced = [i for i in range(n) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    grid = np.indices(dims + dims).reshape(2 * n, -1)
    diag = np.all([grid[i] == grid[n + i] for i in traced], axis=0) if traced else np.ones(d * d, bool)
    src = np.arange(d * d)[diag]
    g = grid[:, diag]
    row = np.zeros(src.size, dtype=np.int64)
    col = np.zeros(src.size, dtype=np.int64)
    for i in keep:
        row = row * dims[i] + g[i]
        col = col * dims[i] + g[n + i]
    tgt = row * dk + col
    return sp.csr_matrix((np.ones(src.size), (tgt, src)), shape=(dk * dk, d * d))


def _kron_identity_map(n_in: int, left: int, right: int) -> sp.csr_matrix:
    """vec(I_left (x) X (x) I_right) as a map of vec(X)."""
    dout = left * n_in * right
    rows, cols = [], []
    for a in range(n_in):
        for b in range(n_in):
            src = a * n_in + b
            for l in range(left):
                for r in range(right):
                    i = (l * n_in + a) * right + r
                    j = (l * n_in + b) * right + r
                    rows.append(i * dout + j)
                    cols.append(src)
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(dout * dout, n_in * n_in))


class Expr:
    """Affine Hermitian-matrix expression ``M(x) = mat(L x + k)`` of fixed order."""

    # let ``ndarray - Expr`` dispatch to Expr.__rsub__ instead of broadcasting
    __array_ufunc__ = None

    def __init__(self, prog: "Program", n: int, lin: sp.csr_matrix, const: np.ndarray):
        self.prog = prog
        self.n = n
        self.lin = lin
        self.const = const

    @property
    def basis(self) -> hvec.Basis:
        return hvec.basis(self.n, self.prog.field)

    def _lin(self):
        # variables may have been added after this expression was built
        nv = self.prog.nvars
        if self.lin.shape[1] < nv:
            self.lin = sp.csr_matrix((self.lin.data, self.lin.indices, self.lin.indptr),
                                     shape=(self.lin.shape[0], nv))
        return self.lin

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "Expr":
        if isinstance(other, Expr):
            if other.n != self.n:
                raise ValueError(f"order mismatch: {self.n} vs {other.n}")
            return other
        m = np.asarray(other)
        if m.ndim == 0:
            m = m * np.eye(self.n)
        return self.prog.constant(m)

    def __add__(self, other):
        o = self._coerce(other)
        return Expr(self.prog, self.n, self._lin() + o._lin(), self.const + o.const)

    __radd__ = __add__

    def __neg__(self):
        return Expr(self.prog, self.n, -self._lin(), -self.const)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, a):
        if isinstance(a, Expr):
            raise TypeError("products of expressions are not affine")
        a = float(a)
        return Expr(self.prog, self.n, self._lin() * a, self.const * a)

    __rmul__ = __mul__

    def __truediv__(self, a):
        return self * (1.0 / float(a))

    # -- structured linear maps -----------------------------------------
    def map(self, full: sp.spmatrix, n_out: int) -> "Expr":
        """Apply a complex-linear map given on row-major vectorizations."""
        out = hvec.basis(n_out, self.prog.field)
        op = self.basis.operator(full, out)
        return Expr(self.prog, n_out, sp.csr_matrix(op @ self._lin()), op @ self.const)

    def ptrace(self, dims: Sequence[int], keep) -> "Expr":
        dims = tuple(dims)
        self._check(dims)
        dk = int(np.prod([dims[i] for i in keep])) if len(keep) else 1
        return self.map(_ptrace_map(dims, keep), dk)

    def ptranspose(self, dims: Sequence[int], transposed) -> "Expr":
        dims = tuple(dims)
        self._check(dims)
        k = len(dims)
        axes = list(range(2 * k))
        for i in transposed:
            axes[i], axes[k + i] = k + i, i
        return self.map(_vec_perm(dims, axes), self.n)

    def permute(self, dims: Sequence[int], order) -> "Expr":
        dims = tuple(dims)
        self._check(dims)
        k = len(dims)
        axes = list(order) + [k + i for i in order]
        return self.map(_vec_perm(dims, axes), self.n)

    def kron_identity(self, left: int = 1, right: int = 1) -> "Expr":
        return self.map(_kron_identity_map(self.n, left, right), left * self.n * right)

    def trace(self) -> "Expr":
        return self.inner(np.eye(self.n))

    def inner(self, c) -> "Expr":
        """Real scalar ``Re tr(C^H M)`` as a 1x1 expression."""
        c = np.asarray(c)
        if c.shape != (self.n, self.n):
            raise ValueError(f"coefficient of shape {c.shape} for order {self.n}")
        v = self.basis.vec(0.5 * (c + c.conj().T))
        row = sp.csr_matrix(v[None, :])
        return Expr(self.prog, 1, sp.csr_matrix(row @ self._lin()), np.array([v @ self.const]))

    def entry(self, i: int, j: int) -> "Expr":
        """Real part of entry ``(i, j)``."""
        c = np.zeros((self.n, self.n))
        c[i, j] = 1.0
        return self.inner(c) if i == j else self.inner(0.5 * (c + c.T)) * 1.0

    def times(self, m) -> "Expr":
        """Scalar expression times a constant Hermitian matrix."""
        if self.n != 1:
            raise ValueError("times() needs a scalar expression")
        m = np.asarray(m)
        out = hvec.basis(m.shape[0], self.prog.field)
        v = out.vec(m)
        lin = sp.csr_matrix(sp.csr_matrix(v[:, None]) @ self._lin())
        return Expr(self.prog, m.shape[0], lin, v * self.const[0])

    def linear(self, fn: Callable[[np.ndarray], np.ndarray], n_out: int) -> "Expr":
        """Apply an arbitrary complex-linear map ``fn`` (evaluated on matrix units)."""
        cols = []
        for k in range(self.n * self.n):
            e = np.zeros(self.n * self.n, dtype=complex)
            e[k] = 1.0
            cols.append(np.asarray(fn(e.reshape(self.n, self.n))).ravel())
        full = np.array(cols).T
        full[np.abs(full) < 1e-15] = 0.0
        return self.map(sp.csr_matrix(full), n_out)

    def _check(self, dims):
        if int(np.prod(dims)) != self.n:
            raise ValueError(f"dims {dims} do not match order {self.n}")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        lin = self._lin()
        return self.basis.mat(lin @ x[: lin.shape[1]] + self.const)


@dataclasses.dataclass
class Solution:
    """Result of :meth:`Program.solve`."""

    status: str
    value: float
    dual_value: float
    primal_residual: float
    dual_residual: float
    gap: float
    iterations: int
    raw: ConeResult
    program: "Program"

    def __getitem__(self, expr: Expr) -> np.ndarray:
        m = expr.evaluate(self.raw.x)
        return m.real if self.program.field == "real" else m

    def dual(self, index: int) -> np.ndarray:
        """Dual matrix of the ``index``-th PSD constraint."""
        return self.raw.z[index]

    def residuals(self) -> dict:
        return {"primal": float(self.primal_residual), "dual": float(self.dual_residual),
                "gap": float(self.gap), "iterations": int(self.iterations)}


class Program:
    """Builder for cone programs over Hermitian (``complex``) or symmetric (``real``) blocks."""

    def __init__(self, field: str = "complex"):
        if field not in hvec.FIELDS:
            raise ValueError(f"unknown field {field!r}")
        self.field = field
        self.nvars = 0
        self.variables = {}
        self._psd: list[Expr] = []
        self._eq: list[Expr] = []
        self._objective: Expr | None = None
        self._sense = 1.0

    # -- variables ---------------------------------------------------------
    def variable(self, name: str, n: int) -> Expr:
        """A free Hermitian (or symmetric) matrix variable of order ``n``."""
        if name in self.variables:
            raise ValueError(f"duplicate variable {name!r}")
        size = hvec.size(n, self.field)
        start = self.nvars
        self.nvars += size
        lin = sp.csr_matrix((np.ones(size), (np.arange(size), np.arange(start, start + size))),
                            shape=(size, self.nvars))
        e = Expr(self, n, lin, np.zeros(size))
        self.variables[name] = e
        return e

    def scalar(self, name: str) -> Expr:
        return self.variable(name, 1)

    def constant(self, m) -> Expr:
        m = np.asarray(m)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if self.field == "real" and np.iscomplexobj(m) and np.max(np.abs(m.imag), initial=0) > 1e-12:
            raise ValueError("complex data in a real-field program")
        b = hvec.basis(m.shape[0], self.field)
        return Expr(self, m.shape[0], sp.csr_matrix((b.size, self.nvars)), b.vec(m))

    # -- constraints -------------------------------------------------------
    def psd(self, e: Expr) -> int:
        """Constrain ``e`` to be PSD; returns the constraint index (for duals)."""
        self._psd.append(e)
        return len(self._psd) - 1

    def nonneg(self, e: Expr) -> int:
        if e.n != 1:
            raise ValueError("nonneg() needs a scalar expression")
        return self.psd(e)

    def equal(self, e: Expr, rhs=0.0) -> None:
        self._eq.append(e - rhs)

    def minimize(self, e: Expr) -> None:
        if e.n != 1:
            raise ValueError("objective must be a scalar expression")
        self._objective, self._sense = e, 1.0

    def maximize(self, e: Expr) -> None:
        if e.n != 1:
            raise ValueError("objective must be a scalar expression")
        self._objective, self._sense = e, -1.0

    # -- compile / solve ---------------------------------------------------
    def compile(self) -> tuple[ConeProblem, float]:
        nv = self.nvars
        obj = self._objective if self._objective is not None else self.constant(0.0)
        c = np.asarray(obj._lin().toarray()).ravel() * self._sense
        c0 = float(obj.const[0]) * self._sense
        G = [-e._lin() for e in self._psd]
        h = [e.const.copy() for e in self._psd]
        if self._eq:
            A = sp.vstack([e._lin() for e in self._eq]).tocsr()
            b = -np.concatenate([e.const for e in self._eq])
        else:
            A = sp.csr_matrix((0, nv))
            b = np.zeros(0)
        A, b = _independent_rows(A, b)
        prob = ConeProblem(c, G, h, A, b, [e.n for e in self._psd], self.field)
        return prob, c0

    def solve(self, tol: float | None = None, max_iter: int | None = None, check: bool = True) -> Solution:
        """Solve; raises :class:`SolverError` unless optimal when ``check`` is set."""
        t = get_tolerances()
        tol = t.solver if tol is None else tol
        max_iter = t.max_iter if max_iter is None else max_iter
        prob, c0 = self.compile()
        res = solve_cone(prob, tol=tol, max_iter=max_iter)
        sol = Solution(res.status, self._sense * res.primal_objective + c0,
                       self._sense * res.dual_objective + c0, res.primal_residual,
                       res.dual_residual, res.gap, res.iterations, res, self)
        if check and res.status != "optimal":
            raise SolverError(f"solver ended with status {res.status!r} "
                              f"(pres {res.primal_residual:.2e}, dres {res.dual_residual:.2e})", sol)
        return sol


def _independent_rows(A: sp.csr_matrix, b: np.ndarray, tol: float = 1e-10):
    """Drop linearly dependent equality rows (after checking consistency)."""
    if A.shape[0] == 0:
        return A, b
    A = A.tocsr()
    nz = np.diff(A.indptr) > 0
    if np.any(np.abs(b[~nz]) > 1e-9):
        raise ValueError("inconsistent equality constraints (0 = nonzero)")
    A, b = A[nz], b[nz]
    if A.shape[0] == 0:
        return A, b
    import scipy.linalg as sla
    dense = A.toarray()
    q, r, piv = sla.qr(dense.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > tol * max(1.0, diag[0] if diag.size else 1.0)))
    if rank == A.shape[0]:
        return A, b
    keep = np.sort(piv[:rank])
    drop = np.setdiff1d(np.arange(A.shape[0]), keep)
    # dropped rows must be implied by the kept ones
    sol, *_ = np.linalg.lstsq(dense[keep].T, dense[drop].T, rcond=None)
    if np.max(np.abs(sol.T @ b[keep] - b[drop]), initial=0.0) > 1e-8:
        raise ValueError("inconsistent equality constraints")
    return A[keep], b[keep]
