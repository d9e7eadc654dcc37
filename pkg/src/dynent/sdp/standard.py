"""Semidefinite programs in standard primal form over Hermitian blocks.

A :class:`HermitianSdp` reads ::

    min / max   sum_b <C_b, X_b> + const
    subject to  sum_b <A_kb, X_b> = rhs_k      for every constraint k
                X_b PSD                        for every block b

with ``<X, Y> = Re tr(X^H Y)``.  The dual multipliers ``y_k`` reported in an
:class:`SdpSolution` follow the Lagrangian ``<C, X> - sum_k y_k (<A_k, X> - rhs_k)``,
so for a minimization the dual slack is ``S_b = C_b - sum_k y_k A_kb`` and for
a maximization ``S_b = sum_k y_k A_kb - C_b``; both must be PSD and the dual
objective is ``sum_k y_k rhs_k + const``.
"""
from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from ..config import get_tolerances
from .model import Program

__all__ = ["HermitianSdp", "SdpSolution", "solve", "verify", "embed_real", "project_embedded"]


@dataclasses.dataclass
class HermitianSdp:
    """Primal standard-form SDP.

    :param blocks: ``[(name, dimension), ...]``.
    :param objective: ``{name: coefficient}``; missing blocks have zero cost.
    :param constraints: ``[([(name, coefficient), ...], rhs), ...]``.
    :param sense: ``"min"`` or ``"max"``.
    :param constant: objective offset.
    :param field: ``"complex"`` (Hermitian blocks) or ``"real"`` (symmetric blocks).
    """

    blocks: list
    objective: dict
    constraints: list
    sense: str = "min"
    constant: float = 0.0
    field: str = "complex"

    def __post_init__(self):
        tol = get_tolerances().hermitian
        self.blocks = [(str(n), int(d)) for n, d in self.blocks]
        names = [n for n, _ in self.blocks]
        if len(set(names)) != len(names):
            raise ValueError("duplicate block names")
        dims = dict(self.blocks)
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")

        def check(name, m):
            if name not in dims:
                raise ValueError(f"unknown block {name!r}")
            m = np.asarray(m, dtype=complex)
            if m.shape != (dims[name], dims[name]):
                raise ValueError(f"coefficient for block {name!r} has shape {m.shape}")
            if not np.all(np.isfinite(m)):
                raise ValueError(f"coefficient for block {name!r} has non-finite entries")
            if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
                raise ValueError(f"coefficient for block {name!r} is not Hermitian")
            if self.field == "real" and np.max(np.abs(m.imag), initial=0.0) > tol:
                raise ValueError(f"complex coefficient for block {name!r} in a real program")
            return m

        self.objective = {k: check(k, v) for k, v in self.objective.items()}
        cons = []
        for terms, rhs in self.constraints:
            rhs = float(rhs)
            if not np.isfinite(rhs):
                raise ValueError("constraint right-hand side must be finite")
            cons.append(([(n, check(n, m)) for n, m in terms], rhs))
        self.constraints = cons

    @property
    def dims(self) -> dict:
        return dict(self.blocks)


@dataclasses.dataclass
class SdpSolution:
    """Solver output.

    :param status: ``optimal``, ``infeasible``, ``unbounded`` or ``max-iterations``.
    :param value: primal objective value (including the constant).
    :param primal: block name -> primal matrix.
    :param dual: one multiplier per constraint (sign convention in the module docstring).
    :param residuals: ``primal``, ``dual`` and ``gap`` as reported by the solver.
    """

    status: str
    value: float
    primal: dict
    dual: np.ndarray
    residuals: dict
    iterations: int = 0


def _to_program(problem: HermitianSdp):
    prog = Program(problem.field)
    var = {name: prog.variable(name, d) for name, d in problem.blocks}
    for name in var:
        prog.psd(var[name])
    cons = []
    for terms, rhs in problem.constraints:
        e = prog.constant(0.0)
        for name, m in terms:
            e = e + var[name].inner(m)
        prog.equal(e, rhs)
        cons.append(e)
    obj = prog.constant(problem.constant)
    for name, m in problem.objective.items():
        obj = obj + var[name].inner(m)
    (prog.minimize if problem.sense == "min" else prog.maximize)(obj)
    return prog, var, cons


def _dual_multipliers(problem: HermitianSdp, slack: dict) -> np.ndarray:
    """Recover ``y`` from the dual slack by least squares on the stationarity condition."""
    rows = []
    target = []
    sgn = 1.0 if problem.sense == "min" else -1.0
    for name, d in problem.blocks:
        c = problem.objective.get(name, np.zeros((d, d)))
        # S = sgn * (C - sum y_k A_k)
        target.append(np.concatenate([(c - sgn * slack[name]).real.ravel(),
                                      (c - sgn * slack[name]).imag.ravel()]))
        cols = []
        for terms, _ in problem.constraints:
            a = np.zeros((d, d), dtype=complex)
            for n, m in terms:
                if n == name:
                    a = a + m
            cols.append(np.concatenate([a.real.ravel(), a.imag.ravel()]))
        rows.append(np.array(cols).T if cols else np.zeros((2 * d * d, 0)))
    M = np.vstack(rows)
    t = np.concatenate(target)
    if M.shape[1] == 0:
        return np.zeros(0)
    y, *_ = np.linalg.lstsq(M, t, rcond=None)
    return y


def solve(problem: HermitianSdp, tol: float | None = None, max_iter: int | None = None) -> SdpSolution:
    """Solve a :class:`HermitianSdp` with the interior-point method."""
    t = get_tolerances()
    tol = t.solver if tol is None else tol
    max_iter = t.max_iter if max_iter is None else max_iter
    if tol <= 0:
        raise ValueError("tol must be positive")
    prog, var, _ = _to_program(problem)
    sol = prog.solve(tol=tol, max_iter=max_iter, check=False)
    primal = {name: sol[e] for name, e in var.items()}
    slack = {name: sol.dual(i) for i, (name, _) in enumerate(problem.blocks)}
    y = _dual_multipliers(problem, slack) if sol.status != "infeasible" else np.zeros(len(problem.constraints))
    return SdpSolution(sol.status, float(sol.value), primal, y,
                       {"primal": float(sol.primal_residual), "dual": float(sol.dual_residual),
                        "gap": float(abs(sol.value - sol.dual_value))}, sol.iterations)


def verify(problem: HermitianSdp, sol: SdpSolution, tol: float | None = None) -> dict:
    """Recompute primal feasibility, dual feasibility and duality gap from scratch.

    :return: dict with the three residuals, a ``flags`` list naming every
        residual above ``tol`` and an ``ok`` boolean.
    """
    tol = get_tolerances().solver if tol is None else tol
    dims = problem.dims
    X = {name: np.asarray(sol.primal[name], dtype=complex) for name in dims}
    # primal: equality residuals and PSD violation
    eq = 0.0
    for terms, rhs in problem.constraints:
        lhs = sum(np.real(np.vdot(m, X[n])) for n, m in terms)
        eq = max(eq, abs(lhs - rhs))
    psd = max(max(0.0, -np.linalg.eigvalsh(0.5 * (x + x.conj().T))[0]) for x in X.values())
    herm = max(np.max(np.abs(x - x.conj().T), initial=0.0) for x in X.values())
    primal_res = max(eq, psd, herm)
    # dual: slack matrices from the multipliers
    sgn = 1.0 if problem.sense == "min" else -1.0
    y = np.asarray(sol.dual, dtype=float)
    dual_res = 0.0
    for name, d in problem.blocks:
        s = np.asarray(problem.objective.get(name, np.zeros((d, d))), dtype=complex)
        for k, (terms, _) in enumerate(problem.constraints):
            for n, m in terms:
                if n == name:
                    s = s - y[k] * m
        s = sgn * s
        dual_res = max(dual_res, max(0.0, -np.linalg.eigvalsh(0.5 * (s + s.conj().T))[0]))
    dual_obj = float(sum(yk * rhs for yk, (_, rhs) in zip(y, problem.constraints)) + problem.constant)
    gap = abs(sol.value - dual_obj)
    primal_obj = problem.constant + sum(np.real(np.vdot(problem.objective[n], X[n])) for n in problem.objective)
    value_res = abs(primal_obj - sol.value)
    report = {"primal": float(primal_res), "dual": float(dual_res), "gap": float(gap),
              "objective": float(value_res), "dual_value": dual_obj}
    scale = max(1.0, abs(sol.value))
    flags = [k for k in ("primal", "dual") if report[k] > tol]
    if gap > tol * scale:
        flags.append("gap")
    if value_res > tol * scale:
        flags.append("objective")
    report["flags"] = flags
    report["ok"] = not flags
    return report


# -- real symmetric embedding ---------------------------------------------
def _embed(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def embed_real(problem: HermitianSdp) -> HermitianSdp:
    """Real symmetric program equivalent to a complex one.

    Each ``d x d`` Hermitian block becomes a ``2d x 2d`` symmetric block ``Z``;
    coefficients ``C`` become ``emb(C) / 2`` with ``emb(C) = [[Re C, -Im C], [Im C, Re C]]``,
    so that ``<emb(C)/2, emb(X)> = <C, X>``.  Any optimal ``Z`` projects back to
    an optimal ``X`` with :func:`project_embedded`.
    """
    blocks = [(n, 2 * d) for n, d in problem.blocks]
    obj = {n: 0.5 * _embed(m) for n, m in problem.objective.items()}
    cons = [([(n, 0.5 * _embed(m)) for n, m in terms], rhs) for terms, rhs in problem.constraints]
    return HermitianSdp(blocks, obj, cons, problem.sense, problem.constant, field="real")


def project_embedded(z: np.ndarray) -> np.ndarray:
    """Hermitian matrix whose embedding is the structured part of ``z``."""
    z = np.asarray(z).real
    d = z.shape[0] // 2
    a, b = z[:d, :d], z[d:, :d]
    c, e = z[d:, d:], z[:d, d:]
    return 0.5 * (a + c) + 0.5j * (b - e)
