"""Hypothesis-testing divergences of states and of channels against free channels.

For a channel ``N`` and an input ``psi`` on ``(A0, B0, R)`` write
``omega = (N (x) id)(psi)``.  The fixed-input quantity is

    E_H(N, psi) = min_M D_H(omega || (M (x) id)(psi))
                = -log2 max_M min_Q tr(Q (M (x) id)(psi))

over free ``M`` and tests ``0 <= Q <= I`` with ``tr(Q omega) >= 1 - eps``.
The objective is bilinear and both sets are compact and convex, so the max
and min can be exchanged.  For fixed ``Q`` the inner maximum over PPT channels
is an SDP whose dual is

    min  tr(H) / d_in
    s.t. H (x) I_out - X(Q) - B^Gamma PSD,  B PSD,

where ``X(Q)`` is the operator with ``<J_M, X(Q)> = tr(Q (M (x) id)(psi))``.
Joining the two minimizations gives one program over ``(Q, H, B)``.
:func:`eh_swapped_minimax` solves the other order (a maximization over ``M``)
and serves as an independent check of the exchange and of the dualization.
"""
from __future__ import annotations

import math

import numpy as np

from ..channels import PPT_CUT, BipartiteChannel, apply_choi
from ..linalg import DensityOperator, hermitian_part, random_pure_state
from ..sdp import Program, SolverError
from .report import MeasureReport
from .space import field_for

__all__ = [
    "choi_input", "eh_fixed_input", "support_projector", "eh_maximize", "eh_swapped_minimax",
    "hypothesis_testing_divergence", "hypothesis_testing_report",
]

_ZERO = 1e-9  # optimal tr(Q sigma) at or below this is read as zero (divergence +inf)


def _matrix(x) -> np.ndarray:
    return x.matrix if isinstance(x, DensityOperator) else np.asarray(x, dtype=complex)


def _check_eps(epsilon):
    if not 0 <= epsilon < 1:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")


def support_projector(m: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Projector onto the eigenvectors of ``m`` above ``rel_tol * max eigenvalue``."""
    w, v = np.linalg.eigh(hermitian_part(m))
    keep = w > rel_tol * max(w[-1], 1e-300)
    return v[:, keep] @ v[:, keep].conj().T


def _neg_log(v: float) -> float:
    return math.inf if v <= _ZERO else -math.log2(min(v, 1.0))


# -- states ------------------------------------------------------------------------
def hypothesis_testing_report(rho, sigma, epsilon: float, tol: float | None = None) -> MeasureReport:
    """``-log2 min tr(Q sigma)`` over ``0 <= Q <= I`` with ``tr(Q rho) >= 1 - epsilon``.

    At ``epsilon = 0`` the constraint forces ``Q`` to be the identity on the
    support of ``rho``, and the support projector itself is optimal.
    """
    _check_eps(epsilon)
    r, s = _matrix(rho), _matrix(sigma)
    if r.shape != s.shape:
        raise ValueError(f"state shapes differ: {r.shape} vs {s.shape}")
    if epsilon == 0:
        q = support_projector(r)
        v = float(np.real(np.vdot(q, s)))
        return MeasureReport("hypothesis_testing_divergence", _neg_log(v), "exact", 0.0,
                             details={"min_type2": v}, artifacts={"Q": q})
    d = r.shape[0]
    prog = Program(field_for(r, s))
    q = prog.variable("Q", d)
    prog.psd(q)
    prog.psd(np.eye(d) - q)
    prog.nonneg(q.inner(r) - (1.0 - epsilon))
    prog.minimize(q.inner(s))
    sol = prog.solve(tol=tol)
    return MeasureReport("hypothesis_testing_divergence", _neg_log(sol.value), "exact", epsilon,
                         sol.residuals(), details={"min_type2": sol.value},
                         artifacts={"Q": sol[q]})


def hypothesis_testing_divergence(rho, sigma, epsilon: float, tol: float | None = None) -> float:
    return float(hypothesis_testing_report(rho, sigma, epsilon, tol).value)


# -- channels ------------------------------------------------------------------------
def choi_input(dims) -> DensityOperator:
    """``Phi_{A0 A0'} (x) Phi_{B0 B0'}`` ordered ``(A0, B0, A0', B0')``; its output is the Choi matrix."""
    a0, b0 = int(dims[0]), int(dims[1])
    d = a0 * b0
    v = np.zeros(d * d)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return DensityOperator(np.outer(v, v), (a0, b0, a0, b0))


def _setup(n: BipartiteChannel, psi: DensityOperator, epsilon: float):
    _check_eps(epsilon)
    if not isinstance(psi, DensityOperator):
        raise TypeError("psi must be a DensityOperator")
    if tuple(psi.dims[:2]) != n.dims[:2]:
        raise ValueError(f"psi dims {psi.dims} do not start with the channel inputs {n.dims[:2]}")
    d_in, d_out = n.d_in, n.d_out
    d_ref = psi.dim // d_in
    omega = hermitian_part(apply_choi(n.choi, d_in, d_out, psi.matrix, d_ref))
    return d_in, d_out, d_ref, omega


def _x_map(psi: np.ndarray, d_in: int, d_out: int, d_ref: int):
    """``Q -> X(Q)`` with ``<J, X(Q)> = tr(Q (M_J (x) id)(psi))``."""
    p4 = psi.reshape(d_in, d_ref, d_in, d_ref)

    def x_of(q):
        q4 = np.asarray(q).reshape(d_out, d_ref, d_out, d_ref)
        return d_in * np.einsum("jsir,orps->iojp", p4, q4).reshape(d_in * d_out, d_in * d_out)

    return x_of


def _input_operator(choi: np.ndarray, q: np.ndarray, d_in: int, d_out: int, d_ref: int) -> np.ndarray:
    """``A`` with ``tr(A psi) = tr(Q (M (x) id)(psi))`` for every ``psi``."""
    j4 = choi.reshape(d_in, d_out, d_in, d_out)
    q4 = q.reshape(d_out, d_ref, d_out, d_ref)
    a = d_in * np.einsum("iojp,psor->jsir", j4, q4)
    return hermitian_part(a.reshape(d_in * d_ref, d_in * d_ref))


def eh_fixed_input(n: BipartiteChannel, psi: DensityOperator, epsilon: float,
                   tol: float | None = None) -> MeasureReport:
    """Hypothesis-testing relative entropy of dynamic entanglement at a fixed input.

    Free channels are relaxed to PPT channels; this enlarges the set the inner
    minimum runs over, so the value is a lower bound on the separable one.
    Artifacts: the optimal test ``Q``, the optimal free channel ``M`` (read off
    the dual of the operator constraint) and ``psi``.
    """
    d_in, d_out, d_ref, omega = _setup(n, psi, epsilon)
    n_q = d_out * d_ref
    prog = Program(field_for(omega, psi.matrix))
    if epsilon == 0:
        # the only feasible tests are the identity on supp(omega); the projector is optimal
        q = prog.constant(support_projector(omega))
    else:
        q = prog.variable("Q", n_q)
        prog.psd(q)
        prog.psd(np.eye(n_q) - q)
        prog.nonneg(q.inner(omega) - (1.0 - epsilon))
    h = prog.variable("H", d_in)
    b = prog.variable("B", d_in * d_out)
    prog.psd(b)
    xq = q.linear(_x_map(psi.matrix, d_in, d_out, d_ref), d_in * d_out)
    k = prog.psd(h.kron_identity(right=d_out) - xq - b.ptranspose(n.dims, PPT_CUT))
    prog.minimize(h.trace() / d_in)
    sol = prog.solve(tol=tol)
    v = sol.value
    artifacts = {"Q": hermitian_part(sol[q]), "psi": psi, "M_choi": hermitian_part(sol.dual(k))}
    try:
        artifacts["M"] = BipartiteChannel.from_solver(sol.dual(k), n.dims)
    except ValueError:
        pass
    return MeasureReport("eh_fixed_input", _neg_log(v), "lower-bound-via-PPT", epsilon, sol.residuals(),
                         details={"max_min_type2": v}, artifacts=artifacts)


def eh_swapped_minimax(n: BipartiteChannel, psi: DensityOperator, epsilon: float,
                       tol: float | None = None) -> MeasureReport:
    """Same quantity with the max over ``M`` outside and the test dualized instead.

    ``max mu (1 - eps) - tr Y`` over PPT channels ``M``, ``mu >= 0`` and ``Y >= 0``
    with ``(M (x) id)(psi) - mu omega + Y`` PSD.
    """
    d_in, d_out, d_ref, omega = _setup(n, psi, epsilon)
    n_q = d_out * d_ref
    prog = Program(field_for(omega, psi.matrix))
    j = prog.variable("J", d_in * d_out)
    mu = prog.scalar("mu")
    y = prog.variable("Y", n_q)
    prog.psd(j)
    prog.psd(j.ptranspose(n.dims, PPT_CUT))
    prog.equal(j.ptrace((d_in, d_out), [0]) - np.eye(d_in) / d_in)
    prog.nonneg(mu)
    prog.psd(y)

    def out(choi):
        return apply_choi(choi, d_in, d_out, psi.matrix, d_ref)

    prog.psd(j.linear(out, n_q) - mu.times(omega) + y)
    prog.maximize(mu * (1.0 - epsilon) - y.trace())
    sol = prog.solve(tol=tol)
    return MeasureReport("eh_swapped_minimax", _neg_log(sol.value), "lower-bound-via-PPT", epsilon,
                         sol.residuals(), details={"max_min_type2": sol.value},
                         artifacts={"M": BipartiteChannel.from_solver(sol[j], n.dims)})


def _input_step(n, rep, epsilon, d_ref):
    """Best input for the current test and free channel: ``min tr(A rho)`` s.t. ``tr(B rho) >= 1 - eps``."""
    q = rep.artifacts["Q"]
    m = rep.artifacts["M_choi"]
    a = _input_operator(m, q, n.d_in, n.d_out, d_ref)
    bop = _input_operator(n.choi, q, n.d_in, n.d_out, d_ref)
    d = a.shape[0]
    prog = Program(field_for(a, bop))
    rho = prog.variable("rho", d)
    prog.psd(rho)
    prog.equal(rho.trace(), 1.0)
    prog.nonneg(rho.inner(bop) - (1.0 - epsilon))
    prog.minimize(rho.inner(a))
    sol = prog.solve(check=False)
    if sol.status != "optimal":
        return None
    r = hermitian_part(sol[rho])
    w, v = np.linalg.eigh(r)
    r = (v * np.clip(w, 0, None)) @ v.conj().T
    return r / np.trace(r).real


def eh_maximize(n: BipartiteChannel, epsilon: float, restarts: int = 3, seed=0, rounds: int = 4,
                candidates=(), tol: float | None = None) -> MeasureReport:
    """Heuristic maximum of :func:`eh_fixed_input` over inputs.

    Starts from the Choi input ``Phi (x) Phi``, any supplied ``candidates`` and
    ``restarts`` random pure inputs on ``(A0, B0, A0', B0')``, then alternates
    between the SDP at fixed input and an input update at fixed ``(Q, M)``,
    keeping a step only when it raises the value (at ``epsilon = 0`` only the
    starts are compared).  The result is a lower bound
    on the true maximum (``bound_kind = "heuristic"``).
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    _check_eps(epsilon)
    rng = np.random.default_rng(seed)
    a0, b0 = n.dims[:2]
    ref_dims = (a0, b0, a0, b0)
    starts = [("choi", choi_input(n.dims))]
    starts += [(f"candidate{i}", c) for i, c in enumerate(candidates)]
    starts += [(f"random{i}", random_pure_state(ref_dims, rng)) for i in range(restarts)]
    best, best_label, history = None, None, []
    for label, psi in starts:
        rep = eh_fixed_input(n, psi, epsilon, tol)
        d_ref = psi.dim // n.d_in
        # at epsilon = 0 the input step has no interior; restarts only
        for _ in range(rounds if epsilon > 0 else 0):
            if "M_choi" not in rep.artifacts or rep.value == math.inf:
                break
            nxt = _input_step(n, rep, epsilon, d_ref)
            if nxt is None:
                break
            try:
                cand = eh_fixed_input(n, DensityOperator(nxt, psi.dims), epsilon, tol)
            except SolverError:
                break
            if cand.value <= rep.value + 1e-9:
                break
            rep = cand
        history.append((label, rep.value))
        if best is None or rep.value > best.value:
            best, best_label = rep, label
    details = {"start": best_label, "values": {lab: v for lab, v in history}}
    return MeasureReport("eh_maximize", best.value, "heuristic", epsilon, best.residuals,
                         details=details, artifacts=best.artifacts)
