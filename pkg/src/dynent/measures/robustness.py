"""Standard and generalized robustness of bipartite channels, plus log and smoothed variants.

Separable channels are replaced by channels with PPT Choi matrices.  Every
quantity here is a minimization over free channels, so enlarging the free set
can only lower it: reported values are lower bounds on the separable-channel
quantities (``bound_kind = "lower-bound-via-PPT"``).

All variants share one program::

    minimize   t
    subject to Y PPT,  Y - N' PSD,  tr_out Y = t I / d_in
               (standard kind only) Y - N' PPT
               N' = N, or N' a channel in a ball around N

so that ``Y / t`` is the free channel ``L`` and, when ``t > 1``,
``(Y - N') / (t - 1)`` is the mixing channel ``M`` in ``N' + (t-1) M = t L``.
Robustness is ``t - 1`` and log-robustness ``log2 t``.
"""
from __future__ import annotations

import math

import numpy as np

from ..channels import apply_choi
from ..linalg import DensityOperator
from ..sdp import Program
from .distance import diamond_constraint
from .report import MeasureReport
from .space import field_for, space_of

__all__ = [
    "generalized_robustness", "standard_robustness", "log_robustness", "smoothed_log_robustness",
    "liberal_smoothed_log_robustness", "robustness_program",
]

_KINDS = ("standard", "generalized")


def robustness_program(n, kind: str = "generalized", epsilon: float = 0.0, phi=None):
    """Build the shared program; returns ``(prog, t, ns, ys, space)``.

    :param epsilon: diamond-ball radius (or liberal-ball radius when ``phi`` is given).
    :param phi: input state on ``(A0, B0, R...)`` defining a liberal ball.
    """
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}, got {kind!r}")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    space = space_of(n)
    data = space.data(n)
    consts = list(data)
    if phi is not None:
        if not isinstance(phi, DensityOperator):
            raise TypeError("phi must be a DensityOperator")
        if space.nblocks != 1:
            raise TypeError("liberal smoothing is only available for plain channels")
        if tuple(phi.dims[:2]) != n.dims[:2]:
            raise ValueError(f"phi dims {phi.dims} do not start with the channel inputs {n.dims[:2]}")
        consts.append(phi.matrix)
    prog = Program(field_for(*consts))
    t = prog.scalar("t")
    d_in = space.d_in
    if epsilon > 0 or phi is not None:
        ns = space.variables(prog, "N")
        for x in ns:
            prog.psd(x)
        prog.equal(space.marginal(ns) - np.eye(d_in) / d_in)
        if phi is None:
            diamond_constraint(prog, space, [x - j for x, j in zip(ns, data)], epsilon)
        else:
            _liberal_constraint(prog, space, ns[0], data[0], phi, epsilon)
    else:
        ns = [prog.constant(j) for j in data]
    ys = space.variables(prog, "Y")
    space.ppt(prog, ys)
    for y, x in zip(ys, ns):
        prog.psd(y - x)
    if kind == "standard":
        space.ppt(prog, [y - x for y, x in zip(ys, ns)])
    prog.equal(space.marginal(ys) - t.times(np.eye(d_in) / d_in))
    prog.minimize(t)
    return prog, t, ns, ys, space


def _liberal_constraint(prog, space, x, j, phi, epsilon):
    d_ref = phi.dim // space.d_in
    n_out = space.d_out * d_ref
    rho = phi.matrix

    def out(choi):
        return apply_choi(choi, space.d_in, space.d_out, rho, d_ref)

    diff = x.linear(out, n_out) - out(j)
    if epsilon == 0:
        prog.equal(diff)
        return
    pos, neg = prog.variable("P", n_out), prog.variable("Q", n_out)
    prog.psd(pos)
    prog.psd(neg)
    prog.equal(pos - neg - diff)
    prog.nonneg(2.0 * epsilon - pos.trace() - neg.trace())


def _solve(n, kind, epsilon=0.0, phi=None, tol=None, max_iter=None, name=None, log=False, extra=None):
    prog, t, ns, ys, space = robustness_program(n, kind, epsilon, phi)
    if extra is not None:
        extra(prog, t, ns, ys, space)
    sol = prog.solve(tol=tol, max_iter=max_iter)
    tv = max(float(np.real(sol[t][0, 0])), 1.0)
    yv = [sol[y] for y in ys]
    nv = [sol[x] for x in ns]
    artifacts = {"t": tv, "Y": yv, "smoothed_blocks": nv, "space": space}
    artifacts["free"] = space.channel([y / tv for y in yv])
    if epsilon > 0 or phi is not None:
        artifacts["smoothed"] = space.channel(nv)
    if tv - 1.0 > 1e-9:
        artifacts["mix"] = space.channel([(y - x) / (tv - 1.0) for y, x in zip(yv, nv)])
    value = math.log2(tv) if log else tv - 1.0
    return MeasureReport(name, value, "lower-bound-via-PPT", epsilon, sol.residuals(),
                         details={"kind": kind, "t": float(sol.value)}, artifacts=artifacts)


def generalized_robustness(n, tol: float | None = None, max_iter: int | None = None) -> MeasureReport:
    """Least ``s >= 0`` with ``(N + s M) / (1 + s)`` free for some channel ``M``."""
    return _solve(n, "generalized", tol=tol, max_iter=max_iter, name="generalized_robustness")


def standard_robustness(n, tol: float | None = None, max_iter: int | None = None) -> MeasureReport:
    """Least ``s >= 0`` with ``(N + s M) / (1 + s)`` free for some free channel ``M``."""
    return _solve(n, "standard", tol=tol, max_iter=max_iter, name="standard_robustness")


def log_robustness(n, kind: str = "generalized", tol: float | None = None) -> float:
    """``log2(1 + R)``."""
    return float(_solve(n, kind, tol=tol, name=f"log_robustness[{kind}]", log=True).value)


def smoothed_log_robustness(n, epsilon: float, kind: str = "generalized",
                            tol: float | None = None, max_iter: int | None = None) -> MeasureReport:
    """Least log-robustness over channels within half-diamond distance ``epsilon`` of ``N``.

    At ``epsilon = 0`` the ball is the single point ``N`` and the unsmoothed
    program is solved instead (the smoothed one has no interior there).
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    return _solve(n, kind, epsilon, tol=tol, max_iter=max_iter,
                  name=f"smoothed_log_robustness[{kind}]", log=True)


def liberal_smoothed_log_robustness(n, phi: DensityOperator, epsilon: float, kind: str = "generalized",
                                    tol: float | None = None,
                                    max_iter: int | None = None) -> MeasureReport:
    """Least log-robustness over channels ``N'`` with ``1/2 ||(N' - N) (x) id (phi)||_1 <= epsilon``."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    return _solve(n, kind, epsilon, phi=phi, tol=tol, max_iter=max_iter,
                  name=f"liberal_smoothed_log_robustness[{kind}]", log=True)
