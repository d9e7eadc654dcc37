"""Diamond distance and max-relative entropy between channels."""
from __future__ import annotations

import math

import numpy as np

from ..linalg import hermitian_part
from ..sdp import Program
from .report import MeasureReport
from .space import field_for, space_of

__all__ = ["diamond_distance", "diamond_report", "dmax", "diamond_constraint"]


def diamond_constraint(prog, space, diff_exprs, radius: float, name: str = "Z") -> None:
    """Constrain ``1/2 ||N' - N||_diamond <= radius`` where ``diff_exprs`` are the blocks of ``J' - J``.

    Uses ``Z_i >= 0``, ``Z_i >= J'_i - J_i`` and ``sum_i tr_out Z_i <= (radius / d_in) I``.
    """
    zs = space.variables(prog, name)
    for z, d in zip(zs, diff_exprs):
        prog.psd(z)
        prog.psd(z - d)
    prog.psd(radius / space.d_in * np.eye(space.d_in) - space.marginal(zs))


def diamond_report(n, m, tol: float | None = None) -> MeasureReport:
    """``1/2 ||N - M||_diamond`` from the SDP ``d_in * min ||tr_out Z||_inf``, ``Z >= 0``, ``Z >= J_N - J_M``."""
    sp_n, sp_m = space_of(n), space_of(m)
    if not sp_n.same_as(sp_m):
        raise ValueError(f"channel dims differ: {n.dims} vs {m.dims}")
    diff = [hermitian_part(a - b) for a, b in zip(sp_n.data(n), sp_m.data(m))]
    prog = Program(field_for(*diff))
    t = prog.scalar("t")
    zs = sp_n.variables(prog, "Z")
    for z, d in zip(zs, diff):
        prog.psd(z)
        prog.psd(z - d)
    prog.psd(t.times(np.eye(sp_n.d_in)) - sp_n.marginal(zs))
    prog.minimize(t * sp_n.d_in)
    sol = prog.solve(tol=tol)
    value = min(max(sol.value, 0.0), 1.0)
    return MeasureReport("diamond_distance", value, "exact", residuals=sol.residuals(),
                         details={"raw_value": sol.value})


def diamond_distance(n, m, tol: float | None = None) -> float:
    """Half the diamond norm of ``N - M``, in ``[0, 1]``."""
    return float(diamond_report(n, m, tol).value)


def dmax(n, m, support_tol: float = 1e-10) -> float:
    """``log2`` of the least ``lam`` with ``lam J_M - J_N`` PSD; ``math.inf`` if no such ``lam``.

    Computed from the eigenvalues of ``J_M^{-1/2} J_N J_M^{-1/2}`` on the support
    of ``J_M``; when ``J_N`` has weight outside that support the value is infinite.
    """
    if n.dims != m.dims:
        raise ValueError(f"channel dims differ: {n.dims} vs {m.dims}")
    w, v = np.linalg.eigh(hermitian_part(m.choi))
    keep = w > support_tol * max(w[-1], 1.0)
    vs, ws = v[:, keep], w[keep]
    vo = v[:, ~keep]
    jn = hermitian_part(n.choi)
    if vo.shape[1] and np.max(np.abs(vo.conj().T @ jn @ vo)) > support_tol * 10:
        return math.inf
    inv_sqrt = vs / np.sqrt(ws)
    lam = float(np.linalg.eigvalsh(hermitian_part(inv_sqrt.conj().T @ jn @ inv_sqrt))[-1])
    return math.log2(max(lam, 1.0))
