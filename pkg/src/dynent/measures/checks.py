"""Numerical checks of standard inequalities between channel distances and state overlaps."""
from __future__ import annotations

import numpy as np

from ..channels import apply_choi, isotropic_state, maximally_entangled, random_channel
from ..linalg import (fidelity, hermitian_part, min_eigenvalue, partial_transpose, random_pure_state,
                      trace_norm)
from ..sdp import Program
from .distance import diamond_distance
from .hypothesis import choi_input
from .report import MeasureReport

__all__ = [
    "diamond_choi_sandwich_check", "fidelity_diamond_transfer_check", "isotropic_threshold",
    "mes_overlap_ppt", "mes_overlap_sampled", "inequality_suite",
]

_SLACK = 1e-8


def fidelity_diamond_transfer_check(n, m, samples: int = 10, seed=0, diamond: float | None = None) -> dict:
    """Check both fidelity/diamond transfer inequalities on one pair.

    (a) With ``eps = 1/2 ||N - M||_diamond``: ``F(N (x) id (psi), M (x) id (psi)) >= (1 - eps)^2``
        for the Choi input and ``samples`` random pure inputs.
    (b) With ``eps = 1 - F(J_N, J_M)``: ``1/2 ||N - M||_diamond <= |A0||B0| sqrt(eps)``.

    Fidelity is the squared one, ``F = (tr |sqrt(rho) sqrt(sigma)|)^2``.
    :return: dict with both slacks (negative means violated) and ``worst_slack``.
    """
    if n.dims != m.dims:
        raise ValueError(f"channel dims differ: {n.dims} vs {m.dims}")
    rng = np.random.default_rng(seed)
    dd = diamond_distance(n, m) if diamond is None else diamond
    a0, b0 = n.dims[:2]
    inputs = [choi_input(n.dims)] + [random_pure_state((a0, b0, a0, b0), rng) for _ in range(samples)]
    worst_a = np.inf
    for psi in inputs:
        d_ref = psi.dim // n.d_in
        rn = hermitian_part(apply_choi(n.choi, n.d_in, n.d_out, psi.matrix, d_ref))
        rm = hermitian_part(apply_choi(m.choi, m.d_in, m.d_out, psi.matrix, d_ref))
        worst_a = min(worst_a, fidelity(rn, rm) - (1.0 - dd) ** 2)
    eps_j = max(0.0, 1.0 - fidelity(n.choi, m.choi))
    slack_b = n.d_in * np.sqrt(eps_j) - dd
    worst = min(worst_a, slack_b)
    return {"diamond": dd, "slack_output_fidelity": float(worst_a), "slack_choi_fidelity": float(slack_b),
            "worst_slack": float(worst), "violated": bool(worst < -_SLACK)}


def diamond_choi_sandwich_check(n, m, diamond: float | None = None) -> dict:
    """``||N - M||_diamond / d_in <= ||J_N - J_M||_1 <= ||N - M||_diamond`` (normalized Choi matrices)."""
    if n.dims != m.dims:
        raise ValueError(f"channel dims differ: {n.dims} vs {m.dims}")
    dd = 2.0 * (diamond_distance(n, m) if diamond is None else diamond)
    tn = trace_norm(n.choi - m.choi)
    lower, upper = tn - dd / n.d_in, dd - tn
    worst = min(lower, upper)
    return {"diamond_norm": dd, "choi_trace_norm": tn, "slack_lower": float(lower),
            "slack_upper": float(upper), "worst_slack": float(worst), "violated": bool(worst < -_SLACK)}


def inequality_suite(pairs: int = 100, seed=0, dims=(2, 2, 2, 2), samples: int = 3) -> dict:
    """Run both checks on ``pairs`` random channel pairs; count violations beyond ``1e-8``."""
    rng = np.random.default_rng(seed)
    worst_t, worst_s, violations = np.inf, np.inf, 0
    for _ in range(pairs):
        n = random_channel(dims, rng)
        m = random_channel(dims, rng)
        dd = diamond_distance(n, m)
        t = fidelity_diamond_transfer_check(n, m, samples, rng, diamond=dd)
        s = diamond_choi_sandwich_check(n, m, diamond=dd)
        worst_t = min(worst_t, t["worst_slack"])
        worst_s = min(worst_s, s["worst_slack"])
        violations += int(t["violated"]) + int(s["violated"])
    return {"pairs": pairs, "seed": seed if isinstance(seed, int) else None,
            "worst_transfer_slack": float(worst_t), "worst_sandwich_slack": float(worst_s),
            "violations": violations}


def mes_overlap_ppt(k: int, tol: float | None = None) -> MeasureReport:
    """``max tr(Phi^k sigma)`` over PPT states ``sigma`` on ``k x k`` (an upper bound for separable states)."""
    phi = maximally_entangled(k).matrix
    prog = Program("real")
    s = prog.variable("sigma", k * k)
    prog.psd(s)
    prog.psd(s.ptranspose((k, k), [1]))
    prog.equal(s.trace(), 1.0)
    prog.maximize(s.inner(phi))
    sol = prog.solve(tol=tol)
    return MeasureReport("mes_overlap_ppt", float(sol.value), "exact", residuals=sol.residuals(),
                         details={"k": k, "closed_form": 1.0 / k})


def mes_overlap_sampled(k: int, samples: int = 200, seed=0) -> float:
    """Largest ``tr(Phi^k sigma)`` over random separable states (mixtures of random product states)."""
    rng = np.random.default_rng(seed)
    phi = maximally_entangled(k).matrix
    best = 0.0
    for _ in range(samples):
        terms = int(rng.integers(1, 4))
        w = rng.dirichlet(np.ones(terms))
        sigma = sum(wi * np.kron(random_pure_state((k,), rng).matrix, random_pure_state((k,), rng).matrix)
                    for wi in w)
        best = max(best, float(np.real(np.vdot(phi, sigma))))
    return best


def isotropic_threshold(k: int, tol: float = 1e-9) -> float:
    """Bisect for the weight ``p`` where the isotropic state stops being PPT."""
    def lam(p):
        return min_eigenvalue(partial_transpose(isotropic_state(k, p).matrix, (k, k), [1]))

    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if lam(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
