"""Closed-form robustness of bipartite unitaries from the operator Schmidt decomposition."""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from ..channels import operator_schmidt
from .report import MeasureReport

__all__ = ["nielsen_unitary_robustness", "weyl_basis", "schmidt_factors_unitary"]

_MAX_OPTIMIZED_CLUSTER = 16


def weyl_basis(d: int) -> list[np.ndarray]:
    """Discrete Weyl operators ``U_kl = sum_s exp(2 pi i s l / d) |k+s><s|``."""
    out = []
    for k in range(d):
        for l in range(d):
            u = np.zeros((d, d), dtype=complex)
            for s in range(d):
                u[(k + s) % d, s] = np.exp(2j * np.pi * s * l / d)
            out.append(u)
    return out


def _defect(ops, d) -> float:
    """Largest ``|X X^H - I/d|`` entry over the factors."""
    eye = np.eye(d) / d
    return max(np.max(np.abs(x @ x.conj().T - eye)) for x in ops)


def schmidt_factors_unitary(terms, dims, tol: float = 1e-8) -> bool:
    da, db = dims
    return _defect([a for _, a, _ in terms], da) <= tol and _defect([b for _, _, b in terms], db) <= tol


def _rotate(v, a_ops, b_ops):
    """Factors after the change of basis ``A'_k = sum_j v_kj A_j``, ``B'_k = sum_j conj(v_kj) B_j``."""
    a = np.tensordot(v, np.array(a_ops), axes=1)
    b = np.tensordot(v.conj(), np.array(b_ops), axes=1)
    return list(a), list(b)


def _weyl_rotation(a_ops, b_ops, da, db, tol):
    m = len(a_ops)
    weyl = [w / np.sqrt(da) for w in weyl_basis(da)]
    overlap = np.array([[np.vdot(a, w) for a in a_ops] for w in weyl])  # tr(A_j^H W_k)
    inside = np.flatnonzero(np.abs(np.sum(np.abs(overlap) ** 2, axis=1) - 1.0) <= 1e-9)
    if inside.size < m:
        return None
    v = overlap[inside[:m]]
    if np.max(np.abs(v @ v.conj().T - np.eye(m))) > 1e-9:
        return None
    a, b = _rotate(v, a_ops, b_ops)
    if _defect(a, da) <= tol and _defect(b, db) <= tol:
        return a, b
    return None


def _optimized_rotation(a_ops, b_ops, da, db, tol, seed=0, starts=6):
    m = len(a_ops)
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(m, 1)

    def unitary(p):
        h = np.zeros((m, m), dtype=complex)
        h[np.diag_indices(m)] = p[:m]
        k = len(iu[0])
        h[iu] = p[m:m + k] + 1j * p[m + k:]
        h = h + np.triu(h, 1).conj().T
        return expm(1j * h)

    def cost(p):
        a, b = _rotate(unitary(p), a_ops, b_ops)
        ea, eb = np.eye(da) / da, np.eye(db) / db
        return float(sum(np.sum(np.abs(x @ x.conj().T - ea) ** 2) for x in a)
                     + sum(np.sum(np.abs(x @ x.conj().T - eb) ** 2) for x in b))

    npar = m * m
    for _ in range(starts):
        res = minimize(cost, rng.normal(scale=1.0, size=npar), method="BFGS",
                       options={"gtol": 1e-14, "maxiter": 2000})
        a, b = _rotate(unitary(res.x), a_ops, b_ops)
        if _defect(a, da) <= tol and _defect(b, db) <= tol:
            return a, b
    return None


def nielsen_unitary_robustness(u, dims, tol: float = 1e-8) -> MeasureReport:
    """``(sum_j u_j)^2 / (|A||B|) - 1`` for a unitary whose Schmidt factors are scaled unitaries.

    The decomposition is unique only up to unitary mixing inside groups of
    equal coefficients, so a raw SVD may return factors that fail the
    hypothesis even when a valid decomposition exists.  Each such group is
    rotated onto the Weyl basis when possible and otherwise by numerical search
    (groups of at most 16 terms).  If no valid factors are found the report
    has status ``inapplicable`` and no value.
    """
    da, db = int(dims[0]), int(dims[1])
    terms = operator_schmidt(u, (da, db))
    coeffs = np.array([c for c, _, _ in terms])
    groups, start = [], 0
    for i in range(1, len(terms) + 1):
        if i == len(terms) or abs(coeffs[i] - coeffs[start]) > 1e-9 * coeffs[0]:
            groups.append(range(start, i))
            start = i
    methods = []
    for g in groups:
        a_ops = [terms[i][1] for i in g]
        b_ops = [terms[i][2] for i in g]
        if _defect(a_ops, da) <= tol and _defect(b_ops, db) <= tol:
            methods.append("svd")
            continue
        found = _weyl_rotation(a_ops, b_ops, da, db, tol)
        method = "weyl"
        if found is None and len(g) <= _MAX_OPTIMIZED_CLUSTER:
            found = _optimized_rotation(a_ops, b_ops, da, db, tol)
            method = "optimized"
        if found is None:
            return MeasureReport("nielsen_unitary_robustness", None, "exact", status="inapplicable",
                                 details={"coefficients": coeffs.tolist(),
                                          "reason": f"no scaled-unitary factors for a group of {len(g)} "
                                                    f"equal coefficients {coeffs[g[0]]:.6g}"})
        methods.append(method)
    value = float(coeffs.sum() ** 2 / (da * db) - 1.0)
    return MeasureReport("nielsen_unitary_robustness", max(value, 0.0), "exact",
                         details={"coefficients": coeffs.tolist(), "factor_rotation": methods})
