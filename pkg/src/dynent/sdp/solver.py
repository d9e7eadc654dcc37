"""Primal-dual interior-point method for semidefinite cone programs.

Solves ::

    minimize    c'x
    subject to  G x + s = h,   A x = b,   s in S_1 x ... x S_m

where each ``S_i`` is the cone of PSD Hermitian (or real symmetric) matrices
and ``s`` is written in the orthonormal coordinates of :mod:`.hvec`.  The dual
problem is ::

    maximize    -h'z - b'y
    subject to  G'z + A'y + c = 0,   z in S_1 x ... x S_m.

The iteration follows the homogeneous self-dual embedding with Nesterov-Todd
scaling and a Mehrotra predictor-corrector, in the style of CVXOPT's conelp.
Complex blocks are handled natively, which is the same as working on their
real symmetric embedding restricted to its structured subspace.
"""
from __future__ import annotations

import dataclasses
import logging

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from . import hvec

log = logging.getLogger(__name__)

_STALL = 10

STATUSES = ("optimal", "infeasible", "unbounded", "max-iterations")


@dataclasses.dataclass
class ConeProblem:
    """Data of a cone program in the form documented in the module docstring.

    :param c: objective vector, length ``n``.
    :param G: one sparse matrix per cone block, shape ``(basis size, n)``.
    :param h: one offset vector per cone block.
    :param A: equality matrix ``(p, n)``.
    :param b: equality right-hand side.
    :param dims: matrix order of each cone block.
    :param field: ``"real"`` or ``"complex"``.
    """

    c: np.ndarray
    G: list
    h: list
    A: sp.csr_matrix
    b: np.ndarray
    dims: list
    field: str = "complex"

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        n = self.c.size
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.A = sp.csr_matrix(self.A, shape=(self.b.size, n), dtype=float)
        self.G = [sp.csr_matrix(g, dtype=float) for g in self.G]
        self.h = [np.asarray(v, dtype=float).ravel() for v in self.h]
        if not (len(self.G) == len(self.h) == len(self.dims)):
            raise ValueError("G, h and dims must have one entry per cone block")
        self.bases = [hvec.basis(int(d), self.field) for d in self.dims]
        for g, v, bs in zip(self.G, self.h, self.bases):
            if g.shape != (bs.size, n) or v.size != bs.size:
                raise ValueError("cone block data has inconsistent shape")
        for arr in [self.c, self.b] + self.h:
            if not np.all(np.isfinite(arr)):
                raise ValueError("problem data has non-finite entries")

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def degree(self) -> int:
        return int(sum(self.dims))


@dataclasses.dataclass
class ConeResult:
    """Outcome of :func:`solve_cone`.

    ``x, s, y, z`` are the (de-homogenized) primal and dual iterates; for an
    infeasibility certificate they are the unnormalized ray instead.
    """

    status: str
    x: np.ndarray
    s: list
    y: np.ndarray
    z: list
    primal_objective: float
    dual_objective: float
    primal_residual: float
    dual_residual: float
    gap: float
    iterations: int


# -- block helpers ------------------------------------------------------
def _inner(u: list, v: list) -> float:
    return float(sum(np.real(np.vdot(a, b)) for a, b in zip(u, v)))


def _herm(m):
    return 0.5 * (m + m.conj().T)


def _factor_psd(m: np.ndarray) -> np.ndarray:
    """Lower factor ``L`` with ``L L^H = m`` for a positive definite ``m``."""
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(m)
        w = np.maximum(w, np.max(np.abs(w)) * 1e-15 + 1e-300)
        q, r = np.linalg.qr((v * np.sqrt(w)).conj().T)
        return r.conj().T


def _max_step(lam: np.ndarray, d: np.ndarray) -> float:
    """Largest ``a`` with ``diag(lam) + a d`` PSD (``inf`` if unbounded)."""
    rs = 1.0 / np.sqrt(lam)
    m = _herm(d * np.outer(rs, rs))
    w = np.linalg.eigvalsh(m)[0]
    return np.inf if w >= 0 else -1.0 / w


class _Scaling:
    """Nesterov-Todd scaling point of a single block pair ``(s, z)``."""

    def __init__(self, s: np.ndarray, z: np.ndarray):
        ls = _factor_psd(s)
        lz = _factor_psd(z)
        u, sig, vh = np.linalg.svd(lz.conj().T @ ls)
        v = vh.conj().T
        isq = 1.0 / np.sqrt(sig)
        self.lam = sig
        self.r = (ls @ v) * isq
        # R^{-1} = diag(sqrt(sig)) V^H L_s^{-1}
        self.rinv = (np.sqrt(sig)[:, None] * vh) @ sla.solve_triangular(ls, np.eye(ls.shape[0]), lower=True)
        self.w = self.r @ self.r.conj().T
        self.winv = self.rinv.conj().T @ self.rinv

    def scale_s(self, ds):
        return self.rinv @ ds @ self.rinv.conj().T

    def scale_z(self, dz):
        return self.r.conj().T @ dz @ self.r


class _Kkt:
    """Factorization of the reduced Newton system for fixed scalings."""

    def __init__(self, prob: ConeProblem, winv: list):
        self.prob = prob
        self.winv = winv
        n = prob.n
        H = np.zeros((n, n))
        for g, bs, wi in zip(prob.G, prob.bases, winv):
            if g.nnz == 0:
                continue
            kb = bs.congruence_matrix(wi)
            gt_k = (g.T @ kb)                      # n x m, dense
            H += np.asarray((g.T @ gt_k.T).T)     # G' K G (K symmetric)
            del kb, gt_k
        self.H = 0.5 * (H + H.T)
        A = prob.A
        self.Ad = A.toarray() if A.shape[0] else np.zeros((0, n))
        self.regularized = False
        self.chol = self._cholesky(self.H)
        if self.chol is None and self.Ad.shape[0]:
            self.regularized = True
            self.chol = self._cholesky(self.H + self.Ad.T @ self.Ad)
        if self.chol is None:
            base = self.H + (self.Ad.T @ self.Ad if self.regularized else 0)
            eps = 1e-13 * max(1.0, float(np.max(np.diag(base))))
            self.chol = self._cholesky(base + eps * np.eye(n))
            if self.chol is None:
                raise np.linalg.LinAlgError("Newton system is singular")
        if self.Ad.shape[0]:
            hinv_at = sla.cho_solve(self.chol, self.Ad.T)
            S = self.Ad @ hinv_at
            self.hinv_at = hinv_at
            self.schur = sla.lu_factor(0.5 * (S + S.T))

    @staticmethod
    def _cholesky(m):
        try:
            return sla.cho_factor(m, lower=True, check_finite=False)
        except (np.linalg.LinAlgError, sla.LinAlgError):
            return None

    def _solve_xy(self, r1, r2):
        if self.regularized:
            r1 = r1 + self.Ad.T @ r2
        if self.Ad.shape[0] == 0:
            return sla.cho_solve(self.chol, r1), np.zeros(0)
        hr = sla.cho_solve(self.chol, r1)
        dy = sla.lu_solve(self.schur, self.Ad @ hr - r2)
        dx = hr - self.hinv_at @ dy
        return dx, dy

    def _apply(self, dx, dy, dz, w):
        """Left-hand side of the Newton equations for a candidate solution."""
        p = self.prob
        rx = p.A.T @ dy + sum((g.T @ bs.vec(m) for g, bs, m in zip(p.G, p.bases, dz)), np.zeros(p.n))
        ry = p.A @ dx
        rz = [bs.mat(g @ dx) - wi @ m @ wi for g, bs, m, wi in zip(p.G, p.bases, dz, w)]
        return rx, ry, rz

    def solve_once(self, bx, by, bz):
        p = self.prob
        r1 = bx.copy()
        for g, bs, m, wi in zip(p.G, p.bases, bz, self.winv):
            r1 += g.T @ bs.vec(wi @ m @ wi)
        dx, dy = self._solve_xy(r1, by)
        dz = [_herm(wi @ (bs.mat(g @ dx) - m) @ wi) for g, bs, m, wi in zip(p.G, p.bases, bz, self.winv)]
        return dx, dy, dz

    def solve(self, bx, by, bz, w, refine: int = 1):
        """Solve ``A'dy + G'dz = bx``, ``A dx = by``, ``G dx - W dz W = bz``."""
        dx, dy, dz = self.solve_once(bx, by, bz)
        for _ in range(refine):
            rx, ry, rz = self._apply(dx, dy, dz, w)
            ex, ey, ez = self.solve_once(bx - rx, by - ry, [a - b for a, b in zip(bz, rz)])
            dx, dy = dx + ex, dy + ey
            dz = [a + b for a, b in zip(dz, ez)]
        return dx, dy, dz


def solve_cone(prob: ConeProblem, tol: float = 1e-7, max_iter: int = 200,
               step: float = 0.99, refine: int = 3) -> ConeResult:
    """Run the interior-point method; see the module docstring for the problem form."""
    p = prob
    n, m = p.n, len(p.dims)
    bases = p.bases
    G, A, b, c = p.G, p.A, p.b, p.c
    hm = [bs.mat(v) for bs, v in zip(bases, p.h)]
    eye = [np.eye(d) for d in p.dims]
    resx0 = max(1.0, float(np.linalg.norm(c)))
    resz0 = max(1.0, float(np.sqrt(np.linalg.norm(b) ** 2 + sum(np.linalg.norm(v) ** 2 for v in p.h))))

    def gx(x):
        return [bs.mat(g @ x) for g, bs in zip(G, bases)]

    def gtz(z):
        out = np.zeros(n)
        for g, bs, zz in zip(G, bases, z):
            out += g.T @ bs.vec(zz)
        return out

    def hz(z):
        return _inner(hm, z)

    # starting point: least-squares primal and minimum-norm dual
    kkt = _Kkt(p, eye)
    x, _, zz = kkt.solve(np.zeros(n), b, hm, eye)
    s = [-a for a in zz]
    _, y, z = kkt.solve(-c, np.zeros(b.size), [np.zeros_like(a) for a in hm], eye)
    for blocks in (s, z):
        lmin = min(np.linalg.eigvalsh(_herm(a))[0] for a in blocks) if m else 1.0
        nrm = np.sqrt(_inner(blocks, blocks))
        if lmin <= 1e-8 * max(nrm, 1.0):
            shift = 1.0 - lmin
            for i in range(m):
                blocks[i] = _herm(blocks[i]) + shift * eye[i]
    tau, kappa = 1.0, 1.0

    best, best_it = None, 0
    status = "max-iterations"
    it = 0
    for it in range(max_iter + 1):
        # residuals of the homogeneous system
        rx = A.T @ y + gtz(z) + c * tau
        ry = A @ x - b * tau
        gxv = gx(x)
        rz = [a + bb - hh * tau for a, bb, hh in zip(gxv, s, hm)]
        cx, by_, hz_ = float(c @ x), float(b @ y), hz(z)
        rt = kappa + cx + by_ + hz_
        sz = _inner(s, z)
        mu = (sz + tau * kappa) / (p.degree + 1)

        nrx = np.linalg.norm(rx)
        nrz = np.sqrt(np.linalg.norm(ry) ** 2 + _inner(rz, rz))
        pcost = cx / tau
        dcost = -(by_ + hz_) / tau
        pres = nrz / (tau * resz0)
        dres = nrx / (tau * resx0)
        gap = sz / tau ** 2
        scale = max(1.0, abs(pcost))
        relgap = abs(pcost - dcost) / scale
        merit = max(pres, dres, relgap, gap / scale)
        if best is None or merit < best[0]:
            best = (merit, x / tau, [a / tau for a in s], y / tau, [a / tau for a in z],
                    pcost, dcost, pres, dres, gap)
            best_it = it
        log.debug("it %d pcost %.8e dcost %.8e pres %.2e dres %.2e gap %.2e tau %.2e kappa %.2e",
                  it, pcost, dcost, pres, dres, gap, tau, kappa)
        if pres <= tol and dres <= tol and relgap <= tol and gap <= tol * scale:
            status = "optimal"
            break
        # infeasibility certificates
        if by_ + hz_ < 0:
            pinf = np.linalg.norm(A.T @ y + gtz(z)) / resx0 / (-(by_ + hz_))
            if pinf <= tol:
                status = "infeasible"
                break
        if cx < 0:
            dinf = np.sqrt(np.linalg.norm(A @ x) ** 2 + _inner(*(2 * [[a + bb for a, bb in zip(gxv, s)]]))) \
                / resz0 / (-cx)
            if dinf <= tol:
                status = "unbounded"
                break
        if it == max_iter:
            break
        if it - best_it >= _STALL:
            log.debug("no progress since iteration %d", best_it)
            break

        try:
            scal = [_Scaling(_herm(a), _herm(bb)) for a, bb in zip(s, z)]
            kkt = _Kkt(p, [sc.winv for sc in scal])
        except np.linalg.LinAlgError:
            log.debug("factorization failed at iteration %d", it)
            break
        w = [sc.w for sc in scal]
        x1, y1, z1 = kkt.solve(-c, b, hm, w, refine)
        den = float(c @ x1 + b @ y1 + hz(z1)) - kappa / tau

        def direction(sig, eta, corr=None):
            # complementarity right-hand side in scaled coordinates
            u = []
            for i, sc in enumerate(scal):
                lam = sc.lam
                rhs = -np.diag(lam * lam)
                if corr is not None:
                    ds_a, dz_a = corr[0][i], corr[1][i]
                    rhs = rhs - 0.5 * (ds_a @ dz_a + dz_a @ ds_a) + sig * mu * np.eye(lam.size)
                u.append(2.0 * rhs / np.add.outer(lam, lam))
            rk = -tau * kappa + (sig * mu - corr[2] if corr is not None else 0.0)
            ru = [sc.r @ uu @ sc.r.conj().T for sc, uu in zip(scal, u)]
            x0, y0, z0 = kkt.solve(-eta * rx, -eta * ry, [-eta * a - bb for a, bb in zip(rz, ru)], w, refine)
            num = -eta * rt - rk / tau - float(c @ x0 + b @ y0 + hz(z0))
            dtau = num / den
            dx = x0 + dtau * x1
            dy = y0 + dtau * y1
            dz = [_herm(a + dtau * bb) for a, bb in zip(z0, z1)]
            ds = [_herm(r - wi @ d @ wi) for r, wi, d in zip(ru, w, dz)]
            dkappa = (rk - kappa * dtau) / tau
            return dx, dy, dz, ds, dtau, dkappa

        def max_alpha(ds, dz, dtau, dkappa):
            a = np.inf
            sds, sdz = [], []
            for sc, d1, d2 in zip(scal, ds, dz):
                u1, u2 = sc.scale_s(d1), sc.scale_z(d2)
                sds.append(u1)
                sdz.append(u2)
                a = min(a, _max_step(sc.lam, u1), _max_step(sc.lam, u2))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkappa < 0:
                a = min(a, -kappa / dkappa)
            return a, sds, sdz

        dx, dy, dz, ds, dtau, dkappa = direction(0.0, 1.0)
        a_aff, sds, sdz = max_alpha(ds, dz, dtau, dkappa)
        a_aff = min(1.0, a_aff)
        sigma = (1.0 - a_aff) ** 3
        dx, dy, dz, ds, dtau, dkappa = direction(sigma, 1.0 - sigma, (sds, sdz, dtau * dkappa))
        a_max, _, _ = max_alpha(ds, dz, dtau, dkappa)
        alpha = min(1.0, step * a_max)

        x = x + alpha * dx
        y = y + alpha * dy
        s = [_herm(a + alpha * d) for a, d in zip(s, ds)]
        z = [_herm(a + alpha * d) for a, d in zip(z, dz)]
        tau += alpha * dtau
        kappa += alpha * dkappa
        # keep the iterate on the scale where tau is of order one
        if tau > 1e6 or tau < 1e-6 and kappa < 1e-6:
            nrm = max(tau, kappa)
            x, y, tau, kappa = x / nrm, y / nrm, tau / nrm, kappa / nrm
            s = [a / nrm for a in s]
            z = [a / nrm for a in z]

    if status in ("infeasible", "unbounded"):
        return ConeResult(status, x, s, y, z, float(c @ x), -(float(b @ y) + hz(z)),
                          pres, dres, gap, it)
    if status == "optimal":
        return ConeResult(status, x / tau, [a / tau for a in s], y / tau, [a / tau for a in z],
                          pcost, dcost, pres, dres, gap, it)
    _, bx_, bs_, by__, bz_, bp, bd, bpr, bdr, bg = best
    return ConeResult("max-iterations", bx_, bs_, by__, bz_, bp, bd, bpr, bdr, bg, it)
