"""Primal-dual interior-point solver for channel-fidelity SDPs.

Primal:  maximize   tr(X C)
         subject to X >= 0,  tr_out(X) = I_in

Dual:    minimize   tr(Y)
         subject to Z = I_out (x) Y - C >= 0

``X`` lives on out (x) in and is the Choi operator of a trace-preserving
map from the ``in`` space to the ``out`` space. Both programs are strictly
feasible from the starting point ``X0 = I / d_out``, ``Y0 = (1 + ||C||) I``,
and the dual iterate is kept exactly feasible by recomputing ``Z`` from
``Y``. Search directions are HKM directions with a Mehrotra
predictor-corrector step, computed in complex Hermitian arithmetic; the
Schur complement is assembled over an orthonormal Hermitian basis of the
``in`` space and factored densely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, TextIO

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .channel import ChoiOperator
from .linalg import as_matrix, hermitize, is_hermitian, min_eigenvalue, partial_trace

STEP_FRACTION = 0.98
MAX_ITER = 200


@dataclass(frozen=True)
class SdpProblem:
    d_out: int
    d_in: int
    cost: np.ndarray

    def __post_init__(self):
        c = as_matrix(self.cost)
        n = self.d_out * self.d_in
        if c.shape != (n, n):
            raise ValueError(f"cost of shape {c.shape} does not match d_out*d_in = {n}")
        if not is_hermitian(c, 1e-12):
            raise ValueError("cost matrix is not Hermitian")
        c = hermitize(c)
        c.setflags(write=False)
        object.__setattr__(self, "cost", c)


@dataclass(frozen=True)
class Residuals:
    tp: float
    psd: float
    dual_psd: float


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    primal: float
    dual: float
    gap: float
    mu: float
    tp: float
    step_primal: float
    step_dual: float


@dataclass(frozen=True)
class SdpSolution:
    x: ChoiOperator
    dual_y: np.ndarray
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    residuals: Residuals
    trace: tuple[IterationRecord, ...] = field(default=(), repr=False)


class SdpConvergenceError(RuntimeError):
    def __init__(self, message: str, best: SdpSolution):
        super().__init__(message)
        self.best = best


def hermitian_basis(d: int) -> sp.csc_matrix:
    """Columns are the row-major vectorizations of an orthonormal basis of
    d x d Hermitian matrices (diagonal units, then symmetric and
    antisymmetric off-diagonal pairs)."""
    rows, cols, vals = [], [], []
    k = 0
    for a in range(d):
        rows.append(a * d + a)
        cols.append(k)
        vals.append(1.0)
        k += 1
    s = 1 / math.sqrt(2)
    for a in range(d):
        for b in range(a + 1, d):
            rows += [a * d + b, b * d + a]
            cols += [k, k]
            vals += [s, s]
            k += 1
            rows += [a * d + b, b * d + a]
            cols += [k, k]
            vals += [1j * s, -1j * s]
            k += 1
    return sp.csc_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(d * d, d * d))


def _max_step(m: np.ndarray, dm: np.ndarray) -> float:
    """Largest ``a`` keeping ``m + a dm`` positive semidefinite (inf if unbounded)."""
    l = np.linalg.cholesky(m)
    li = sla.solve_triangular(l, np.eye(len(m)), lower=True)
    lam = np.linalg.eigvalsh(hermitize(li @ dm @ li.conj().T))[0]
    return math.inf if lam >= 0 else -1.0 / lam


def _herm_inv(m: np.ndarray) -> np.ndarray:
    c = sla.cho_factor(m, lower=True)
    return hermitize(sla.cho_solve(c, np.eye(len(m), dtype=complex)))


class _Solver:
    def __init__(self, p: SdpProblem):
        self.p = p
        self.do, self.di = p.d_out, p.d_in
        self.n = self.do * self.di
        self.basis = hermitian_basis(self.di)
        self.basis_h = self.basis.conj().T.tocsr()
        self.eye_out = np.eye(self.do)

    def tr_out(self, x):
        return partial_trace(x, (self.do, self.di), "first")

    def lift(self, y):
        return np.kron(self.eye_out, y)

    def schur(self, x, zi):
        do, di = self.do, self.di
        xr = x.reshape(do, di, do, di)
        zr = zi.reshape(do, di, do, di)
        lm = np.einsum("oapc,pdob->abcd", xr, zr, optimize=True).reshape(di * di, di * di)
        m = np.asarray(self.basis_h @ np.asarray(lm @ self.basis)).real
        return (m + m.T) / 2

    def to_coords(self, h):
        return (self.basis_h @ h.reshape(-1)).real

    def from_coords(self, v):
        return hermitize((self.basis @ v).reshape(self.di, self.di))


def solve(
    p: SdpProblem,
    tol: float = 1e-9,
    max_iter: int = MAX_ITER,
    trace_stream: Optional[TextIO] = None,
) -> SdpSolution:
    """Solve the channel-fidelity SDP to relative duality gap ``tol``.

    Raises :class:`SdpConvergenceError` (carrying the best iterate) if the
    iteration cap is hit first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = _Solver(p)
    c = p.cost
    n, do, di = s.n, s.do, s.di
    eye_in = np.eye(di)

    x = np.eye(n, dtype=complex) / do
    y = (1.0 + np.linalg.norm(c, 2)) * np.eye(di, dtype=complex)
    z = hermitize(s.lift(y) - c)

    records = []
    if trace_stream is not None:
        trace_stream.write("iter primal dual gap mu tp_res step_p step_d\n")

    def snapshot(it):
        pv = float(np.real(np.vdot(c, x)))
        dv = float(np.trace(y).real)
        tp = float(np.max(np.abs(s.tr_out(x) - eye_in)))
        return pv, dv, tp

    converged = False
    it = 0
    ap = ad = 0.0
    while True:
        pv, dv, tp = snapshot(it)
        gap = dv - pv
        mu = float(np.real(np.vdot(x, z))) / n
        rec = IterationRecord(it, pv, dv, gap, mu, tp, ap, ad)
        records.append(rec)
        if trace_stream is not None:
            trace_stream.write(
                f"{it} {pv:.17g} {dv:.17g} {gap:.6e} {mu:.6e} {tp:.3e} {ap:.4f} {ad:.4f}\n"
            )
        if gap <= tol * max(1.0, abs(pv)) and tp <= 1e-10:
            converged = True
            break
        if it >= max_iter:
            break
        it += 1

        zi = _herm_inv(z)
        rp = eye_in - s.tr_out(x)
        m = s.schur(x, zi)
        try:
            fac = sla.cho_factor(m, lower=True)
            lin = lambda v: sla.cho_solve(fac, v)  # noqa: E731
        except np.linalg.LinAlgError:
            lu = sla.lu_factor(m)
            lin = lambda v: sla.lu_solve(lu, v)  # noqa: E731

        def direction(target_mu, corr):
            g = target_mu * zi - x
            if corr is not None:
                g = g - corr
            rhs = s.tr_out(hermitize(g)) - rp
            dy = s.from_coords(lin(s.to_coords(rhs)))
            dz = s.lift(dy)
            dx = hermitize(g - x @ dz @ zi)
            return dx, dy, dz

        # predictor
        dxp, dyp, dzp = direction(0.0, None)
        ap_aff = min(1.0, _max_step(x, dxp))
        ad_aff = min(1.0, _max_step(z, dzp))
        mu_aff = float(np.real(np.vdot(x + ap_aff * dxp, z + ad_aff * dzp))) / n
        sigma = min(1.0, (max(mu_aff, 0.0) / mu) ** 3)

        # corrector
        dx, dy, dz = direction(sigma * mu, dxp @ dzp @ zi)
        ap = min(1.0, STEP_FRACTION * _max_step(x, dx))
        ad = min(1.0, STEP_FRACTION * _max_step(z, dz))

        x = hermitize(x + ap * dx)
        y = hermitize(y + ad * dy)
        z = hermitize(s.lift(y) - c)

    pv, dv, tp = snapshot(it)
    choi = ChoiOperator(x, dim_in=di, dim_out=do)
    sol = SdpSolution(
        x=choi,
        dual_y=y,
        primal_value=pv,
        dual_value=dv,
        gap=dv - pv,
        iterations=it,
        residuals=Residuals(tp=tp, psd=min_eigenvalue(x), dual_psd=min_eigenvalue(z)),
        trace=tuple(records),
    )
    if not converged:
        raise SdpConvergenceError(
            f"no convergence after {it} iterations (gap {sol.gap:.3e}, tp {tp:.3e})", sol
        )
    return sol


def certificate_ok(sol: SdpSolution) -> bool:
    """Acceptance-level certificate check on a returned solution."""
    return (
        sol.gap <= 1e-6 * (1 + abs(sol.primal_value))
        and sol.gap >= -1e-9
        and sol.residuals.tp <= 1e-8
        and sol.residuals.psd >= -1e-9
        and sol.residuals.dual_psd >= -1e-8
    )
