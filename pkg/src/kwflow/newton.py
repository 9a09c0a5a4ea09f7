"""Damped Newton oracle for the level problems.

Solves laplacian_k(f) - boundary_potential*f + h*e^f - g = 0 on one level by
Newton's method with residual-norm damping.  Requires h <= 0: the Jacobian

    J = laplacian_k - boundary_potential*I + diag(h e^f)

is then symmetric negative definite in the mu-weighted inner product whenever
the level has a nonempty boundary (or h < 0 somewhere), so the Newton systems
are solved through the SPD form S = -diag(mu) J.  This solver exists to
cross-check the flow; the two must agree on every level they both converge
on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg, splu

from .errors import HypothesisError, NonConvergenceError, SolverBreakdownError
from .graphs import Level, VertexFunction, vertex_key

#: above this many unknowns the Newton systems switch from a direct sparse
#: factorization to conjugate gradients
DIRECT_LIMIT = 5000


@dataclass
class NewtonReport:
    """Outcome of a damped Newton solve on one level."""

    converged: bool
    iterations: int
    final_residual: float
    final_residual_mu: float
    damping_history: list
    f: VertexFunction
    unknowns: int
    method: str

    def as_dict(self) -> dict:
        """JSON-safe summary (the solution itself lives on the LevelSolution)."""
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "final_residual": float(self.final_residual),
            "final_residual_mu": float(self.final_residual_mu),
            "damping_history": [float(a) for a in self.damping_history],
            "unknowns": self.unknowns,
            "method": self.method,
        }


def assemble(level: Level, f: np.ndarray, g: np.ndarray, h: np.ndarray):
    """Residual vector and Jacobian (sparse CSR, plain coordinates) at f.

    The returned matrix J satisfies <J u, v>_mu = <u, J v>_mu; the SPD matrix
    used for the linear solves is -diag(mu) @ J.
    """
    _check_h(level, h)
    he = h * np.exp(f)
    r = level.laplacian_matvec(f) - level.boundary_potential * f + he - g
    n = len(level)
    ii, jj, ww = level.internal_edges
    # diagonal: -(full weighted degree)/mu + h e^f  (the level-internal part
    # plus the boundary potential recombine into the full weighted degree)
    diag = -level.weighted_degree / level.mu + he
    rows = np.concatenate([ii, jj, np.arange(n)])
    cols = np.concatenate([jj, ii, np.arange(n)])
    vals = np.concatenate([ww / level.mu[ii], ww / level.mu[jj], diag])
    J = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    return r, J


def _check_h(level: Level, h: np.ndarray):
    bad = np.flatnonzero(h > 0.0)
    if len(bad):
        v = level.vertices[int(bad[0])]
        raise HypothesisError(
            f"h({vertex_key(v)}) = {h[bad[0]]:.6g} > 0: the Newton Jacobian "
            "loses definiteness; use the flow-only mode for sign-changing h"
        )


def _spd_solve(level: Level, J: sp.csr_matrix, b: np.ndarray, method: str) -> np.ndarray:
    S = -sp.diags(level.mu) @ J
    if method == "direct":
        try:
            return splu(S.tocsc()).solve(b)
        except RuntimeError as exc:  # singular factorization
            raise SolverBreakdownError(f"direct solve failed: {exc}") from exc
    x, info = cg(S, b, rtol=1e-12, atol=0.0, maxiter=20 * len(b) + 100)
    if info != 0:
        raise SolverBreakdownError(f"conjugate gradients failed to converge (info={info})")
    return x


def newton_solve(
    level: Level,
    g: VertexFunction,
    h: VertexFunction,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> NewtonReport:
    """Damped Newton from f = 0 down to max-residual <= tol.

    Steps are f <- f + alpha*delta with J delta = -r and alpha halved until
    the mu-weighted residual norm strictly decreases.  The reported
    final_residual is recomputed through the lazy per-vertex operators, not
    the assembled matrix, to guard against assembly bugs.
    """
    g_arr = np.array([g(v) for v in level.vertices])
    h_arr = np.array([h(v) for v in level.vertices])
    mu = level.mu
    method = "direct" if len(level) <= DIRECT_LIMIT else "cg"
    f = np.zeros(len(level))
    damping: list[float] = []
    r, J = assemble(level, f, g_arr, h_arr)
    for it in range(max_iter + 1):
        if float(np.max(np.abs(r), initial=0.0)) <= tol:
            break
        if it == max_iter:
            raise NonConvergenceError(
                f"Newton did not reach tol={tol:g} in {max_iter} iterations "
                f"(level k={level.k}, residual {np.max(np.abs(r)):.3g})"
            )
        delta = _spd_solve(level, J, mu * r, method)
        rnorm = float(np.sqrt(mu @ (r * r)))
        alpha = 1.0
        while True:
            trial = f + alpha * delta
            r_trial, J_trial = assemble(level, trial, g_arr, h_arr)
            if float(np.sqrt(mu @ (r_trial * r_trial))) < rnorm:
                break
            alpha *= 0.5
            if alpha < 1e-8:
                raise SolverBreakdownError(
                    f"Newton damping underflowed at iteration {it} (level k={level.k})"
                )
        damping.append(alpha)
        f, r, J = trial, r_trial, J_trial
    fn = VertexFunction(level.vertices, f)
    from .flow import residual_lazy  # local import to avoid a cycle

    return NewtonReport(
        converged=True,
        iterations=len(damping),
        final_residual=residual_lazy(level, fn, g, h),
        final_residual_mu=float(np.sqrt(mu @ (r * r))),
        damping_history=damping,
        f=fn,
        unknowns=len(level),
        method=method,
    )
