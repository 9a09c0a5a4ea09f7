"""Energy-descent heat flow for the level problems.

On a level V_k the flow integrates

    df/dt = laplacian_k(f) - boundary_potential * f + h * exp(f) - g

from f(0) = 0 by explicit Euler steps whose size is chosen so that the level
energy

    J(f) = integral( f*g + 1/2*|grad_k f|^2 - (exp(f) - 1)*h
                     + 1/2 * boundary_potential * f^2 ) dmu

never increases (backtracking halves dt until it does not) and so that the
velocity sup norm is non-increasing step over step.  The second property is
structural: whenever

    dt * ( wdeg(x)/mu(x) + |h(x)| e^{f(x)} * e^{1/2} ) <= 0.9   and
    dt * max|f_t| <= 1/2,

the Euler update of the velocity is an affine sub-stochastic map plus a
nonlinear term of the correct sign, so max|f_t| cannot grow.  Stationary
points of the flow solve the level equation, and the energy at any time is
<= J(0) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import calculus
from .errors import HypothesisError, OverflowAbort, StiffnessError
from .graphs import Level, VertexFunction, vertex_key

_VEL_GUARD = float(np.exp(0.5))  # e^{1/2}: bound on e^{dt f_t} under the caps


@dataclass(frozen=True)
class FlowConfig:
    """Tuning knobs for the explicit flow.

    dt_init defaults to 0.1 * mu_min / (max weighted degree + max|h| + 1), a
    CFL-like guard; backtracking and the stability caps correct misestimates.
    """

    tol: float = 1e-9
    dt_init: Optional[float] = None
    dt_min: float = 1e-12
    dt_max: float = float("inf")
    t_max: float = 1e7
    max_steps: int = 500_000
    growth: float = 1.25
    exp_clamp: float = 700.0
    trace: bool = False
    trace_stride: int = 1


@dataclass(frozen=True)
class FlowState:
    """One accepted point along the flow (arrays indexed like level.vertices)."""

    level: Level
    t: float
    values: np.ndarray
    velocity: np.ndarray
    energy: float
    residual: float
    step_count: int
    dt_last: float

    @property
    def f(self) -> VertexFunction:
        return VertexFunction(self.level.vertices, self.values.copy())


@dataclass
class LevelSolution:
    """Converged (or diagnosed) solution of one level problem."""

    k: int
    f: VertexFunction
    converged: bool
    solver: str
    residual: float
    energy: float
    estimate_lhs: float
    l2_mass: float
    l2_mass_h_weighted: float
    positivity_min: float
    velocity_ceiling: float
    velocity_max: float
    steps: int
    t_final: float
    h_zero: bool
    unknowns: int
    abort_reason: Optional[str] = None
    trace: Optional[list] = None
    # filled by the driver when the oracle / hypothesis data are available
    newton: Optional[object] = None
    flow_newton_gap: Optional[float] = None
    c1_bound: Optional[float] = None  # 4·∫_{V_k} g²/|h| dμ, this level's share
    lambda1: Optional[float] = None


def restrict(fn: VertexFunction, level: Level) -> np.ndarray:
    """Values of fn on the level's vertices, in level order."""
    return np.array([fn(v) for v in level.vertices])


def energy(level: Level, f: np.ndarray, g: np.ndarray, h: np.ndarray) -> float:
    """The level energy J(f); J(0) = 0."""
    mu = level.mu
    ii, jj, ww = level.internal_edges
    grad = 0.5 * float(np.sum(ww * (f[ii] - f[jj]) ** 2)) if len(ww) else 0.0
    bp = level.boundary_potential
    return float(
        mu @ (f * g) + grad - mu @ (h * np.expm1(f)) + 0.5 * (mu @ (bp * f * f))
    )


def velocity(level: Level, f: np.ndarray, g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Right-hand side of the flow (also the level equation's residual)."""
    return level.laplacian_matvec(f) - level.boundary_potential * f + h * np.exp(f) - g


def _energy_delta(level: Level, f: np.ndarray, d: np.ndarray, g: np.ndarray, h: np.ndarray) -> float:
    """J(f + d) - J(f) evaluated without cancellation of the large terms.

    Near stationarity the decrease per step (~ dt * integral f_t^2) is far
    below the float resolution of J itself, so the difference must be built
    from small factors directly: factored quadratics for the gradient and
    boundary parts, expm1 for the exponential part.
    """
    mu = level.mu
    ii, jj, ww = level.internal_edges
    if len(ww):
        df = f[ii] - f[jj]
        dd = d[ii] - d[jj]
        grad = 0.5 * float(np.sum(ww * dd * (2.0 * df + dd)))
    else:
        grad = 0.0
    bp = level.boundary_potential
    return float(
        mu @ (d * g)
        + grad
        - mu @ (h * np.exp(f) * np.expm1(d))
        + 0.5 * (mu @ (bp * d * (2.0 * f + d)))
    )


def default_dt_init(level: Level, h: np.ndarray) -> float:
    mu_min = float(np.min(level.mu))
    wdeg_max = float(np.max(level.weighted_degree)) if len(level) else 0.0
    return 0.1 * mu_min / (wdeg_max + float(np.max(np.abs(h)) if len(h) else 0.0) + 1.0)


def _stability_cap(level: Level, f: np.ndarray, h: np.ndarray) -> float:
    """Largest dt for which the velocity sup norm is provably non-increasing."""
    rate = level.weighted_degree / level.mu + np.abs(h) * np.exp(f) * _VEL_GUARD
    return 0.9 / float(np.max(rate))


def flow_step(state: FlowState, g: np.ndarray, h: np.ndarray, cfg: FlowConfig) -> FlowState:
    """Advance one accepted explicit step.

    The trial dt is the previous accepted dt grown by cfg.growth, clipped to
    the stability caps, then halved until the energy difference is <= 0.
    Raises StiffnessError if dt underflows dt_min without descent, and
    OverflowAbort if the update would leave the exp() safety range.
    """
    level = state.level
    f = state.values
    v = state.velocity
    dt = state.dt_last * cfg.growth if state.step_count > 0 else state.dt_last
    dt = min(dt, cfg.dt_max, _stability_cap(level, f, h))
    vmax = float(np.max(np.abs(v))) if len(v) else 0.0
    if vmax > 0.0:
        dt = min(dt, 0.5 / vmax)
    while True:
        d = dt * v
        new_f = f + d
        if float(np.max(new_f, initial=0.0)) > cfg.exp_clamp or not np.all(np.isfinite(new_f)):
            raise OverflowAbort(
                f"flow left the exp() safety range (max f = {np.max(new_f):.3g}) "
                f"at t = {state.t:.6g}; aborting level k={level.k}"
            )
        delta = _energy_delta(level, f, d, g, h)
        if delta <= 0.0:
            break
        dt *= 0.5
        if dt < cfg.dt_min:
            raise StiffnessError(
                f"dt underflowed {cfg.dt_min:g} without energy descent at "
                f"t = {state.t:.6g} (level k={level.k}); the problem looks stiff "
                "or misconfigured"
            )
    new_v = velocity(level, new_f, g, h)
    if not np.all(np.isfinite(new_v)):
        raise OverflowAbort(f"non-finite velocity at t = {state.t + dt:.6g} (level k={level.k})")
    return FlowState(
        level=level,
        t=state.t + dt,
        values=new_f,
        velocity=new_v,
        energy=state.energy + delta,
        residual=float(np.max(np.abs(new_v))) if len(new_v) else 0.0,
        step_count=state.step_count + 1,
        dt_last=dt,
    )


def initial_state(level: Level, g: np.ndarray, h: np.ndarray, cfg: FlowConfig) -> FlowState:
    f0 = np.zeros(len(level))
    v0 = velocity(level, f0, g, h)
    dt0 = cfg.dt_init if cfg.dt_init is not None else default_dt_init(level, h)
    if dt0 <= 0.0:
        raise ValueError(f"dt_init must be positive, got {dt0!r}")
    return FlowState(
        level=level,
        t=0.0,
        values=f0,
        velocity=v0,
        energy=0.0,
        residual=float(np.max(np.abs(v0))) if len(v0) else 0.0,
        step_count=0,
        dt_last=dt0,
    )


def _check_h_sign(level: Level, h: np.ndarray):
    bad = np.flatnonzero(h > 0.0)
    if len(bad):
        v = level.vertices[int(bad[0])]
        raise HypothesisError(
            f"h({vertex_key(v)}) = {h[bad[0]]:.6g} > 0 violates the standing "
            "hypothesis h <= 0; the flow and the Newton oracle both require it"
        )


def relax(
    level: Level,
    g: VertexFunction,
    h: VertexFunction,
    cfg: FlowConfig = FlowConfig(),
) -> LevelSolution:
    """Run the flow on one level until the residual reaches cfg.tol.

    Returns a LevelSolution whose diagnostics include the velocity ceiling
    max|h - g| (the flow never exceeds it), the final energy both as tracked
    along the flow and as the independently re-evaluated stationarity
    estimate (must be <= 0), the l2 mass, and the positivity minimum.
    Non-convergence within t_max / max_steps is flagged, not raised;
    flow_step errors (stiffness, overflow) propagate.
    """
    g_arr = restrict(g, level)
    h_arr = restrict(h, level)
    _check_h_sign(level, h_arr)
    state = initial_state(level, g_arr, h_arr, cfg)
    ceiling = state.residual
    velocity_max = state.residual
    trace_rows: Optional[list] = [] if cfg.trace else None
    if trace_rows is not None:
        trace_rows.append(_trace_row(state))
    while state.residual > cfg.tol and state.t < cfg.t_max and state.step_count < cfg.max_steps:
        state = flow_step(state, g_arr, h_arr, cfg)
        velocity_max = max(velocity_max, state.residual)
        if trace_rows is not None and state.step_count % cfg.trace_stride == 0:
            trace_rows.append(_trace_row(state))
    # the terminal state always makes it into the trace, whatever the stride
    if trace_rows is not None and state.step_count % cfg.trace_stride != 0:
        trace_rows.append(_trace_row(state))
    converged = state.residual <= cfg.tol
    f_fn = state.f
    mu = level.mu
    # independent re-evaluation of the stationarity estimate via the lazy
    # per-vertex operators (not the vectorized kernels used while stepping)
    est = _estimate_lazy(level, f_fn, g, h)
    return LevelSolution(
        k=level.k,
        f=f_fn,
        converged=converged,
        solver="flow",
        residual=state.residual,
        energy=energy(level, state.values, g_arr, h_arr),
        estimate_lhs=est,
        l2_mass=float(mu @ (state.values**2)),
        l2_mass_h_weighted=float(mu @ (np.abs(h_arr) * state.values**2)),
        positivity_min=float(state.values.min()) if state.values.size else 0.0,
        velocity_ceiling=ceiling,
        velocity_max=velocity_max,
        steps=state.step_count,
        t_final=state.t,
        h_zero=bool(np.all(h_arr == 0.0)),
        unknowns=len(level),
        abort_reason=None if converged else "budget",
        trace=trace_rows,
    )


def _trace_row(state: FlowState) -> tuple:
    n = len(state.values)
    return (
        state.t,
        state.dt_last if state.step_count > 0 else 0.0,
        state.energy,
        state.residual,
        float(np.min(state.values)) if n else 0.0,
        float(np.max(state.values)) if n else 0.0,
    )


def _estimate_lazy(level: Level, f: VertexFunction, g: VertexFunction, h: VertexFunction) -> float:
    """The stationarity estimate integral(f g + 1/2(|grad_k f|^2 +
    boundary_potential f^2) - (e^f - 1) h) dmu via per-vertex operators."""
    ctx = calculus.OperatorContext(level.graph, level)
    acc = 0.0
    for x in level.vertices:
        fx = f(x)
        gn = calculus.gradient_norm(ctx, f, x)
        bp = calculus.boundary_potential(ctx, x)
        acc += level.graph.mu[x] * (
            fx * g(x) + 0.5 * (gn * gn + bp * fx * fx) - np.expm1(fx) * h(x)
        )
    return float(acc)


def residual_lazy(level: Level, f: VertexFunction, g: VertexFunction, h: VertexFunction) -> float:
    """max_x |laplacian_k f - boundary_potential f + h e^f - g| recomputed
    through the per-vertex operators; used to re-verify solver output."""
    ctx = calculus.OperatorContext(level.graph, level)
    worst = 0.0
    for x in level.vertices:
        r = (
            calculus.laplacian(ctx, f, x)
            - calculus.boundary_potential(ctx, x) * f(x)
            + h(x) * float(np.exp(f(x)))
            - g(x)
        )
        worst = max(worst, abs(r))
    return worst
