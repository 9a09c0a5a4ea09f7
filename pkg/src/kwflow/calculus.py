"""Discrete calculus: Laplacian, boundary potential, gradients, integrals.

All operators act on zero-extended vertex functions.  A context couples a
graph with an optional exhaustion level; with a level present the Laplacian
and gradient restrict to neighbors inside V_k, and the boundary potential
carries the weight lost to edges leaving V_k:

    laplacian_full(f, x) = laplacian_level(f, x) - boundary_potential(x) * f(x)

holds exactly on V_k for f vanishing outside V_k (same summands, regrouped).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import IncompleteDataError
from .graphs import Level, MeasuredGraph, Vertex, VertexFunction, vertex_key


@dataclass(frozen=True)
class OperatorContext:
    """A graph plus an optional level restricting the operators to V_k."""

    graph: MeasuredGraph
    level: Optional[Level] = None

    def at_level(self, level: Level) -> "OperatorContext":
        return OperatorContext(self.graph, level)


def laplacian(ctx: OperatorContext, f: VertexFunction, x: Vertex) -> float:
    """(1/mu(x)) * sum_y w_xy (f(y) - f(x)) over known neighbors of x.

    With a level in the context the sum runs over neighbors inside V_k only
    (and x must belong to V_k); without one it is the full graph Laplacian,
    which requires complete neighbor data at x.
    """
    g = ctx.graph
    fx = f(x)
    if ctx.level is not None:
        lv = ctx.level
        if x not in lv.vset:
            raise ValueError(f"vertex {vertex_key(x)} is not in level k={lv.k}")
        acc = 0.0
        for y, w in g.neighbors(x):
            if y in lv.vset:
                acc += w * (f(y) - fx)
        return acc / g.mu[x]
    if not g.is_complete(x):
        raise IncompleteDataError(
            f"full Laplacian at {vertex_key(x)} needs complete neighbor data "
            "(vertex is on the truncation shell)"
        )
    acc = 0.0
    for y, w in g.neighbors(x):
        acc += w * (f(y) - fx)
    return acc / g.mu[x]


def boundary_potential(ctx: OperatorContext, x: Vertex) -> float:
    """(1/mu(x)) * total weight of edges from x that leave the level's V_k.

    Nonnegative; zero exactly at interior vertices (all neighbors in V_k).
    """
    if ctx.level is None:
        raise ValueError("boundary_potential needs a level in the context")
    lv = ctx.level
    if x not in lv.vset:
        raise ValueError(f"vertex {vertex_key(x)} is not in level k={lv.k}")
    return float(lv.boundary_potential[lv.index[x]])


def gradient_norm(ctx: OperatorContext, f: VertexFunction, x: Vertex) -> float:
    """sqrt( (1/(2 mu(x))) * sum_y w_xy (f(x) - f(y))^2 ).

    Restricted to neighbors inside V_k when the context carries a level.
    """
    g = ctx.graph
    if ctx.level is not None:
        lv = ctx.level
        if x not in lv.vset:
            raise ValueError(f"vertex {vertex_key(x)} is not in level k={lv.k}")
        fx = f(x)
        acc = 0.0
        for y, w in g.neighbors(x):
            if y in lv.vset:
                acc += w * (fx - f(y)) ** 2
        return math.sqrt(acc / (2.0 * g.mu[x]))
    if not g.is_complete(x):
        raise IncompleteDataError(
            f"gradient at {vertex_key(x)} needs complete neighbor data"
        )
    fx = f(x)
    acc = 0.0
    for y, w in g.neighbors(x):
        acc += w * (fx - f(y)) ** 2
    return math.sqrt(acc / (2.0 * g.mu[x]))


def integral(ctx: OperatorContext, f: VertexFunction, region: Iterable[Vertex] | None = None) -> float:
    """sum of f(x) mu(x) over the region (default: the function's domain)."""
    g = ctx.graph
    verts = f.domain if region is None else tuple(region)
    acc = 0.0
    for x in verts:
        acc += f(x) * g.mu[x]
    return acc


def _mu_grad_sq_supported(g: MeasuredGraph, f: VertexFunction, x: Vertex, inside: frozenset) -> float:
    """mu(x) * |grad f|^2(x) over known neighbors; exact for f supported in
    `inside` even when x sits on the truncation shell (unknown neighbors then
    carry f = 0 on both ends and contribute nothing)."""
    fx = f(x)
    if fx != 0.0 and not g.is_complete(x):
        raise IncompleteDataError(
            f"gradient at shell vertex {vertex_key(x)} with f != 0 is not determined"
        )
    acc = 0.0
    for y, w in g.neighbors(x):
        acc += w * (fx - f(y)) ** 2
    return 0.5 * acc


def _require_support(f: VertexFunction, inside: frozenset, what: str):
    for v, val in zip(f.domain, f.values):
        if val != 0.0 and v not in inside:
            raise ValueError(f"{what} requires f supported in V_k; f({vertex_key(v)}) != 0")


def green_identity(ctx: OperatorContext, f: VertexFunction) -> tuple[float, float]:
    """Both sides of the Green formula for compactly supported f.

    Returns (integral of |grad f|^2 dmu, -integral of f * Laplacian(f) dmu),
    both over the closure of the context's level (or the whole finite graph
    when no level is set).  The two sides are computed by independent routes:
    per-vertex gradient sums versus f against the full Laplacian.
    """
    g = ctx.graph
    if ctx.level is not None:
        lv = ctx.level
        _require_support(f, lv.vset, "green_identity")
        lhs = sum(_mu_grad_sq_supported(g, f, x, lv.vset) for x in lv.closure)
        full = OperatorContext(g)
        rhs = -sum(f(x) * laplacian(full, f, x) * g.mu[x] for x in lv.vertices if f(x) != 0.0)
        return (lhs, rhs)
    # whole graph: needs complete data everywhere
    allv = frozenset(g.vertices)
    _require_support(f, allv, "green_identity")
    full = OperatorContext(g)
    lhs = sum(g.mu[x] * gradient_norm(full, f, x) ** 2 for x in g.vertices)
    rhs = -sum(f(x) * laplacian(full, f, x) * g.mu[x] for x in g.vertices)
    return (lhs, rhs)


def dirichlet_identity(ctx: OperatorContext, f: VertexFunction) -> tuple[float, float]:
    """Both sides of the zero-extension Dirichlet-form decomposition.

    For f supported in V_k the Dirichlet energy over the closure splits into a
    level-internal part plus the boundary-potential part:

        integral_{closure} |grad f|^2 dmu
            = integral_{V_k} ( |grad_k f|^2 + boundary_potential * f^2 ) dmu

    (each edge leaving V_k contributes w * f(inner end)^2 to both sides; the
    coefficient on the potential term is 1 under this package's gradient
    normalization, which carries the 1/2 inside the square).  Returns
    (lhs, rhs) computed by the two routes.
    """
    if ctx.level is None:
        raise ValueError("dirichlet_identity needs a level in the context")
    g = ctx.graph
    lv = ctx.level
    _require_support(f, lv.vset, "dirichlet_identity")
    lhs = sum(_mu_grad_sq_supported(g, f, x, lv.vset) for x in lv.closure)
    rhs = 0.0
    for x in lv.vertices:
        gn = gradient_norm(ctx, f, x)
        rhs += g.mu[x] * (gn * gn + lv.boundary_potential[lv.index[x]] * f(x) ** 2)
    return (lhs, rhs)
