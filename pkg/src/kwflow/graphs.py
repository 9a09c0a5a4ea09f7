"""Weighted measured graphs, lazy family generators, and ball exhaustions.

A graph here is connected, locally finite, with a positive vertex measure mu
and positive symmetric edge weights w.  Infinite families (integer lattices,
regular trees, the half-line, measure-collapsing chains) are realized by
truncating at a declared radius; vertices on the truncation shell may have
incomplete neighbor data, which the rest of the package treats as an error to
touch except through zero-extension-safe code paths.

Vertex ids are ints (one-dimensional families), tuples of ints (lattices of
dimension >= 2, trees as root paths), or strings (explicit graphs).  Within a
single graph the id type is homogeneous, and the canonical vertex order is the
natural sort of those ids, which fixes every iteration order in the package.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import ExhaustionError, GraphSpecError

Vertex = Union[int, tuple, str]

#: families supported by build_graph({"family": ...})
FAMILIES = ("lattice", "tree", "path", "collapsing_chain")


def vertex_key(v: Vertex) -> str:
    """Serialize a vertex id to its canonical string form.

    ints -> "3"; tuples (lattice coordinates) -> comma joined "1,-2"; strings
    (tree root paths like "0.1.2", explicit ids) pass through.
    """
    if isinstance(v, str):
        return v
    if isinstance(v, tuple):
        return ",".join(str(c) for c in v)
    return str(v)


@dataclass(frozen=True)
class FamilyInfo:
    """Generator metadata attached to graphs built from a family spec."""

    family: str
    params: dict
    truncation_depth: int
    root: Vertex
    # sphere mu-masses follow m(0) = mass0, m(n) = mass1 * growth**(n-1) for
    # n >= 1 when `geometric` is True (exact for all shipped families except
    # lattices of dimension >= 2, where no closed tail form is attached).
    geometric: bool
    mass0: float = 1.0
    mass1: float = 0.0
    growth: float = 1.0


class MeasuredGraph:
    """Finite realization of a weighted measured graph.

    Parameters
    ----------
    vertex_mu : mapping of vertex id -> mu(x) > 0
    edges : iterable of (u, v, w) with w > 0, undirected, no self loops
    complete : vertices whose neighbor lists are total; defaults to all.
        Vertices outside this set sit on a truncation shell.
    family : generator metadata for graphs realized from an infinite family
    dist : optional precomputed hop distance from the family root
    """

    def __init__(
        self,
        vertex_mu: Mapping[Vertex, float],
        edges: Iterable[tuple],
        complete: Iterable[Vertex] | None = None,
        family: FamilyInfo | None = None,
        dist: Mapping[Vertex, int] | None = None,
    ):
        if not vertex_mu:
            raise GraphSpecError("graph has no vertices")
        mu = {}
        for v, m in vertex_mu.items():
            m = float(m)
            if not np.isfinite(m) or m <= 0.0:
                raise GraphSpecError(f"mu({vertex_key(v)}) = {m!r} is not positive")
            mu[v] = m
        adj: dict[Vertex, dict[Vertex, float]] = {v: {} for v in mu}
        for u, v, w in edges:
            if u not in mu or v not in mu:
                missing = u if u not in mu else v
                raise GraphSpecError(f"edge endpoint {vertex_key(missing)} is not a vertex")
            if u == v:
                raise GraphSpecError(f"self loop at {vertex_key(u)}")
            w = float(w)
            if not np.isfinite(w) or w <= 0.0:
                raise GraphSpecError(f"weight w({vertex_key(u)},{vertex_key(v)}) = {w!r} is not positive")
            if v in adj[u] and adj[u][v] != w:
                raise GraphSpecError(
                    f"conflicting weights for edge ({vertex_key(u)},{vertex_key(v)})"
                )
            adj[u][v] = w
            adj[v][u] = w

        self.vertices: tuple = tuple(sorted(mu))
        self.mu: dict[Vertex, float] = mu
        self._adj: dict[Vertex, tuple] = {
            v: tuple(sorted(adj[v].items(), key=lambda t: _sort_key(t[0]))) for v in self.vertices
        }
        self.complete: frozenset = (
            frozenset(self.vertices) if complete is None else frozenset(complete)
        )
        self.family = family
        self._dist = dict(dist) if dist is not None else None
        self._key_index = {vertex_key(v): v for v in self.vertices}
        self._check_connected()

    # -- basic queries ----------------------------------------------------

    def __contains__(self, v: Vertex) -> bool:
        return v in self.mu

    def __len__(self) -> int:
        return len(self.vertices)

    def neighbors(self, v: Vertex) -> tuple:
        """Known (neighbor, weight) pairs of v in canonical order."""
        return self._adj[v]

    def is_complete(self, v: Vertex) -> bool:
        return v in self.complete

    def weighted_degree(self, v: Vertex) -> float:
        """Sum of all edge weights at v.  Requires complete neighbor data."""
        if v not in self.complete:
            raise GraphSpecError(
                f"weighted degree of {vertex_key(v)} is unknown (truncation shell)"
            )
        return sum(w for _, w in self._adj[v])

    def find_vertex(self, key: str) -> Vertex:
        """Resolve a serialized vertex id; raises GraphSpecError if absent."""
        try:
            return self._key_index[key]
        except KeyError:
            raise GraphSpecError(f"no vertex with id {key!r}") from None

    @property
    def root(self) -> Vertex:
        """Canonical root: the family origin, else the first vertex."""
        if self.family is not None:
            return self.family.root
        return self.vertices[0]

    def distances_from(self, root: Vertex) -> dict[Vertex, int]:
        """Hop distance from root over realized edges (BFS)."""
        if self._dist is not None and self.family is not None and root == self.family.root:
            return self._dist
        dist = {root: 0}
        q = deque([root])
        while q:
            x = q.popleft()
            for y, _ in self._adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    q.append(y)
        return dist

    def _check_connected(self):
        seen = self.distances_from(self.vertices[0])
        if len(seen) != len(self.vertices):
            raise GraphSpecError(
                f"graph is disconnected ({len(self.vertices) - len(seen)} unreachable vertices)"
            )


def _sort_key(v: Vertex):
    # homogeneous id types within a graph; tuples and ints sort numerically
    return v


# -- explicit specs and family generators ---------------------------------


def build_graph(spec: Mapping) -> MeasuredGraph:
    """Build a graph from its JSON-style spec.

    Explicit form: {"vertices": [{"id": ..., "mu": ...}], "edges": [{"u","v","w"}]}.
    Generated form: {"family": name, "params": {...}, "truncation_depth": N}.
    """
    if not isinstance(spec, Mapping):
        raise GraphSpecError("graph spec must be an object")
    if "family" in spec:
        return _build_family(spec)
    if "vertices" in spec:
        return _build_explicit(spec)
    raise GraphSpecError("graph spec needs either 'family' or 'vertices'")


def _build_explicit(spec: Mapping) -> MeasuredGraph:
    try:
        vmu = {str(rec["id"]): float(rec.get("mu", 1.0)) for rec in spec["vertices"]}
    except (TypeError, KeyError) as exc:
        raise GraphSpecError(f"bad vertex record: {exc}") from exc
    if len(vmu) != len(spec["vertices"]):
        raise GraphSpecError("duplicate vertex ids in explicit spec")
    edges = []
    for rec in spec.get("edges", ()):
        try:
            edges.append((str(rec["u"]), str(rec["v"]), float(rec.get("w", 1.0))))
        except (TypeError, KeyError) as exc:
            raise GraphSpecError(f"bad edge record: {exc}") from exc
    return MeasuredGraph(vmu, edges)


def _build_family(spec: Mapping) -> MeasuredGraph:
    family = spec["family"]
    params = dict(spec.get("params", {}))
    depth = spec.get("truncation_depth")
    if not isinstance(depth, int) or depth < 1:
        raise GraphSpecError("truncation_depth must be a positive integer")
    if family == "lattice":
        return lattice(int(params.get("dim", 1)), depth)
    if family == "tree":
        return regular_tree(int(params.get("degree", 3)), depth)
    if family == "path":
        return half_line(depth)
    if family == "collapsing_chain":
        return collapsing_chain(float(params.get("ratio", 0.5)), depth)
    raise GraphSpecError(f"unknown family {family!r} (expected one of {FAMILIES})")


def lattice(dim: int, truncation_depth: int) -> MeasuredGraph:
    """Integer lattice Z^dim with unit mu and weights, |x|_1 <= truncation_depth."""
    if dim < 1:
        raise GraphSpecError("lattice dimension must be >= 1")
    T = truncation_depth
    if dim == 1:
        verts = list(range(-T, T + 1))
        edges = [(x, x + 1, 1.0) for x in range(-T, T)]
        root: Vertex = 0
        complete = [x for x in verts if abs(x) < T]
        dist = {x: abs(x) for x in verts}
        fam = FamilyInfo("lattice", {"dim": 1}, T, root, geometric=True, mass0=1.0, mass1=2.0, growth=1.0)
        return MeasuredGraph({v: 1.0 for v in verts}, edges, complete, fam, dist)
    # dim >= 2: l1 ball; sphere masses are polynomial in n, no closed tail form
    origin = (0,) * dim
    frontier = [origin]
    verts = [origin]
    seen = {origin}
    dist = {origin: 0}
    for n in range(1, T + 1):
        nxt = []
        for x in frontier:
            for i in range(dim):
                for s in (-1, 1):
                    y = x[:i] + (x[i] + s,) + x[i + 1 :]
                    if y not in seen:
                        seen.add(y)
                        dist[y] = n
                        nxt.append(y)
        verts.extend(nxt)
        frontier = nxt
    vset = set(verts)
    edges = []
    for x in verts:
        for i in range(dim):
            y = x[:i] + (x[i] + 1,) + x[i + 1 :]
            if y in vset:
                edges.append((x, y, 1.0))
    complete = [x for x in verts if dist[x] < T]
    fam = FamilyInfo("lattice", {"dim": dim}, T, (0,) * dim, geometric=False)
    return MeasuredGraph({v: 1.0 for v in verts}, edges, complete, fam, dist)


def regular_tree(degree: int, truncation_depth: int) -> MeasuredGraph:
    """Infinite degree-regular tree (unit mu, w), truncated at the given depth.

    Vertices are root-path strings: "0", children "0.1".."0.<degree>"; every
    non-root vertex has degree-1 children.
    """
    if degree < 2:
        raise GraphSpecError("tree degree must be >= 2")
    T = truncation_depth
    root = "0"
    verts = [root]
    edges = []
    dist = {root: 0}
    frontier = [root]
    for n in range(1, T + 1):
        nxt = []
        for x in frontier:
            nchild = degree if x == root else degree - 1
            for c in range(1, nchild + 1):
                y = f"{x}.{c}"
                verts.append(y)
                edges.append((x, y, 1.0))
                dist[y] = n
                nxt.append(y)
        frontier = nxt
    complete = [v for v in verts if dist[v] < T]
    d = degree
    fam = FamilyInfo(
        "tree", {"degree": d}, T, root, geometric=True, mass0=1.0, mass1=float(d), growth=float(d - 1)
    )
    return MeasuredGraph({v: 1.0 for v in verts}, edges, complete, fam, dist)


def half_line(truncation_depth: int) -> MeasuredGraph:
    """One-sided infinite path 0 - 1 - 2 - ... with unit mu and weights."""
    T = truncation_depth
    verts = list(range(T + 1))
    edges = [(x, x + 1, 1.0) for x in range(T)]
    complete = [x for x in verts if x < T]
    dist = {x: x for x in verts}
    fam = FamilyInfo("path", {}, T, 0, geometric=True, mass0=1.0, mass1=1.0, growth=1.0)
    return MeasuredGraph({v: 1.0 for v in verts}, edges, complete, fam, dist)


def collapsing_chain(ratio: float, truncation_depth: int) -> MeasuredGraph:
    """Two-sided chain with mu(x) = ratio**|x| (0 < ratio < 1), unit weights.

    The total measure is finite: sum mu = (1 + ratio) / (1 - ratio).
    """
    if not 0.0 < ratio < 1.0:
        raise GraphSpecError("collapsing_chain ratio must lie in (0, 1)")
    T = truncation_depth
    verts = list(range(-T, T + 1))
    edges = [(x, x + 1, 1.0) for x in range(-T, T)]
    complete = [x for x in verts if abs(x) < T]
    dist = {x: abs(x) for x in verts}
    fam = FamilyInfo(
        "collapsing_chain", {"ratio": ratio}, T, 0, geometric=True,
        mass0=1.0, mass1=2.0 * ratio, growth=ratio,
    )
    return MeasuredGraph({v: ratio ** abs(v) for v in verts}, edges, complete, fam, dist)


# -- vertex functions ------------------------------------------------------


class VertexFunction:
    """A real function on an ordered vertex domain, zero-extended elsewhere.

    Evaluation at any vertex outside the domain returns exactly 0.0, which is
    the convention every operator in the package relies on.
    """

    __slots__ = ("domain", "values", "_index")

    def __init__(self, domain: Sequence[Vertex], values):
        self.domain: tuple = tuple(domain)
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (len(self.domain),):
            raise ValueError(
                f"values shape {self.values.shape} does not match domain size {len(self.domain)}"
            )
        self._index = {v: i for i, v in enumerate(self.domain)}

    @classmethod
    def zeros(cls, domain: Sequence[Vertex]) -> "VertexFunction":
        return cls(domain, np.zeros(len(tuple(domain))))

    @classmethod
    def from_dict(cls, data: Mapping[Vertex, float]) -> "VertexFunction":
        dom = tuple(sorted(data, key=_sort_key))
        return cls(dom, [float(data[v]) for v in dom])

    @classmethod
    def from_callable(cls, domain: Sequence[Vertex], fn: Callable[[Vertex], float]) -> "VertexFunction":
        dom = tuple(domain)
        return cls(dom, [float(fn(v)) for v in dom])

    def __call__(self, v: Vertex) -> float:
        i = self._index.get(v)
        return float(self.values[i]) if i is not None else 0.0

    def with_values(self, values) -> "VertexFunction":
        return VertexFunction(self.domain, values)

    def as_dict(self) -> dict:
        return {v: float(x) for v, x in zip(self.domain, self.values)}

    def support(self) -> tuple:
        return tuple(v for v, x in zip(self.domain, self.values) if x != 0.0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VertexFunction)
            and self.domain == other.domain
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self) -> str:
        return f"VertexFunction(|domain|={len(self.domain)})"


# -- exhaustions -----------------------------------------------------------


@dataclass
class Level:
    """One level V_k of an exhaustion, with its boundary and cached arrays.

    vertices, boundary and closure are in canonical order.  The arrays are
    indexed by position in `vertices` and are what the flow, oracle and
    spectral modules consume.
    """

    graph: MeasuredGraph
    k: int
    vertices: tuple
    boundary: tuple

    def __post_init__(self):
        self.vset = frozenset(self.vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def closure(self) -> tuple:
        return tuple(sorted(self.vset | set(self.boundary), key=_sort_key))

    def __len__(self) -> int:
        return len(self.vertices)

    @cached_property
    def mu(self) -> np.ndarray:
        return np.array([self.graph.mu[v] for v in self.vertices])

    @cached_property
    def internal_edges(self) -> tuple:
        """(i, j, w) arrays over unordered edges with both ends in V_k."""
        ii, jj, ww = [], [], []
        for v in self.vertices:
            i = self.index[v]
            for y, w in self.graph.neighbors(v):
                j = self.index.get(y)
                if j is not None and j > i:
                    ii.append(i)
                    jj.append(j)
                    ww.append(w)
        return (np.array(ii, dtype=int), np.array(jj, dtype=int), np.array(ww))

    @cached_property
    def boundary_potential(self) -> np.ndarray:
        """phi[i] = (1/mu) * sum of weights of edges leaving V_k at vertex i."""
        out = np.zeros(len(self.vertices))
        for v in self.vertices:
            i = self.index[v]
            out[i] = sum(w for y, w in self.graph.neighbors(v) if y not in self.vset) / self.graph.mu[v]
        return out

    @cached_property
    def weighted_degree(self) -> np.ndarray:
        """Full weighted degree of each level vertex (all incident edges)."""
        return np.array([self.graph.weighted_degree(v) for v in self.vertices])

    def laplacian_matvec(self, f: np.ndarray) -> np.ndarray:
        """Level-restricted Laplacian applied to f (values on self.vertices)."""
        ii, jj, ww = self.internal_edges
        out = np.zeros_like(f)
        if len(ww):
            d = ww * (f[jj] - f[ii])
            np.add.at(out, ii, d)
            np.subtract.at(out, jj, d)
        return out / self.mu

    def function(self, values) -> VertexFunction:
        return VertexFunction(self.vertices, values)


class Exhaustion:
    """A nested family of finite levels V_1 c V_2 c ... of a graph."""

    def __init__(self, graph: MeasuredGraph, levels: Sequence[Level], root: Vertex):
        self.graph = graph
        self.levels = list(levels)
        self.root = root
        for a, b in zip(self.levels, self.levels[1:]):
            if not a.vset <= b.vset:
                raise ExhaustionError(f"levels {a.k} and {b.k} are not nested")

    def level(self, k: int) -> Level:
        for lv in self.levels:
            if lv.k == k:
                return lv
        raise ExhaustionError(f"no level k={k}")

    @property
    def depth(self) -> int:
        return self.levels[-1].k if self.levels else 0

    def __iter__(self):
        return iter(self.levels)

    @classmethod
    def from_vertex_sets(cls, graph: MeasuredGraph, sets: Sequence[Iterable[Vertex]], root: Vertex | None = None) -> "Exhaustion":
        """Build an exhaustion from explicit nested vertex sets (1-based levels)."""
        levels = []
        for k, vs in enumerate(sets, start=1):
            vs = set(vs)
            if not vs:
                raise ExhaustionError(f"level {k} is empty")
            for v in vs:
                if v not in graph:
                    raise ExhaustionError(f"level {k} vertex {vertex_key(v)} not in graph")
                if not graph.is_complete(v):
                    raise ExhaustionError(
                        f"level {k} vertex {vertex_key(v)} is on the truncation shell"
                    )
            boundary = sorted(
                {y for v in vs for y, _ in graph.neighbors(v) if y not in vs}, key=_sort_key
            )
            levels.append(Level(graph, k, tuple(sorted(vs, key=_sort_key)), tuple(boundary)))
        r = root if root is not None else levels[0].vertices[0]
        return cls(graph, levels, r)


def ball_exhaustion(graph: MeasuredGraph, root: Vertex, depth_max: int) -> Exhaustion:
    """Exhaust by closed BFS balls V_k = B(root, k) for k = 1..depth_max.

    Every vertex of the deepest ball must have complete neighbor data, so that
    each boundary (the sphere at radius k+1) is known exactly; otherwise an
    ExhaustionError reports how deep the graph actually supports.
    """
    if root not in graph:
        raise GraphSpecError(f"root {vertex_key(root)} is not a vertex")
    if depth_max < 1:
        raise ExhaustionError("depth_max must be >= 1")
    dist = graph.distances_from(root)
    ok_depth = 0
    by_d: dict[int, list] = {}
    for v, d in dist.items():
        by_d.setdefault(d, []).append(v)
    for d in range(depth_max + 1):
        if all(graph.is_complete(v) for v in by_d.get(d, [])):
            ok_depth = d
        else:
            break
    if ok_depth < depth_max:
        raise ExhaustionError(
            f"exhaustion depth {depth_max} exceeds the fully generated region "
            f"(complete only to radius {ok_depth}); increase truncation_depth"
        )
    levels = []
    ball: list = []
    for k in range(1, depth_max + 1):
        ball = [v for v, d in dist.items() if d <= k]
        vs = frozenset(ball)
        boundary = sorted({y for v in ball for y, _ in graph.neighbors(v) if y not in vs}, key=_sort_key)
        levels.append(Level(graph, k, tuple(sorted(ball, key=_sort_key)), tuple(boundary)))
    return Exhaustion(graph, levels, root)
