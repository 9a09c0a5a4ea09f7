"""Shared helpers for the test suite: seeded random graphs and functions."""

import numpy as np

from kwflow import VertexFunction, ball_exhaustion, build_graph


def random_graph_spec(rng, n_max=50):
    """Connected explicit graph spec: random spanning tree plus extra edges,
    random positive weights and measures."""
    n = int(rng.integers(2, n_max + 1))
    vertices = [{"id": str(i), "mu": float(rng.uniform(0.2, 5.0))} for i in range(n)]
    edges = []
    seen = set()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges.append({"u": str(j), "v": str(i), "w": float(rng.uniform(0.1, 3.0))})
        seen.add((j, i))
    for _ in range(int(rng.integers(0, n))):
        a, b = sorted(int(x) for x in rng.integers(0, n, size=2))
        if a == b or (a, b) in seen:
            continue
        seen.add((a, b))
        edges.append({"u": str(a), "v": str(b), "w": float(rng.uniform(0.1, 3.0))})
    return {"vertices": vertices, "edges": edges}


def random_graph(rng, n_max=50):
    return build_graph(random_graph_spec(rng, n_max))


def random_function(rng, domain, scale=1.0):
    return VertexFunction.from_callable(
        tuple(domain), lambda _v: float(rng.normal(0.0, scale))
    )


def random_level(rng, graph, depth_max=3):
    """A random ball of the graph (its deepest level)."""
    root = graph.vertices[int(rng.integers(0, len(graph.vertices)))]
    depth = int(rng.integers(1, depth_max + 1))
    return ball_exhaustion(graph, root, depth).level(depth)


def rel_gap(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1.0)


def assert_close(a, b, tol, what=""):
    assert rel_gap(a, b) <= tol, f"{what}: {a!r} vs {b!r} (rel {rel_gap(a, b):.3e})"
