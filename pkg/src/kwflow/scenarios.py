"""Packaged study configurations.

Each scenario is a complete solve config: a graph family, coefficient
presets for g and h, and an exhaustion depth.  Together they exercise every
code path the package ships: both hypothesis routes, every constant-source
reduction, the exact f ≡ 0 family (g = h), the linear h ≡ 0 problem, a
measure-collapsing chain, and a two-dimensional lattice.

Use :func:`get_scenario` for a deep copy safe to mutate (CLI overrides do).
"""

from __future__ import annotations

import copy

__all__ = ["SCENARIOS", "scenario_names", "get_scenario"]


def _geom(amplitude: float, ratio: float) -> dict:
    return {"preset": "geom", "params": {"amplitude": amplitude, "ratio": ratio}}


def _const(value: float) -> dict:
    return {"preset": "const", "params": {"value": value}}


SCENARIOS: dict = {
    "z_c1": {
        "title": "integer lattice, ordering/integrability route",
        "description": (
            "Z with h = -(1/2)^|x| and g = 2h: g <= h < 0 with exact "
            "geometric tails (integral of |h| = 3, of g^2/|h| = 12, so the "
            "L2 bound is 48).  The spectral gap degenerates like k^-2, so "
            "only the first route certifies existence."
        ),
        "graph": {"family": "lattice", "params": {"dim": 1}},
        "g": _geom(-2.0, 0.5),
        "h": _geom(-1.0, 0.5),
        "exhaustion": {"depth": 8},
    },
    "z_exact": {
        "title": "integer lattice, exact zero solution",
        "description": (
            "g = h on Z makes f = 0 the exact solution at every level: the "
            "flow must terminate immediately with zero residual."
        ),
        "graph": {"family": "lattice", "params": {"dim": 1}},
        "g": _geom(-1.0, 0.5),
        "h": _geom(-1.0, 0.5),
        "exhaustion": {"depth": 8},
    },
    "z2_exact": {
        "title": "two-dimensional lattice, exact zero solution",
        "description": (
            "g = h on Z^2 (l1 balls; sphere masses are polynomial, so no "
            "closed tails): exercises tuple vertices and the "
            "satisfied-on-truncation caveat path."
        ),
        "graph": {"family": "lattice", "params": {"dim": 2}},
        "g": _geom(-1.0, 0.5),
        "h": _geom(-1.0, 0.5),
        "exhaustion": {"depth": 3},
    },
    "tree_c2": {
        "title": "3-regular tree, spectral-gap route",
        "description": (
            "h = -(1/3)^n and g = +(1/2)^n/2 on the 3-regular tree: g > 0 "
            "rules the ordering route out, but the Dirichlet gaps stay near "
            "3 - 2*sqrt(2), h has exact L1 mass 4 and g has L2 mass "
            "sqrt(0.625), so the quadratic inequality gives a uniform bound."
        ),
        "graph": {"family": "tree", "params": {"degree": 3}},
        "g": _geom(0.5, 0.5),
        "h": _geom(-1.0, 1.0 / 3.0),
        "exhaustion": {"depth": 6},
    },
    "tree_zero_source": {
        "title": "3-regular tree, zero source reduction",
        "description": (
            "g = 0 with summable negative h on a gap-carrying tree: the "
            "zero-source reduction fires and the solutions stay uniformly "
            "small."
        ),
        "graph": {"family": "tree", "params": {"degree": 3}},
        "g": _const(0.0),
        "h": _geom(-1.0, 1.0 / 3.0),
        "exhaustion": {"depth": 6},
    },
    "tree_poisson": {
        "title": "3-regular tree, linear problem (h = 0)",
        "description": (
            "h = 0 reduces the equation to the linear problem (Laplacian "
            "equals g) with an L2 source on a gap-carrying graph; the flow "
            "and the one-step oracle must agree."
        ),
        "graph": {"family": "tree", "params": {"degree": 3}},
        "g": _geom(-0.5, 0.5),
        "h": _const(0.0),
        "exhaustion": {"depth": 6},
    },
    "chain_finite_volume": {
        "title": "collapsing chain, finite-volume reductions",
        "description": (
            "mu = (1/2)^|x| gives total volume 3; with constant g = -2 <= "
            "h = -1 both constant-source reductions (integrable reciprocal, "
            "finite volume) fire and reduce to the ordering route."
        ),
        "graph": {"family": "collapsing_chain", "params": {"ratio": 0.5}},
        "g": _const(-2.0),
        "h": _const(-1.0),
        "exhaustion": {"depth": 6},
    },
    "path_exact": {
        "title": "half line, exact zero solution",
        "description": (
            "g = h = -1 on the one-sided path: f = 0 exactly, on the one "
            "family whose balls grow by a single vertex per level."
        ),
        "graph": {"family": "path", "params": {}},
        "g": _const(-1.0),
        "h": _const(-1.0),
        "exhaustion": {"depth": 8},
    },
}


def scenario_names() -> list:
    return sorted(SCENARIOS)


def get_scenario(name: str) -> dict:
    """Deep copy of a packaged scenario config (KeyError lists the options)."""
    if name not in SCENARIOS:
        raise KeyError(
            f"unknown scenario {name!r}; available: {', '.join(scenario_names())}"
        )
    return copy.deepcopy(SCENARIOS[name])
