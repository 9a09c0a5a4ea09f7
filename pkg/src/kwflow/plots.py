"""Figure rendering for solve reports.

Every function takes already-computed report objects and writes one PNG,
returning the path; nothing here recomputes mathematics.  The Agg backend is
forced so the package renders identically in headless runs, and figures are
written with fixed sizes/dpi so repeated runs produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = [
    "probe_convergence_figure",
    "residual_figure",
    "spectral_figure",
    "flow_trace_figure",
]

_DPI = 120


def _finish(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def probe_convergence_figure(limit, path) -> Path:
    """Probe values f^k(x) against the level k, one line per probe."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ks = list(range(1, len(limit.per_probe[0]) + 1)) if limit.per_probe else []
    for key, series, flags in zip(limit.probe_vertices, limit.per_probe, limit.in_domain):
        ax.plot(ks, series, marker="o", markersize=3.5, label=f"x = {key}")
        outside = [(k, v) for k, v, ok in zip(ks, series, flags) if not ok]
        if outside:
            ax.plot(*zip(*outside), linestyle="none", marker="x", color="k")
    ax.set_xlabel("level k")
    ax.set_ylabel("f_k at probe")
    ax.set_title("probe convergence along the exhaustion")
    if limit.probe_vertices:
        ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def residual_figure(levels, path) -> Path:
    """Final flow residual per level, with the flow-vs-oracle gap if present."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ks = [s.k for s in levels]
    res = [max(s.residual, 1e-18) for s in levels]
    ax.semilogy(ks, res, marker="o", label="flow residual (sup norm)")
    gaps = [(s.k, s.flow_newton_gap) for s in levels if s.flow_newton_gap is not None]
    if gaps:
        gk, gv = zip(*gaps)
        ax.semilogy(gk, [max(v, 1e-18) for v in gv], marker="s", label="flow vs Newton gap")
    ax.set_xlabel("level k")
    ax.set_ylabel("sup-norm size")
    ax.set_title("per-level residuals")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    return _finish(fig, path)


def spectral_figure(cheeger, path) -> Path:
    """Dirichlet gap lambda_1(k) over the scan, with the verdict in the title."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    pts = [(lv.k, lv.lambda1) for lv in cheeger.levels if lv.lambda1 is not None]
    if pts:
        ks, lams = zip(*pts)
        ax.plot(ks, lams, marker="o", label="lambda_1(k)")
        ax.axhline(cheeger.margin, color="r", linestyle="--", linewidth=1, label="margin")
    ax.set_xlabel("level k")
    ax.set_ylabel("first Dirichlet eigenvalue")
    ax.set_title(f"spectral gap scan: {cheeger.verdict}")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def flow_trace_figure(trace, k, path) -> Path:
    """Energy decay and residual decay along one level's flow."""
    ts = [row[0] for row in trace]
    energies = [row[2] for row in trace]
    residuals = [max(row[3], 1e-18) for row in trace]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.4, 6.0), sharex=True)
    ax1.plot(ts, energies)
    ax1.set_ylabel("energy J(f)")
    ax1.set_title(f"flow on level k = {k}")
    ax1.grid(True, alpha=0.3)
    ax2.semilogy(ts, residuals)
    ax2.set_xlabel("flow time t")
    ax2.set_ylabel("residual sup|f_t|")
    ax2.grid(True, which="both", alpha=0.3)
    return _finish(fig, path)
