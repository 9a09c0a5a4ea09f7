"""Sign and summability checks for the coefficient pair (g, h).

The solvability theory implemented by this package asks for structural
hypotheses on the data of  Δf + h·e^f − g = 0  before any flow is run:

* an *ordering/integrability* condition (``check_c1``):  g ≤ h < 0 pointwise,
  with ∫|h| dμ and ∫ g²/|h| dμ both finite; it yields the a-priori bound
  ∫ f² dμ ≤ 4 ∫ g²/|h| dμ for the produced solutions, and
* a *spectral-gap* condition (``check_c2``):  h ≤ 0 with h ∈ L¹(μ) and
  g ∈ L²(μ) on a graph whose truncated Dirichlet gaps stay bounded away
  from zero, which yields a uniform L² bound through a scalar quadratic
  inequality.

On the packaged radially symmetric families (integer lattice, regular tree,
half line, collapsing chain) the coefficient fields are closed-form radial
profiles, so the integrals above split into an exact partial sum over the
truncated graph plus an analytic tail over the spheres beyond truncation.
The tail algebra lives in :class:`RadialForm`; every tail is labelled
``exact`` (geometric series summed in closed form), a rigorous upper bound,
or ``divergent``.  On a fully specified finite graph the partial sums are
the integrals themselves, so verdicts are exact there too.  Everything else
(table-valued fields, truncations without a sphere-mass model) only ever
gets the partial sums, and the verdicts say so: "satisfied_on_truncation",
never "satisfied".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .errors import GraphSpecError
from .graphs import FamilyInfo, MeasuredGraph, VertexFunction
from .spectral import CheegerReport, cheeger_scan

__all__ = [
    "RadialForm",
    "TailEstimate",
    "IntegralEstimate",
    "FunctionField",
    "parse_field",
    "radial_le",
    "tail_sum",
    "C1Report",
    "C2Report",
    "CorollaryReport",
    "HypothesisReport",
    "check_c1",
    "check_c2",
    "check_corollary_scenarios",
    "check_hypotheses",
    "uniform_l2_bound",
]


# ---------------------------------------------------------------------------
# radial profiles and their tail sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialForm:
    """A radial profile  n ↦ amplitude · ratio**n · (1+n)**(-decay).

    ``n`` is the distance from the family root.  The three-parameter shape is
    closed under the operations the condition checks need (absolute value,
    squaring, products, quotients), which is what makes the tail sums exact.
    """

    amplitude: float
    ratio: float = 1.0
    decay: float = 0.0

    def __post_init__(self) -> None:
        if not (self.ratio > 0.0):
            raise ValueError("radial form needs a positive ratio")

    def value(self, n: int) -> float:
        return self.amplitude * self.ratio ** n * (1.0 + n) ** (-self.decay)

    def abs(self) -> "RadialForm":
        return RadialForm(abs(self.amplitude), self.ratio, self.decay)

    def squared(self) -> "RadialForm":
        return RadialForm(self.amplitude ** 2, self.ratio ** 2, 2.0 * self.decay)

    def times(self, other: "RadialForm") -> "RadialForm":
        return RadialForm(
            self.amplitude * other.amplitude,
            self.ratio * other.ratio,
            self.decay + other.decay,
        )

    def over(self, other: "RadialForm") -> "RadialForm":
        if other.amplitude == 0.0:
            raise ZeroDivisionError("division by an identically zero radial form")
        return RadialForm(
            self.amplitude / other.amplitude,
            self.ratio / other.ratio,
            self.decay - other.decay,
        )

    def is_constant(self) -> bool:
        return self.ratio == 1.0 and self.decay == 0.0

    def supremum(self) -> float:
        """sup over n ≥ 0 of the profile value (may be ``inf``).

        Used to certify bounds of the shape  h ≤ −ε:  the supremum of a
        negative-amplitude profile is negative exactly when the envelope
        ratio**n·(1+n)**(-decay) stays bounded away from zero, i.e. when the
        profile does not sink to 0 at infinity.
        """
        a, s, p = self.amplitude, self.ratio, self.decay
        if a == 0.0:
            return 0.0
        # envelope b(n) = s**n (1+n)**(-p);  b(0) = 1.
        if a > 0.0:
            if s > 1.0 or (s == 1.0 and p < 0.0):
                return math.inf
            if s == 1.0:  # p >= 0, b non-increasing
                return a
            # s < 1: b -> 0; if p >= 0 max at n = 0, else hump at n* = -p/ln s - 1
            if p >= 0.0:
                return a
            n_star = (-p) / (-math.log(s)) - 1.0
            cands = {0, max(0, math.floor(n_star)), max(0, math.ceil(n_star))}
            return a * max(self.value(n) / a for n in cands)
        # a < 0: sup a·b = a·inf b
        if s < 1.0 or (s == 1.0 and p > 0.0):
            return 0.0  # envelope sinks to zero; no negative upper bound
        if s == 1.0:  # p <= 0, b non-decreasing, inf at n = 0
            return a
        # s > 1: b -> inf; possible dip at n* = p/ln s - 1 when p > 0
        if p <= 0.0:
            return a  # b non-decreasing from 1
        n_star = p / math.log(s) - 1.0
        cands = {0, max(0, math.floor(n_star)), max(0, math.ceil(n_star))}
        return a * min(self.value(n) / a for n in cands)


def radial_le(lo: RadialForm, hi: RadialForm) -> Optional[bool]:
    """Decide  lo(n) ≤ hi(n)  for every n ≥ 0, when the shapes allow it.

    Returns ``True``/``False`` when the ordering is decidable in closed form
    (equal decay exponents reduce the question to two geometric envelopes),
    ``None`` when it is not.
    """
    if lo.decay != hi.decay:
        return None
    a1, s1 = lo.amplitude, lo.ratio
    a2, s2 = hi.amplitude, hi.ratio
    if a1 <= 0.0 <= a2:
        return True
    if a1 > 0.0 and a2 <= 0.0:
        return False
    if a1 > 0.0 and a2 > 0.0:
        # need (a1/a2)(s1/s2)^n <= 1 for all n
        return s1 <= s2 and a1 <= a2
    # both negative: need |a1| s1^n >= |a2| s2^n for all n
    return s1 >= s2 and abs(a1) >= abs(a2)


@dataclass(frozen=True)
class TailEstimate:
    """Sum of a radial profile against sphere masses over spheres n > N."""

    value: Optional[float]  # None when divergent
    exact: bool
    divergent: bool

    @staticmethod
    def exactly(v: float) -> "TailEstimate":
        return TailEstimate(value=v, exact=True, divergent=False)

    @staticmethod
    def bounded(v: float) -> "TailEstimate":
        return TailEstimate(value=v, exact=False, divergent=False)

    @staticmethod
    def diverges() -> "TailEstimate":
        return TailEstimate(value=None, exact=False, divergent=True)

    def as_dict(self) -> dict:
        return {"value": self.value, "exact": self.exact, "divergent": self.divergent}


def tail_sum(form: RadialForm, family: FamilyInfo, beyond: int) -> TailEstimate:
    """Σ over spheres n > ``beyond`` of (sphere mass m_n) · form(n).

    The families store their sphere masses geometrically:  m_0 = mass0 and
    m_n = mass1·growth**(n-1) for n ≥ 1.  Writing q = growth·ratio the tail is
    C·Σ_{n>N} q**n·(1+n)**(-p) with C = amplitude·mass1/growth, which is

    * summed exactly when p = 0 and q < 1,
    * bounded above by freezing (1+n)**(-p) at its largest tail value when
      p > 0 and q < 1,
    * bounded above through a slightly larger geometric ratio q' = (1+q)/2
      that absorbs the polynomial growth when p < 0 and q < 1,
    * bounded by the integral comparison when q = 1 and p > 1,
    * divergent otherwise (unless the amplitude is zero).

    Only non-negative profiles are summed here (every caller passes an
    absolute value, a square, or a quotient of those), so "upper bound"
    is unambiguous.
    """
    if form.amplitude < 0.0:
        raise ValueError("tail_sum expects a non-negative radial profile")
    if form.amplitude == 0.0:
        return TailEstimate.exactly(0.0)
    if not family.geometric:
        raise ValueError("tail_sum needs a family with geometric sphere masses")
    N = int(beyond)
    p = form.decay
    q = family.growth * form.ratio
    C = form.amplitude * family.mass1 / family.growth
    if q < 1.0:
        geom = q ** (N + 1) / (1.0 - q)
        if p == 0.0:
            return TailEstimate.exactly(C * geom)
        if p > 0.0:
            # (1+n)^{-p} <= (2+N)^{-p} for every n >= N+1
            return TailEstimate.bounded(C * (2.0 + N) ** (-p) * geom)
        # p < 0: polynomial growth; majorize (1+n)^{|p|} q^n by M·q'^n
        qp = 0.5 * (1.0 + q)
        r = q / qp
        n_star = (-p) / (-math.log(r)) - 1.0
        cands = {N + 1, max(N + 1, math.floor(n_star)), max(N + 1, math.ceil(n_star))}
        M = max((1.0 + n) ** (-p) * r ** n for n in cands)
        return TailEstimate.bounded(C * M * qp ** (N + 1) / (1.0 - qp))
    if q == 1.0:
        if p > 1.0:
            # Σ_{n>N} (1+n)^{-p} <= ∫_N^∞ (1+x)^{-p} dx
            return TailEstimate.bounded(C * (1.0 + N) ** (1.0 - p) / (p - 1.0))
        return TailEstimate.diverges()
    return TailEstimate.diverges()


@dataclass(frozen=True)
class IntegralEstimate:
    """∫ (non-negative integrand) dμ split as  exact partial sum over the
    vertices within the scan depth  +  tail over everything beyond it.

    The tail is ``None`` when no formula applies (the quantity is then only
    known "on truncation"), a :class:`TailEstimate` otherwise.
    """

    name: str
    partial: float
    tail: Optional[TailEstimate]

    @property
    def divergent(self) -> bool:
        return self.tail is not None and self.tail.divergent

    @property
    def has_total(self) -> bool:
        return self.tail is not None and not self.tail.divergent

    @property
    def total(self) -> Optional[float]:
        if not self.has_total:
            return None
        return self.partial + self.tail.value

    @property
    def exact(self) -> bool:
        return self.tail is not None and self.tail.exact

    def best(self) -> float:
        """Largest certified value: the total when finite, else the partial."""
        t = self.total
        return self.partial if t is None else t

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "partial": float(self.partial),
            "tail": None if self.tail is None else self.tail.as_dict(),
            "total": None if self.total is None else float(self.total),
            "exact": self.exact,
            "divergent": self.divergent,
        }


# ---------------------------------------------------------------------------
# coefficient fields
# ---------------------------------------------------------------------------


_PRESETS = ("const", "geom", "power", "table")


@dataclass(frozen=True)
class FunctionField:
    """A coefficient (g or h) given as a radial profile of the root distance.

    Four presets cover the packaged scenarios:

    * ``const``  value v                      → v
    * ``geom``   amplitude a, ratio s         → a·s**n
    * ``power``  amplitude a, exponent p      → a·(1+n)**(-p)
    * ``table``  values [v0, v1, …], default  → v_n, then default

    The first three carry a :class:`RadialForm`, so integrals against them
    admit analytic tails; a table only ever yields truncated partial sums.
    """

    preset: str
    params: dict
    radial: Optional[RadialForm]

    def value_at(self, n: int) -> float:
        if self.preset == "table":
            vals = self.params["values"]
            return float(vals[n]) if n < len(vals) else float(self.params["default"])
        return self.radial.value(n)

    def evaluate(self, graph: MeasuredGraph) -> VertexFunction:
        dist = graph.distances_from(graph.root)
        return VertexFunction.from_callable(
            graph.vertices, lambda v: self.value_at(dist[v])
        )

    def constant_value(self) -> Optional[float]:
        """The constant this field equals, or None if it is not constant."""
        if self.preset == "table":
            vals = [float(v) for v in self.params["values"]]
            d = float(self.params["default"])
            return d if all(v == d for v in vals) else None
        if self.radial.is_constant() or self.radial.amplitude == 0.0:
            return self.radial.amplitude
        return None

    def as_dict(self) -> dict:
        return {"preset": self.preset, "params": dict(self.params)}


def parse_field(spec) -> FunctionField:
    """Build a :class:`FunctionField` from a config fragment.

    Accepts a bare number (shorthand for a constant) or a mapping
    ``{"preset": name, "params": {...}}`` naming one of the presets.
    """
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        v = float(spec)
        return FunctionField("const", {"value": v}, RadialForm(v))
    if isinstance(spec, FunctionField):
        return spec
    if not isinstance(spec, dict):
        raise GraphSpecError(f"coefficient spec must be a number or mapping, got {spec!r}")
    preset = spec.get("preset")
    if preset not in _PRESETS:
        raise GraphSpecError(
            f"unknown coefficient preset {preset!r}; expected one of {_PRESETS}"
        )
    params = spec.get("params")
    if not isinstance(params, dict):
        raise GraphSpecError("coefficient spec needs a 'params' mapping")
    if preset == "const":
        if "value" not in params:
            raise GraphSpecError("const preset needs params.value")
        v = float(params["value"])
        return FunctionField(preset, {"value": v}, RadialForm(v))
    if preset == "geom":
        missing = {"amplitude", "ratio"} - params.keys()
        if missing:
            raise GraphSpecError(f"geom preset missing params {sorted(missing)}")
        a, s = float(params["amplitude"]), float(params["ratio"])
        if not s > 0.0:
            raise GraphSpecError("geom preset needs ratio > 0")
        return FunctionField(preset, {"amplitude": a, "ratio": s}, RadialForm(a, s))
    if preset == "power":
        missing = {"amplitude", "exponent"} - params.keys()
        if missing:
            raise GraphSpecError(f"power preset missing params {sorted(missing)}")
        a, p = float(params["amplitude"]), float(params["exponent"])
        return FunctionField(
            preset, {"amplitude": a, "exponent": p}, RadialForm(a, 1.0, p)
        )
    # table
    if "values" not in params or "default" not in params:
        raise GraphSpecError("table preset needs params.values and params.default")
    vals = [float(v) for v in params["values"]]
    return FunctionField(
        preset, {"values": vals, "default": float(params["default"])}, None
    )


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _mu_vector(graph: MeasuredGraph) -> np.ndarray:
    return np.array([graph.mu[v] for v in graph.vertices], dtype=float)


def _dist_vector(graph: MeasuredGraph) -> np.ndarray:
    dist = graph.distances_from(graph.root)
    return np.array([dist[v] for v in graph.vertices], dtype=int)


def _fully_complete(graph: MeasuredGraph) -> bool:
    return len(graph.complete) == len(graph.vertices)


def _tails_available(graph: MeasuredGraph, *fields: FunctionField) -> bool:
    """True when analytic tails apply: a geometric-sphere-mass family with
    closed-form fields, or a fully specified finite graph (trivial tails)."""
    if _fully_complete(graph):
        return True
    fam = graph.family
    return (
        fam is not None
        and fam.geometric
        and all(f.radial is not None for f in fields)
    )


class _Integrator:
    """Shared state for the integral estimates of one check call.

    ``depth`` limits the exact partial sums to vertices within that distance
    of the root; the analytic tail then covers every sphere beyond it.  On a
    fully specified finite graph the "tail" is just the exact remainder sum,
    so totals are exact whatever the depth.
    """

    def __init__(self, graph: MeasuredGraph, depth: Optional[int]):
        self.graph = graph
        self.mu = _mu_vector(graph)
        self.dist = _dist_vector(graph)
        self.complete = _fully_complete(graph)
        max_dist = int(self.dist.max())
        horizon = (
            graph.family.truncation_depth if graph.family is not None else max_dist
        )
        self.depth = horizon if depth is None else min(int(depth), horizon)
        self.mask = self.dist <= self.depth

    def integral(
        self, name: str, integrand: np.ndarray, form: Optional[RadialForm]
    ) -> IntegralEstimate:
        partial = float(self.mu[self.mask] @ integrand[self.mask])
        if self.complete:
            remainder = float(self.mu[~self.mask] @ integrand[~self.mask])
            return IntegralEstimate(name, partial, TailEstimate.exactly(remainder))
        fam = self.graph.family
        if form is not None and fam is not None and fam.geometric:
            return IntegralEstimate(name, partial, tail_sum(form, fam, self.depth))
        return IntegralEstimate(name, partial, None)


_SAMPLE_WINDOW = 200  # spheres probed beyond truncation when ordering is undecidable


# ---------------------------------------------------------------------------
# condition 1: ordering + weighted integrability
# ---------------------------------------------------------------------------


@dataclass
class C1Report:
    """Outcome of the ordering/integrability check  g ≤ h < 0,
    ∫|h| dμ < ∞, ∫ g²/|h| dμ < ∞."""

    verdict: str  # "satisfied" | "satisfied_on_truncation" | "violated"
    pointwise_ok: bool
    ordering_proven: bool
    h_l1: IntegralEstimate
    g2_over_h: IntegralEstimate
    c1_bound: Optional[float]  # 4·∫ g²/|h| dμ when that total is finite
    c1_bound_partial: float  # same bound from the scanned partial sum only
    divergent: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "pointwise_ok": self.pointwise_ok,
            "ordering_proven": self.ordering_proven,
            "h_l1": self.h_l1.as_dict(),
            "g2_over_h": self.g2_over_h.as_dict(),
            "c1_bound": None if self.c1_bound is None else float(self.c1_bound),
            "c1_bound_partial": float(self.c1_bound_partial),
            "divergent": list(self.divergent),
            "notes": list(self.notes),
        }


def check_c1(
    graph: MeasuredGraph,
    g_field: FunctionField,
    h_field: FunctionField,
    depth: Optional[int] = None,
) -> C1Report:
    """Check  g ≤ h < 0  with ∫|h| dμ and ∫ g²/|h| dμ finite.

    The two integrals feed the a-priori estimate
    ∫ f² dμ ≤ 4 ∫ g²/|h| dμ  reported as ``c1_bound``.  ``depth`` caps the
    exact partial sums at that distance from the root (default: everything
    available); tails cover the rest where a formula exists.  The verdict
    "satisfied" means the ordering holds everywhere — proven beyond the scan,
    not sampled — and both integrals are finite.  "satisfied_on_truncation"
    means the scanned data passes but the global claim is not certified.
    The pointwise scan itself always covers every available vertex.
    """
    g_field, h_field = parse_field(g_field), parse_field(h_field)
    notes: List[str] = []
    divergent: List[str] = []

    g_vals = g_field.evaluate(graph).values
    h_vals = h_field.evaluate(graph).values

    pointwise_ok = bool(np.all(h_vals < 0.0) and np.all(g_vals <= h_vals))
    if not pointwise_ok:
        bad_h = int(np.sum(h_vals >= 0.0))
        bad_ord = int(np.sum(g_vals > h_vals))
        if bad_h:
            notes.append(f"h >= 0 at {bad_h} vertex/vertices of the scan")
        if bad_ord:
            notes.append(f"g > h at {bad_ord} vertex/vertices of the scan")

    tails = _tails_available(graph, g_field, h_field)
    radial_tails = tails and not _fully_complete(graph)
    box = _Integrator(graph, depth)

    h_l1 = box.integral(
        "h_l1", np.abs(h_vals), h_field.radial.abs() if radial_tails else None
    )
    if h_l1.divergent:
        divergent.append("h_l1")

    # ∫ g²/|h| dμ  (guard the division; a zero of h already fails pointwise)
    safe = np.abs(h_vals) > 0.0
    integrand = np.zeros_like(g_vals)
    integrand[safe] = g_vals[safe] ** 2 / np.abs(h_vals[safe])
    if not np.all(safe):
        notes.append("g²/|h| partial sum skips vertices where h = 0")
    g2h_form = (
        g_field.radial.squared().over(h_field.radial.abs())
        if radial_tails and h_field.radial.amplitude != 0.0
        else None
    )
    g2_over_h = box.integral("g2_over_h", integrand, g2h_form)
    if g2_over_h.divergent:
        divergent.append("g2_over_h")

    # ordering beyond the scanned vertices
    ordering_proven = False
    if pointwise_ok and _fully_complete(graph):
        ordering_proven = True  # nothing beyond the scan exists
    elif pointwise_ok and radial_tails:
        dec_ord = radial_le(g_field.radial, h_field.radial)
        dec_neg = h_field.radial.amplitude < 0.0  # profile sign = amplitude sign
        if dec_ord is True and dec_neg:
            ordering_proven = True
        elif dec_ord is False:
            pointwise_ok = False
            notes.append("ordering g <= h fails on spheres beyond the truncation")
        else:
            T = graph.family.truncation_depth
            sample = range(T + 1, T + 1 + _SAMPLE_WINDOW)
            ok = all(
                g_field.value_at(n) <= h_field.value_at(n) < 0.0 for n in sample
            )
            if ok:
                notes.append(
                    f"ordering beyond truncation sampled on {_SAMPLE_WINDOW} spheres, not proven"
                )
            else:
                pointwise_ok = False
                notes.append(
                    "ordering g <= h < 0 fails on a sampled sphere beyond the truncation"
                )

    c1_bound_partial = 4.0 * g2_over_h.partial
    c1_bound = None if g2_over_h.total is None else 4.0 * g2_over_h.total

    if not pointwise_ok or divergent:
        verdict = "violated"
    elif ordering_proven and h_l1.has_total and g2_over_h.has_total:
        verdict = "satisfied"
    else:
        verdict = "satisfied_on_truncation"
        if not tails:
            notes.append("no tail formulas for this graph/field combination")

    return C1Report(
        verdict=verdict,
        pointwise_ok=pointwise_ok,
        ordering_proven=ordering_proven,
        h_l1=h_l1,
        g2_over_h=g2_over_h,
        c1_bound=c1_bound,
        c1_bound_partial=c1_bound_partial,
        divergent=divergent,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# condition 2: spectral gap + L¹/L² data
# ---------------------------------------------------------------------------


@dataclass
class C2Report:
    """Outcome of the spectral-gap check: h ≤ 0 with h ∈ L¹ and g ∈ L² on a
    graph whose truncated Dirichlet gaps stay bounded below."""

    verdict: str  # "satisfied" | "satisfied_on_truncation" | "violated" | "inconclusive"
    h_nonpositive: bool
    h_l1: IntegralEstimate
    g_l2_sq: IntegralEstimate
    cheeger_verdict: Optional[str]
    lambda_floor: Optional[float]
    l2_bound: Optional[float]  # uniform bound on ‖f‖_{L²}
    l2_mass_bound: Optional[float]  # its square, bounds ∫ f² dμ
    divergent: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "h_nonpositive": self.h_nonpositive,
            "h_l1": self.h_l1.as_dict(),
            "g_l2_sq": self.g_l2_sq.as_dict(),
            "cheeger_verdict": self.cheeger_verdict,
            "lambda_floor": None if self.lambda_floor is None else float(self.lambda_floor),
            "l2_bound": None if self.l2_bound is None else float(self.l2_bound),
            "l2_mass_bound": None
            if self.l2_mass_bound is None
            else float(self.l2_mass_bound),
            "divergent": list(self.divergent),
            "notes": list(self.notes),
        }


def uniform_l2_bound(h_l1: float, g_l2: float, lam: float) -> float:
    """Solve the scalar quadratic  λX² ≤ 2‖h‖₁ + 2‖g‖₂·X  for X = ‖f‖₂.

    The inequality comes from testing the equation against f, discarding the
    non-positive exponential term, bounding the Dirichlet part through the
    gap λ, and Cauchy–Schwarz on the source term.  Its positive root bounds
    every truncated solution at once.
    """
    if lam <= 0.0:
        raise ValueError("uniform L2 bound needs a positive spectral gap")
    A = 2.0 * h_l1 / lam
    B = 2.0 * g_l2 / lam
    return 0.5 * (B + math.sqrt(B * B + 4.0 * A))


def check_c2(
    graph: MeasuredGraph,
    g_field: FunctionField,
    h_field: FunctionField,
    depth: Optional[int] = None,
    exhaustion=None,
    cheeger: Optional[CheegerReport] = None,
    margin: float = 1e-6,
) -> C2Report:
    """Check  h ≤ 0, h ∈ L¹(μ), g ∈ L²(μ)  plus a persistent Dirichlet gap.

    Pass either a precomputed spectral scan (``cheeger``) or an exhaustion to
    scan here.  When the scan's verdict is "empirically-cheeger" the uniform
    L² bound is evaluated at the smallest observed gap; any other verdict
    leaves the check inconclusive, because the bound degenerates as λ → 0.
    """
    g_field, h_field = parse_field(g_field), parse_field(h_field)
    notes: List[str] = []
    divergent: List[str] = []

    g_vals = g_field.evaluate(graph).values
    h_vals = h_field.evaluate(graph).values

    h_nonpositive = bool(np.all(h_vals <= 0.0))
    if not h_nonpositive:
        notes.append(f"h > 0 at {int(np.sum(h_vals > 0.0))} vertex/vertices")
    tails = _tails_available(graph, g_field, h_field)
    radial_tails = tails and not _fully_complete(graph)
    sign_proven = h_nonpositive and (
        _fully_complete(graph)
        or (radial_tails and h_field.radial.amplitude <= 0.0)
    )
    if h_nonpositive and not sign_proven:
        notes.append("sign of h beyond the truncation not certified")

    box = _Integrator(graph, depth)
    h_l1 = box.integral(
        "h_l1", np.abs(h_vals), h_field.radial.abs() if radial_tails else None
    )
    if h_l1.divergent:
        divergent.append("h_l1")
    g_l2_sq = box.integral(
        "g_l2_sq", g_vals ** 2, g_field.radial.squared() if radial_tails else None
    )
    if g_l2_sq.divergent:
        divergent.append("g_l2_sq")

    if cheeger is None and exhaustion is not None:
        cheeger = cheeger_scan(exhaustion, margin=margin)
    cheeger_verdict = None if cheeger is None else cheeger.verdict
    lambda_floor = None if cheeger is None else cheeger.lambda_floor

    l2_bound = None
    l2_mass_bound = None
    if (
        cheeger_verdict == "empirically-cheeger"
        and lambda_floor is not None
        and lambda_floor > 0.0
        and not divergent
    ):
        l2_bound = uniform_l2_bound(
            h_l1.best(), math.sqrt(g_l2_sq.best()), lambda_floor
        )
        l2_mass_bound = l2_bound ** 2

    if not h_nonpositive or divergent:
        verdict = "violated"
    elif cheeger_verdict != "empirically-cheeger":
        verdict = "inconclusive"
        if cheeger is None:
            notes.append("no spectral scan supplied; gap persistence unknown")
        else:
            notes.append(f"spectral scan verdict: {cheeger_verdict}")
    elif sign_proven and h_l1.has_total and g_l2_sq.has_total:
        verdict = "satisfied"
    else:
        verdict = "satisfied_on_truncation"
        if not tails:
            notes.append("no tail formulas for this graph/field combination")

    return C2Report(
        verdict=verdict,
        h_nonpositive=h_nonpositive,
        h_l1=h_l1,
        g_l2_sq=g_l2_sq,
        cheeger_verdict=cheeger_verdict,
        lambda_floor=lambda_floor,
        l2_bound=l2_bound,
        l2_mass_bound=l2_mass_bound,
        divergent=divergent,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# constant-source reductions
# ---------------------------------------------------------------------------


@dataclass
class CorollaryReport:
    """Reductions available when the source g is a constant c.

    Three special cases are recognized, each reducing to one of the two main
    conditions under simpler, directly checkable premises:

    * ``integrable_reciprocal``:  c ≤ h < 0 with both h and 1/h in L¹(μ)
      (implies the ordering/integrability condition, since
      ∫ g²/|h| = c²·∫ 1/|h|).
    * ``finite_volume``:  μ(V) < ∞ and c ≤ h ≤ −ε for some ε > 0
      (both integrals then bounded by multiples of the volume; this is the
      reduction that covers measure-collapsing chains).
    * ``zero_source``:  c = 0, h ≤ 0, h ∈ L¹, persistent spectral gap
      (the spectral-gap condition with the source term dropped).

    Whenever a reduction applies, the corresponding main check is re-run and
    its verdict recorded as a cross-check.
    """

    constant_g: Optional[float]
    entries: Dict[str, dict] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def fired(self) -> List[str]:
        return [k for k, e in self.entries.items() if e.get("applicable")]

    def as_dict(self) -> dict:
        return {
            "constant_g": None if self.constant_g is None else float(self.constant_g),
            "entries": self.entries,
            "fired": self.fired(),
            "notes": list(self.notes),
        }


def check_corollary_scenarios(
    graph: MeasuredGraph,
    g_field,
    h_field: FunctionField,
    depth: Optional[int] = None,
    exhaustion=None,
    cheeger: Optional[CheegerReport] = None,
) -> CorollaryReport:
    """Detect the constant-source special cases and cross-check them against
    the main condition checks (see :class:`CorollaryReport`).

    ``g_field`` may be a bare number (the constant c) or any field spec; a
    non-constant g simply means no reduction applies.
    """
    g_field, h_field = parse_field(g_field), parse_field(h_field)
    c = g_field.constant_value()
    report = CorollaryReport(constant_g=c)
    if c is None:
        report.notes.append("g is not constant; no reduction applies")
        return report

    h_vals = h_field.evaluate(graph).values
    tails = _tails_available(graph, g_field, h_field)
    radial_tails = tails and not _fully_complete(graph)
    box = _Integrator(graph, depth)

    # --- integrable reciprocal: c <= h < 0, h in L1, 1/h in L1 -------------
    entry: dict = {}
    h_neg = bool(np.all(h_vals < 0.0))
    ord_ok = bool(np.all(c <= h_vals))
    h_l1 = box.integral(
        "h_l1", np.abs(h_vals), h_field.radial.abs() if radial_tails else None
    )
    safe = np.abs(h_vals) > 0.0
    recip = np.zeros_like(h_vals)
    recip[safe] = 1.0 / np.abs(h_vals[safe])
    recip_form = (
        RadialForm(1.0).over(h_field.radial.abs())
        if radial_tails and h_field.radial.amplitude != 0.0
        else None
    )
    h_recip_l1 = box.integral("h_recip_l1", recip, recip_form)
    applicable = h_neg and ord_ok and h_l1.has_total and h_recip_l1.has_total
    entry.update(
        {
            "applicable": applicable,
            "h_negative": h_neg,
            "ordering_ok": ord_ok,
            "h_l1": h_l1.as_dict(),
            "h_recip_l1": h_recip_l1.as_dict(),
        }
    )
    if applicable:
        c1 = check_c1(graph, g_field, h_field, depth)
        entry["implied_c1_bound"] = None if h_recip_l1.total is None else float(
            4.0 * c * c * h_recip_l1.total
        )
        entry["cross_check"] = {
            "check": "c1",
            "verdict": c1.verdict,
            "agrees": c1.verdict in ("satisfied", "satisfied_on_truncation"),
        }
    report.entries["integrable_reciprocal"] = entry

    # --- finite volume with pinched h: mu(V) < inf, c <= h <= -eps ---------
    entry = {}
    vol = box.integral(
        "volume", np.ones_like(h_vals), RadialForm(1.0) if radial_tails else None
    )
    eps = None
    if h_field.radial is not None:
        sup_h = h_field.radial.supremum()
        if sup_h < 0.0:
            eps = -sup_h
    else:
        vals = list(h_field.params["values"]) + [h_field.params["default"]]
        m = max(vals)
        if m < 0.0:
            eps = -m
    applicable = vol.has_total and eps is not None and ord_ok
    entry.update(
        {
            "applicable": applicable,
            "volume": vol.as_dict(),
            "eps": None if eps is None else float(eps),
            "ordering_ok": ord_ok,
        }
    )
    if applicable:
        c1 = check_c1(graph, g_field, h_field, depth)
        entry["cross_check"] = {
            "check": "c1",
            "verdict": c1.verdict,
            "agrees": c1.verdict in ("satisfied", "satisfied_on_truncation"),
        }
    report.entries["finite_volume"] = entry

    # --- zero source with a spectral gap ------------------------------------
    entry = {}
    if c == 0.0:
        c2 = check_c2(
            graph, g_field, h_field, depth, exhaustion=exhaustion, cheeger=cheeger
        )
        applicable = c2.verdict in ("satisfied", "satisfied_on_truncation")
        entry.update(
            {
                "applicable": applicable,
                "cross_check": {
                    "check": "c2",
                    "verdict": c2.verdict,
                    "agrees": applicable,
                },
            }
        )
        if c2.l2_bound is not None:
            entry["implied_l2_bound"] = float(c2.l2_bound)
    else:
        entry.update({"applicable": False, "reason": "g is a nonzero constant"})
    report.entries["zero_source"] = entry

    return report


# ---------------------------------------------------------------------------
# the combined report
# ---------------------------------------------------------------------------


@dataclass
class HypothesisReport:
    """Both condition checks, the constant-source reductions, and the overall
    classification of which existence route applies to the data.

    ``theorem_applicable`` counts only fully certified verdicts ("satisfied");
    data that merely passes on the truncation keeps its caveat and classifies
    as "neither" here, with the sub-verdicts telling the full story.
    """

    c1: C1Report
    c2: C2Report
    corollaries: CorollaryReport
    theorem_applicable: str  # "C-1" | "C-2" | "both" | "neither"

    def as_dict(self) -> dict:
        return {
            "c1": self.c1.as_dict(),
            "c2": self.c2.as_dict(),
            "corollaries": self.corollaries.as_dict(),
            "theorem_applicable": self.theorem_applicable,
        }


def check_hypotheses(
    graph: MeasuredGraph,
    g_field,
    h_field,
    depth: Optional[int] = None,
    exhaustion=None,
    cheeger: Optional[CheegerReport] = None,
    margin: float = 1e-6,
) -> HypothesisReport:
    """Run every hypothesis check on (graph, g, h) and classify the result."""
    g_field, h_field = parse_field(g_field), parse_field(h_field)
    c1 = check_c1(graph, g_field, h_field, depth)
    c2 = check_c2(
        graph, g_field, h_field, depth, exhaustion=exhaustion, cheeger=cheeger,
        margin=margin,
    )
    cors = check_corollary_scenarios(
        graph, g_field, h_field, depth, exhaustion=exhaustion, cheeger=cheeger
    )
    a1 = c1.verdict == "satisfied"
    a2 = c2.verdict == "satisfied"
    theorem = "both" if (a1 and a2) else "C-1" if a1 else "C-2" if a2 else "neither"
    return HypothesisReport(c1=c1, c2=c2, corollaries=cors, theorem_applicable=theorem)
