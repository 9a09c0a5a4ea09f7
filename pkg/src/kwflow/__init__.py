"""Heat-flow construction of solutions to Δf + h·e^f = g on weighted graphs.

The package solves the semilinear equation on an infinite weighted measured
graph by relaxing a gradient flow on each ball of an exhaustion, verifying
every level against an independent damped-Newton oracle, tracking the level
solutions at probe vertices, and checking the a-priori bounds that make the
limit exist: either a pointwise ordering g ≤ h < 0 with an integrability
budget, or a uniform Dirichlet spectral gap with (g, h) in the right
integrability classes.

Entry points: :func:`solve_kw` / :func:`solve_config` for the pipeline,
:func:`check_hypotheses` for classification only, :func:`cheeger_scan`
for the gap scan, and the ``kwflow`` console script.
"""

from .calculus import (
    OperatorContext,
    boundary_potential,
    dirichlet_identity,
    gradient_norm,
    green_identity,
    integral,
    laplacian,
)
from .conditions import (
    C1Report,
    C2Report,
    CorollaryReport,
    FunctionField,
    HypothesisReport,
    IntegralEstimate,
    RadialForm,
    TailEstimate,
    check_c1,
    check_c2,
    check_corollary_scenarios,
    check_hypotheses,
    parse_field,
    tail_sum,
    uniform_l2_bound,
)
from .driver import (
    LimitReport,
    RunResult,
    emit_reports,
    load_config,
    load_results,
    normalize_config,
    solve_config,
    solve_kw,
)
from .errors import (
    ExhaustionError,
    GraphSpecError,
    HypothesisError,
    IncompleteDataError,
    KwflowError,
    NonConvergenceError,
    OverflowAbort,
    SolverBreakdownError,
    StiffnessError,
)
from .flow import FlowConfig, LevelSolution, relax, residual_lazy
from .graphs import (
    Exhaustion,
    FamilyInfo,
    Level,
    MeasuredGraph,
    VertexFunction,
    ball_exhaustion,
    build_graph,
    vertex_key,
)
from .newton import NewtonReport, newton_solve
from .scenarios import SCENARIOS, get_scenario, scenario_names
from .spectral import (
    CheegerReport,
    LevelGap,
    cheeger_scan,
    dirichlet_lambda1,
    dirichlet_lambda1_dense,
)

__version__ = "0.1.0"

__all__ = [
    "OperatorContext", "boundary_potential", "dirichlet_identity",
    "gradient_norm", "green_identity", "integral", "laplacian",
    "C1Report", "C2Report", "CorollaryReport", "FunctionField",
    "HypothesisReport", "IntegralEstimate", "RadialForm", "TailEstimate",
    "check_c1", "check_c2", "check_corollary_scenarios", "check_hypotheses",
    "parse_field", "tail_sum", "uniform_l2_bound",
    "LimitReport", "RunResult", "emit_reports", "load_config",
    "load_results", "normalize_config", "solve_config", "solve_kw",
    "ExhaustionError", "GraphSpecError", "HypothesisError",
    "IncompleteDataError", "KwflowError", "NonConvergenceError",
    "OverflowAbort", "SolverBreakdownError", "StiffnessError",
    "FlowConfig", "LevelSolution", "relax", "residual_lazy",
    "Exhaustion", "FamilyInfo", "Level", "MeasuredGraph", "VertexFunction",
    "ball_exhaustion", "build_graph", "vertex_key",
    "NewtonReport", "newton_solve",
    "SCENARIOS", "get_scenario", "scenario_names",
    "CheegerReport", "LevelGap", "cheeger_scan", "dirichlet_lambda1",
    "dirichlet_lambda1_dense",
    "__version__",
]
