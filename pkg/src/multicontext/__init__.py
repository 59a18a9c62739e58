"""Multi-context models: partial probabilistic knowledge as overlapping
contexts with exact joint tables, and exact interval answers to queries."""

from .construct import (
    ScopeClassification,
    add_context_free,
    check_global_consistency,
    classify_scope,
    plan_free_order,
)
from .engine import (
    QueryPlan,
    chained_bound,
    closed_form_disjoint,
    closed_form_overlap,
    oracle_bound,
    plan_query,
    query_bounds,
)
from .errors import (
    BudgetExceededError,
    ImpossibleEvidenceError,
    InconsistentModelError,
    MCMError,
    ValidationError,
)
from .identify import build_overlap_graph, relevant_vars, restrict_constraints
from .intra import conditional_prob, event_prob, marginalize
from .lp import Constraint, LinearProgram, LPResult, solve_linear_fractional, solve_lp
from .model import (
    MCM,
    Assignment,
    Context,
    DomainSpec,
    Event,
    Interval,
    ProbTable,
    Query,
    Variable,
    event_atoms,
    validate_context,
)

__version__ = "0.1.0"

__all__ = [
    "add_context_free",
    "Assignment",
    "BudgetExceededError",
    "build_overlap_graph",
    "chained_bound",
    "check_global_consistency",
    "classify_scope",
    "closed_form_disjoint",
    "closed_form_overlap",
    "conditional_prob",
    "Constraint",
    "Context",
    "DomainSpec",
    "Event",
    "event_atoms",
    "event_prob",
    "ImpossibleEvidenceError",
    "InconsistentModelError",
    "Interval",
    "LinearProgram",
    "LPResult",
    "marginalize",
    "MCM",
    "MCMError",
    "oracle_bound",
    "plan_free_order",
    "plan_query",
    "ProbTable",
    "Query",
    "query_bounds",
    "QueryPlan",
    "relevant_vars",
    "restrict_constraints",
    "ScopeClassification",
    "solve_linear_fractional",
    "solve_lp",
    "validate_context",
    "ValidationError",
    "Variable",
]
