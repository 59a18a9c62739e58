"""Inter-contextual query answering.

A query ``P(target | evidence)`` is answered by an interval of the values it
takes over every joint distribution consistent with the model. The
authoritative route is a linear-fractional program over the joint atoms of
the identified variables. Closed-form rules handle the disjoint and
two-context overlap topologies directly; an intra-contextual query is a
point value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    BudgetExceededError,
    ImpossibleEvidenceError,
    InconsistentModelError,
    ValidationError,
)
from .identify import (
    MarginalConstraint,
    MarginalConstraintSet,
    build_overlap_graph,
    check_query_coverage,
    marginal_constraints,
    relevant_components,
    relevant_vars,
    restrict_constraints,
)
from .intra import assignment_prob, conditional_prob, event_prob
from .lp import Constraint, LinearProgram, solve_linear_fractional_senses, solve_lp, solve_lp_objectives
from .model import MCM, DomainSpec, Event, Interval, Query

DEFAULT_ATOM_BUDGET = 65536
METHODS = ("auto", "lp", "closed-form", "oracle")
ZERO_DENOMINATOR_NOTE = "conditioning event can have probability 0 in some extensions"
DEGENERATE_CHAIN_NOTE = "inner bound degenerate"


def positive_part(a: Fraction) -> Fraction:
    return a if a > 0 else Fraction(0)


def closed_form_disjoint(p_target: Fraction, p_evidence: Fraction, sense: str) -> Fraction:
    """Bound on ``P(T|E)`` when T and E live in unconnected contexts.

    Only the two marginals matter: the joint mass ``P(T,E)`` ranges over its
    Frechet interval ``[P(T)+P(E)-1, min(P(T),P(E))]``.
    """
    p_target, p_evidence = Fraction(p_target), Fraction(p_evidence)
    if p_evidence == 0:
        raise ImpossibleEvidenceError("evidence has probability 0")
    if sense == "min":
        return positive_part((p_target + p_evidence - 1) / p_evidence)
    if sense == "max":
        return min(p_target / p_evidence, Fraction(1))
    raise ValueError(f"unknown sense {sense!r}")


def closed_form_overlap(p_target_given_z: Fraction, p_evidence_given_z: Fraction, sense: str) -> Fraction:
    """Same rule as :func:`closed_form_disjoint`, applied inside the slice ``Z = z``
    where ``Z`` is the whole overlap of the two contexts."""
    return closed_form_disjoint(p_target_given_z, p_evidence_given_z, sense)


def inner_chain_bound(p_evidence: Fraction, p_r: Fraction) -> Fraction:
    """Lower bound on ``P(y|R)`` for ``y`` and ``R`` in unconnected contexts."""
    return closed_form_disjoint(p_evidence, p_r, "min")


def chained_bound(p_target_given_r: Fraction, p_evidence: Fraction, p_r: Fraction) -> Fraction:
    """Lower bound on ``P(x | y, R)`` with ``x, R`` in one context and ``y`` in another.

    The overlap rule ``[(P(x|R) - 1 + s) / s]+`` is increasing in
    ``s = P(y|R)``, so it is evaluated at the smallest admissible ``s``. When
    that inner bound is 0 the result is reported as 0.
    """
    p_target_given_r = Fraction(p_target_given_r)
    if Fraction(p_r) == 0:
        raise ImpossibleEvidenceError("P(R) = 0")
    v = inner_chain_bound(p_evidence, p_r)
    if v == 0:
        return Fraction(0)
    return positive_part((p_target_given_r - 1 + v) / v)


@dataclass(frozen=True)
class QueryPlan:
    identified: frozenset[str]
    method: str  # intra | closed_form_disjoint | closed_form_overlap | chained | lp | oracle
    constraint_set: MarginalConstraintSet | None = None
    # closed-form inputs, e.g. (P(T), P(E)) for the disjoint rule
    inputs: tuple[Fraction, ...] = ()
    notes: tuple[str, ...] = ()


def _components_by_context(mcm: MCM) -> dict[str, int]:
    graph = build_overlap_graph(mcm)
    return {cid: k for k, comp in enumerate(graph.components()) for cid in comp}


def _first_covering(mcm: MCM, names) -> str | None:
    names = set(names)
    for ctx in mcm.contexts:
        if names <= ctx.variables:
            return ctx.id
    return None


def _match_intra(mcm: MCM, query: Query):
    cid = _first_covering(mcm, query.variables)
    if cid is None:
        return None
    return (conditional_prob(mcm.context(cid), query.target, query.evidence),)


def _match_disjoint(mcm: MCM, query: Query, comp_of: dict[str, int]):
    if not query.evidence:
        return None
    a = _first_covering(mcm, query.target.variables)
    b = _first_covering(mcm, query.evidence.variables)
    if a is None or b is None or comp_of[a] == comp_of[b]:
        return None
    p_e = assignment_prob(mcm.context(b), query.evidence)
    if p_e == 0:
        raise ImpossibleEvidenceError(f"evidence {query.evidence} has probability 0")
    return event_prob(mcm.context(a), query.target), p_e


def _match_overlap(mcm: MCM, query: Query, comp_of: dict[str, int]):
    comps = {comp_of[c.id] for c in mcm.contexts if c.variables & query.variables}
    if len(comps) != 1:
        return None
    (k,) = comps
    members = [c for c in mcm.contexts if comp_of[c.id] == k]
    if len(members) != 2:
        return None
    first, second = members
    if not query.target.variables <= first.variables:
        first, second = second, first
    z = first.variables & second.variables
    t_vars, e_vars = query.target.variables, query.evidence.variables
    y_vars = e_vars - z
    if not (z <= e_vars and y_vars and t_vars <= first.variables - z and y_vars <= second.variables - z):
        return None
    z_assign = query.evidence.restricted(z)
    y_event = Event(query.evidence.restricted(y_vars))
    if assignment_prob(second, query.evidence) == 0:
        raise ImpossibleEvidenceError(f"evidence {query.evidence} has probability 0")
    return (
        conditional_prob(first, query.target, z_assign),
        conditional_prob(second, y_event, z_assign),
    )


def _match_chained(mcm: MCM, query: Query, comp_of: dict[str, int]):
    a = _first_covering(mcm, query.target.variables)
    if a is None:
        return None
    host = mcm.context(a)
    r_vars = query.evidence.variables & host.variables
    y_vars = query.evidence.variables - r_vars
    if not r_vars or not y_vars:
        return None
    b = _first_covering(mcm, y_vars)
    if b is None or comp_of[a] == comp_of[b]:
        return None
    r_assign = query.evidence.restricted(r_vars)
    p_r = assignment_prob(host, r_assign)
    p_y = assignment_prob(mcm.context(b), query.evidence.restricted(y_vars))
    if p_r == 0 or p_y == 0:
        raise ImpossibleEvidenceError(f"evidence {query.evidence} has probability 0")
    return conditional_prob(host, query.target, r_assign), p_y, p_r


def plan_query(mcm: MCM, query: Query, method: str = "auto") -> QueryPlan:
    """Choose how to answer ``query``.

    ``auto`` tries the intra-contextual, disjoint and overlap templates in
    that order and falls back to the reduced LP. ``closed-form`` also accepts
    the chained template and fails when nothing matches.
    """
    if method not in METHODS:
        raise ValidationError([f"method must be one of {METHODS}"])
    check_query_coverage(mcm, query)
    if method == "oracle":
        return QueryPlan(frozenset(oracle_scope(mcm, query)), "oracle")
    identified = relevant_vars(mcm, query)
    if method in ("auto", "closed-form"):
        comp_of = _components_by_context(mcm)
        found = _match_intra(mcm, query)
        if found is not None:
            return QueryPlan(identified, "intra", inputs=found)
        found = _match_disjoint(mcm, query, comp_of)
        if found is not None:
            return QueryPlan(identified, "closed_form_disjoint", inputs=found)
        found = _match_overlap(mcm, query, comp_of)
        if found is not None:
            return QueryPlan(identified, "closed_form_overlap", inputs=found)
        if method == "closed-form":
            found = _match_chained(mcm, query, comp_of)
            if found is not None:
                return QueryPlan(identified, "chained", inputs=found)
            raise ValidationError(["no closed-form template matches this query"], code="no_template")
    return QueryPlan(identified, "lp", restrict_constraints(mcm, identified))


def _atom_objectives(domain: DomainSpec, scope: Sequence[str], query: Query):
    evidence = query.evidence.items
    num, den = [], []
    for atom in domain.atoms(scope):
        values = dict(zip(scope, atom))
        ev_ok = all(values[n] == v for n, v in evidence)
        den.append(1 if ev_ok else 0)
        num.append(1 if ev_ok and query.target.holds(scope, atom) else 0)
    return num, den


def _fractional_bounds(
    domain: DomainSpec,
    scope: Sequence[str],
    rows: list[Constraint],
    query: Query,
    senses: Sequence[str],
) -> dict[str, Fraction]:
    num, den = _atom_objectives(domain, scope, query)
    if query.evidence:
        results = solve_linear_fractional_senses(num, den, rows, senses)
    else:
        results = dict(zip(senses, solve_lp_objectives(len(num), rows, [(num, s) for s in senses])))
    out = {}
    for sense in senses:
        res = results[sense]
        if res.status == "infeasible":
            raise InconsistentModelError("context tables admit no common joint distribution")
        if res.status == "denominator_zero":
            raise ImpossibleEvidenceError(f"evidence {query.evidence} is impossible in every extension")
        if res.status != "optimal":
            raise InconsistentModelError(f"unexpected LP status {res.status}")
        out[sense] = res.value
    return out


def _denominator_can_vanish(domain, scope, rows, query: Query, constraint_set) -> bool:
    if not query.evidence:
        return False
    if constraint_set is not None:
        for item in constraint_set.constraints:
            if query.evidence.variables <= set(item.scope):
                return False  # point value, already known positive
    _, den = _atom_objectives(domain, scope, query)
    res = solve_lp(LinearProgram(len(den), rows, den, "min"))
    return res.optimal and res.value == 0


def run_plan(
    mcm: MCM,
    query: Query,
    plan: QueryPlan,
    senses: Sequence[str] = ("min", "max"),
    atom_budget: int = DEFAULT_ATOM_BUDGET,
) -> tuple[dict[str, Fraction], tuple[str, ...]]:
    """Evaluate ``plan``; returns ``({sense: value}, notes)``."""
    notes = list(plan.notes)
    if plan.method == "intra":
        (v,) = plan.inputs
        return {s: v for s in senses}, tuple(notes)
    if plan.method in ("closed_form_disjoint", "closed_form_overlap"):
        p_t, p_e = plan.inputs
        return {s: closed_form_disjoint(p_t, p_e, s) for s in senses}, tuple(notes)
    if plan.method == "chained":
        p, p_y, p_r = plan.inputs
        if inner_chain_bound(p_y, p_r) == 0:
            notes.append(DEGENERATE_CHAIN_NOTE)
        out = {}
        for s in senses:
            # max via complement duality
            out[s] = chained_bound(p, p_y, p_r) if s == "min" else 1 - chained_bound(1 - p, p_y, p_r)
        return out, tuple(notes)
    if plan.method == "oracle":
        scope = mcm.domain.ordered(plan.identified)
        rows = _oracle_rows(mcm, query, scope, atom_budget)
        cset = None
    else:
        scope = plan.constraint_set.atom_scope
        rows = plan.constraint_set.to_constraints(mcm.domain, atom_budget)
        cset = plan.constraint_set
    values = _fractional_bounds(mcm.domain, scope, rows, query, senses)
    if _denominator_can_vanish(mcm.domain, scope, rows, query, cset):
        notes.append(ZERO_DENOMINATOR_NOTE)
    return values, tuple(notes)


def query_bounds(
    mcm: MCM,
    query: Query,
    method: str = "auto",
    atom_budget: int = DEFAULT_ATOM_BUDGET,
) -> Interval:
    """Lower and upper bound of ``P(target | evidence)`` over all consistent joints."""
    plan = plan_query(mcm, query, method)
    values, notes = run_plan(mcm, query, plan, ("min", "max"), atom_budget)
    return Interval(values["min"], values["max"], notes)


def bound(mcm: MCM, query: Query, sense: str, method: str = "auto",
          atom_budget: int = DEFAULT_ATOM_BUDGET) -> Fraction:
    plan = plan_query(mcm, query, method)
    return run_plan(mcm, query, plan, (sense,), atom_budget)[0][sense]


def oracle_scope(mcm: MCM, query: Query, whole_domain: bool = False) -> tuple[str, ...]:
    if whole_domain:
        return mcm.domain.names
    comps = relevant_components(mcm, query.variables)
    ids = {cid for comp in comps for cid in comp}
    names = frozenset().union(*(c.variables for c in mcm.contexts if c.id in ids))
    return mcm.domain.ordered(names | query.variables)


def _oracle_rows(mcm: MCM, query: Query, scope, atom_budget, whole_domain: bool = False):
    names = set(scope)
    items = [
        MarginalConstraint(c.id, c.scope, c.table)
        for c in mcm.contexts
        if whole_domain or c.variables <= names
    ]
    return marginal_constraints(mcm.domain, scope, items, atom_budget)


def oracle_bound(
    mcm: MCM,
    query: Query,
    sense: str,
    atom_budget: int = DEFAULT_ATOM_BUDGET,
    whole_domain: bool = False,
) -> Fraction:
    """Bound computed from every full context table, without variable identification.

    By default the joint ranges over all variables of the query's connected
    components; ``whole_domain`` uses every domain variable and every context.
    """
    check_query_coverage(mcm, query)
    scope = oracle_scope(mcm, query, whole_domain)
    if mcm.domain.atom_count(scope) > atom_budget:
        raise BudgetExceededError(
            f"{mcm.domain.atom_count(scope)} joint atoms exceed the budget of {atom_budget}"
        )
    rows = _oracle_rows(mcm, query, scope, atom_budget, whole_domain)
    return _fractional_bounds(mcm.domain, scope, rows, query, (sense,))[sense]


def oracle_interval(mcm: MCM, query: Query, atom_budget: int = DEFAULT_ATOM_BUDGET,
                    whole_domain: bool = False) -> Interval:
    check_query_coverage(mcm, query)
    scope = oracle_scope(mcm, query, whole_domain)
    rows = _oracle_rows(mcm, query, scope, atom_budget, whole_domain)
    values = _fractional_bounds(mcm.domain, scope, rows, query, ("min", "max"))
    return Interval(values["min"], values["max"])
