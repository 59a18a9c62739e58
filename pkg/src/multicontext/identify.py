"""Relevant-variable identification for inter-contextual queries.

The identified set is the query variables plus every overlap region inside
each connected component (of the context overlap graph) that holds a query
variable. Every other variable sits in exactly one context, or in a component
unrelated to the query, and can be re-attached by conditioning without
constraining the identified ones; dropping it leaves the bounds unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BudgetExceededError, ScopeError
from .intra import marginalize
from .lp import Constraint
from .model import MCM, DomainSpec, ProbTable, Query


@dataclass(frozen=True)
class OverlapGraph:
    nodes: tuple[str, ...]
    # (id_a, id_b) with id_a earlier in construction order -> shared variables
    edges: dict

    def neighbors(self, cid: str) -> list[str]:
        out = []
        for a, b in self.edges:
            if a == cid:
                out.append(b)
            elif b == cid:
                out.append(a)
        return out

    def components(self) -> list[tuple[str, ...]]:
        """Connected components, each listed in construction order."""
        order = {cid: i for i, cid in enumerate(self.nodes)}
        seen: set[str] = set()
        comps = []
        for start in self.nodes:
            if start in seen:
                continue
            stack, comp = [start], set()
            while stack:
                cid = stack.pop()
                if cid in comp:
                    continue
                comp.add(cid)
                stack.extend(self.neighbors(cid))
            seen |= comp
            comps.append(tuple(sorted(comp, key=order.__getitem__)))
        return comps

    def labels_within(self, component: Iterable[str]) -> frozenset[str]:
        component = set(component)
        out: set[str] = set()
        for (a, b), label in self.edges.items():
            if a in component and b in component:
                out |= label
        return frozenset(out)


def build_overlap_graph(mcm: MCM) -> OverlapGraph:
    ctxs = mcm.contexts
    edges = {}
    for i, a in enumerate(ctxs):
        for b in ctxs[i + 1:]:
            shared = a.variables & b.variables
            if shared:
                edges[(a.id, b.id)] = frozenset(shared)
    return OverlapGraph(tuple(c.id for c in ctxs), edges)


def relevant_components(mcm: MCM, names: Iterable[str], graph: OverlapGraph | None = None) -> list[tuple[str, ...]]:
    """Components containing a context that holds one of ``names``."""
    graph = graph or build_overlap_graph(mcm)
    names = set(names)
    hit = {c.id for c in mcm.contexts if c.variables & names}
    return [comp for comp in graph.components() if hit.intersection(comp)]


def check_query_coverage(mcm: MCM, query: Query) -> None:
    query.check(mcm.domain)
    missing = query.variables - mcm.covered
    if missing:
        raise ScopeError(f"query variables {sorted(missing)} belong to no context")


def relevant_vars(mcm: MCM, query: Query) -> frozenset[str]:
    check_query_coverage(mcm, query)
    graph = build_overlap_graph(mcm)
    identified = set(query.variables)
    for comp in relevant_components(mcm, query.variables, graph):
        identified |= graph.labels_within(comp)
    return frozenset(identified)


@dataclass(frozen=True)
class MarginalConstraint:
    context_id: str
    scope: tuple[str, ...]
    table: ProbTable


@dataclass(frozen=True)
class MarginalConstraintSet:
    atom_scope: tuple[str, ...]
    constraints: tuple[MarginalConstraint, ...]

    def to_constraints(self, domain: DomainSpec, budget: int | None = None) -> list[Constraint]:
        return marginal_constraints(domain, self.atom_scope, self.constraints, budget)


def restrict_constraints(mcm: MCM, identified: Iterable[str]) -> MarginalConstraintSet:
    identified = frozenset(identified)
    if not identified:
        raise ScopeError("identified variable set is empty")
    out = []
    for ctx in mcm.contexts:
        sub = [n for n in ctx.scope if n in identified]
        if sub:
            out.append(MarginalConstraint(ctx.id, tuple(sub), marginalize(ctx, sub)))
    return MarginalConstraintSet(mcm.domain.ordered(identified), tuple(out))


def atom_positions(domain: DomainSpec, atom_scope: Sequence[str], sub_scope: Sequence[str]) -> list[tuple[str, ...]]:
    """For each atom of ``atom_scope`` (mixed-radix order), its projection onto ``sub_scope``."""
    index = [atom_scope.index(n) for n in sub_scope]
    return [tuple(atom[i] for i in index) for atom in domain.atoms(atom_scope)]


def marginal_constraints(
    domain: DomainSpec,
    atom_scope: Sequence[str],
    items: Iterable[MarginalConstraint],
    budget: int | None = None,
) -> list[Constraint]:
    """Equality rows tying joint-atom masses to each marginal table.

    A normalization row is added only when no table is given (each table
    already sums to one).
    """
    atom_scope = tuple(atom_scope)
    size = domain.atom_count(atom_scope)
    if budget is not None and size > budget:
        raise BudgetExceededError(f"{size} joint atoms exceed the budget of {budget}")
    rows = []
    for item in items:
        keys = atom_positions(domain, atom_scope, item.scope)
        by_key: dict[tuple[str, ...], list[int]] = {k: [0] * size for k in item.table.entries}
        for j, k in enumerate(keys):
            by_key[k][j] = 1
        for k, p in item.table.entries.items():
            rows.append(Constraint(tuple(by_key[k]), "=", p))
    if not rows:
        rows.append(Constraint((1,) * size, "=", Fraction(1)))
    return rows
