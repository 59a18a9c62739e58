"""Contradiction-free construction of multi-context models.

A new context splits into an induced part (variables already covered) and a
fresh part. It can be assigned freely only when the induced part lies inside
one existing context and agrees with that context's marginal; the fresh part
is then an unconstrained conditional.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ValidationError
from .identify import MarginalConstraint, build_overlap_graph, marginal_constraints
from .intra import marginalize
from .lp import LinearProgram, solve_lp
from .model import MCM, Context, DomainSpec, validate_context

EMPTY, SINGLE, SPANNING = "empty", "single", "spanning"


@dataclass(frozen=True)
class ScopeClassification:
    induced_vars: frozenset[str]
    fresh_vars: frozenset[str]
    host: str  # "empty" | "spanning" | "single"
    host_id: str | None = None


class RejectedContext(ValidationError):
    """A context cannot be freely assigned. ``reason`` is spanning, mismatch or invalid."""

    def __init__(self, reason: str, message: str, atom=None):
        self.reason = reason
        self.atom = atom
        super().__init__([message], code=f"free_assignment_{reason}")


def classify_scope(mcm: MCM, scope: Iterable[str]) -> ScopeClassification:
    scope = frozenset(scope)
    if not scope:
        raise ValidationError(["scope must be nonempty"])
    mcm.domain.ordered(scope)  # raises on unknown names
    induced = scope & mcm.covered
    fresh = scope - induced
    if not induced:
        return ScopeClassification(induced, fresh, EMPTY)
    for ctx in mcm.contexts:
        if induced <= ctx.variables:
            return ScopeClassification(induced, fresh, SINGLE, ctx.id)
    return ScopeClassification(induced, fresh, SPANNING)


def add_context_free(mcm: MCM, context: Context, tolerance: Fraction = Fraction(0)) -> MCM:
    """Append ``context`` if it can be freely assigned, else raise :class:`RejectedContext`.

    ``tolerance`` bounds the accepted per-atom gap between the induced
    marginal and the host's marginal; the default demands exact equality.
    """
    problems = validate_context(mcm.domain, context)
    if any(c.id == context.id for c in mcm.contexts):
        problems.append(f"duplicate context id {context.id!r}")
    if problems:
        raise RejectedContext("invalid", "; ".join(problems))

    cls = classify_scope(mcm, context.scope)
    if cls.host == SPANNING:
        raise RejectedContext(
            "spanning",
            f"induced part spans multiple contexts ({', '.join(sorted(cls.induced_vars))}); "
            "not freely assignable",
        )
    if cls.host == SINGLE:
        induced = [n for n in context.scope if n in cls.induced_vars]
        ours = marginalize(context, induced)
        theirs = marginalize(mcm.context(cls.host_id), induced)
        for atom, p in ours.entries.items():
            q = theirs[tuple(atom[ours.scope.index(n)] for n in theirs.scope)]
            if abs(p - q) > tolerance:
                where = ",".join(f"{n}={v}" for n, v in zip(ours.scope, atom))
                raise RejectedContext(
                    "mismatch",
                    f"induced marginal mismatch at ({where}): {p} vs {q} in {cls.host_id}",
                    atom=dict(zip(ours.scope, atom)),
                )
    return mcm.with_context(context)


def _step_ok(scope: frozenset[str], prior: Sequence[frozenset[str]]) -> bool:
    covered = frozenset().union(*prior) if prior else frozenset()
    induced = scope & covered
    return not induced or any(induced <= s for s in prior)


def order_is_free(scopes: Sequence[Iterable[str]]) -> bool:
    """True when assigning ``scopes`` in the given order never hits a spanning induced part."""
    scopes = [frozenset(s) for s in scopes]
    return all(_step_ok(s, scopes[:i]) for i, s in enumerate(scopes))


def plan_free_order(domain: DomainSpec, scopes: Sequence[Iterable[str]]) -> list[int] | None:
    """Find an order (as input indices) in which every scope is freely assignable.

    Depth-first over permutations, lowest index first, memoizing placed sets
    known to be dead ends. Returns None when no order exists.
    """
    scopes = [frozenset(s) for s in scopes]
    if not scopes:
        raise ValidationError(["no scopes given"])
    for s in scopes:
        if not s:
            raise ValidationError(["scopes must be nonempty"])
        domain.ordered(s)
    dead: set[frozenset[int]] = set()

    def extend(order: list[int]) -> list[int] | None:
        if len(order) == len(scopes):
            return order
        placed = frozenset(order)
        if placed in dead:
            return None
        prior = [scopes[i] for i in order]
        for i in range(len(scopes)):
            if i not in placed and _step_ok(scopes[i], prior):
                found = extend(order + [i])
                if found is not None:
                    return found
        dead.add(placed)
        return None

    return extend([])


@dataclass(frozen=True)
class ConsistencyReport:
    feasible: bool
    # minimal set of context ids whose tables admit no common joint
    witness: tuple[str, ...] = ()
    detail: str = ""


def _component_feasible(mcm: MCM, ids: Sequence[str], budget: int | None) -> bool:
    ctxs = [mcm.context(i) for i in ids]
    scope = mcm.domain.ordered(frozenset().union(*(c.variables for c in ctxs)))
    items = [MarginalConstraint(c.id, c.scope, c.table) for c in ctxs]
    rows = marginal_constraints(mcm.domain, scope, items, budget)
    n = len(rows[0].coeffs)
    return solve_lp(LinearProgram(n, rows, (0,) * n)).status != "infeasible"


def check_global_consistency(mcm: MCM, atom_budget: int | None = None) -> ConsistencyReport:
    """Decide whether one joint distribution reproduces every context table.

    Each connected component of the overlap graph is checked separately. For
    an infeasible component, a deletion filter shrinks it to a minimal
    infeasible subset of contexts.
    """
    graph = build_overlap_graph(mcm)
    for comp in graph.components():
        if len(comp) == 1 or _component_feasible(mcm, comp, atom_budget):
            continue
        core = list(comp)
        for cid in comp:
            trial = [c for c in core if c != cid]
            if trial and not _component_feasible(mcm, trial, atom_budget):
                core = trial
        names = mcm.domain.ordered(frozenset().union(*(mcm.context(c).variables for c in core)))
        detail = f"no joint distribution over {list(names)} matches contexts {core}"
        return ConsistencyReport(False, tuple(core), detail)
    return ConsistencyReport(True)


def pairwise_consistent(mcm: MCM) -> list[str]:
    """Overlap check: pairs of contexts whose shared marginals differ."""
    problems = []
    ctxs = mcm.contexts
    for i, a in enumerate(ctxs):
        for b in ctxs[i + 1:]:
            shared = [n for n in a.scope if n in b.variables]
            if shared and _keyed(marginalize(a, shared)) != _keyed(marginalize(b, shared)):
                problems.append(f"contexts {a.id} and {b.id} disagree on the marginal of {shared}")
    return problems


def _keyed(table) -> dict:
    return {frozenset(zip(table.scope, atom)): p for atom, p in table.entries.items()}
