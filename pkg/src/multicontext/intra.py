"""Exact inference inside one context by summation over its dense table."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .errors import ImpossibleEvidenceError, ScopeError
from .model import Assignment, Context, Event, ProbTable


def marginalize(context: Context | ProbTable, subset: Iterable[str]) -> ProbTable:
    """Project a context's table onto ``subset``.

    The result keeps the variable order of the source scope and lists its
    atoms in order of first appearance, which preserves mixed-radix order.
    """
    table = context.table if isinstance(context, Context) else context
    subset = set(subset)
    if not subset:
        raise ScopeError("cannot marginalize onto an empty set")
    outside = subset - set(table.scope)
    if outside:
        raise ScopeError(f"variables {sorted(outside)} are not in scope {list(table.scope)}")
    keep = [i for i, n in enumerate(table.scope) if n in subset]
    if len(keep) == len(table.scope):
        return table
    out: dict[tuple[str, ...], Fraction] = {}
    for atom, p in table.entries.items():
        key = tuple(atom[i] for i in keep)
        out[key] = out.get(key, Fraction(0)) + p
    return ProbTable(tuple(table.scope[i] for i in keep), out)


def _check_in_scope(table: ProbTable, names) -> None:
    outside = set(names) - set(table.scope)
    if outside:
        raise ScopeError(f"variables {sorted(outside)} are outside scope {list(table.scope)}")


def event_prob(context: Context | ProbTable, event: Event) -> Fraction:
    table = context.table if isinstance(context, Context) else context
    _check_in_scope(table, event.variables)
    return sum(
        (p for atom, p in table.entries.items() if event.holds(table.scope, atom)),
        Fraction(0),
    )


def assignment_prob(context: Context | ProbTable, assignment: Assignment) -> Fraction:
    """Probability that every binding in ``assignment`` holds; 1 for the empty assignment."""
    if not assignment:
        return Fraction(1)
    return event_prob(context, Event(assignment))


def _joint_prob(table: ProbTable, target: Event, evidence: Assignment) -> Fraction:
    ev = evidence.items
    total = Fraction(0)
    for atom, p in table.entries.items():
        values = dict(zip(table.scope, atom))
        if all(values[n] == v for n, v in ev) and target.holds(table.scope, atom):
            total += p
    return total


def conditional_prob(context: Context | ProbTable, target: Event, evidence: Assignment) -> Fraction:
    table = context.table if isinstance(context, Context) else context
    _check_in_scope(table, target.variables | evidence.variables)
    denominator = assignment_prob(table, evidence)
    if denominator == 0:
        raise ImpossibleEvidenceError(f"evidence {evidence} impossible within context")
    return _joint_prob(table, target, evidence) / denominator
