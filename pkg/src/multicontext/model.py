"""Domain, assignment, event, table, context and multi-context model types.

All probabilities are :class:`fractions.Fraction` values. Tables are dense:
one entry per joint assignment of the scope, keyed by the tuple of value
names aligned with the scope.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ScopeError, ValidationError


def as_fraction(value) -> Fraction:
    """Parse an exact rational from ``"p/q"``, a decimal string, an int or a Fraction.

    Binary floats are rejected: they cannot carry an exact probability.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    raise TypeError(f"expected a rational string, int or Fraction, got {type(value).__name__}")


@dataclass(frozen=True)
class Variable:
    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.name:
            raise ValidationError(["variable name must be nonempty"])
        if len(self.values) < 2:
            raise ValidationError([f"variable {self.name!r} needs at least two values"])
        if len(set(self.values)) != len(self.values):
            raise ValidationError([f"variable {self.name!r} has duplicate value names"])

    @property
    def cardinality(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class DomainSpec:
    variables: tuple[Variable, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if not self.variables:
            raise ValidationError(["domain must contain at least one variable"])
        index = {}
        for i, var in enumerate(self.variables):
            if var.name in index:
                raise ValidationError([f"duplicate variable name {var.name!r}"])
            index[var.name] = i
        object.__setattr__(self, "_index", MappingProxyType(index))

    @classmethod
    def binary(cls, names: Iterable[str]) -> "DomainSpec":
        """Domain of binary variables valued ``"0"``/``"1"``."""
        return cls(tuple(Variable(n, ("0", "1")) for n in names))

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __getitem__(self, name: str) -> Variable:
        try:
            return self.variables[self._index[name]]
        except KeyError:
            raise ScopeError(f"unknown variable {name!r}") from None

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def position(self, name: str) -> int:
        return self._index[name]

    def ordered(self, names: Iterable[str]) -> tuple[str, ...]:
        """Return ``names`` sorted by declaration order."""
        names = set(names)
        for n in names:
            if n not in self._index:
                raise ScopeError(f"unknown variable {n!r}")
        return tuple(sorted(names, key=self._index.__getitem__))

    def atoms(self, scope: Sequence[str]) -> Iterator[tuple[str, ...]]:
        """Joint assignments of ``scope`` in mixed-radix order (first variable slowest)."""
        return itertools.product(*(self[n].values for n in scope))

    def atom_count(self, scope: Iterable[str]) -> int:
        count = 1
        for n in scope:
            count *= self[n].cardinality
        return count


@dataclass(frozen=True)
class Assignment:
    """Partial assignment of values to variables, stored as sorted ``(name, value)`` pairs."""

    items: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        items = tuple(sorted(self.items))
        names = [n for n, _ in items]
        if len(set(names)) != len(names):
            raise ValidationError(["a variable is bound twice in one assignment"])
        object.__setattr__(self, "items", items)

    @classmethod
    def of(cls, mapping: Mapping[str, str] | None = None, **bindings: str) -> "Assignment":
        merged = dict(mapping or {})
        for k, v in bindings.items():
            if k in merged:
                raise ValidationError([f"variable {k!r} bound twice"])
            merged[k] = v
        return cls(tuple((str(k), str(v)) for k, v in merged.items()))

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(n for n, _ in self.items)

    def as_dict(self) -> dict[str, str]:
        return dict(self.items)

    def __getitem__(self, name: str) -> str:
        for n, v in self.items:
            if n == name:
                return v
        raise KeyError(name)

    def __len__(self) -> int:
        return len(self.items)

    def __bool__(self) -> bool:
        return bool(self.items)

    def merged(self, other: "Assignment") -> "Assignment":
        return Assignment(self.items + other.items)

    def restricted(self, names: Iterable[str]) -> "Assignment":
        names = set(names)
        return Assignment(tuple((n, v) for n, v in self.items if n in names))

    def check(self, domain: DomainSpec) -> None:
        problems = []
        for n, v in self.items:
            if n not in domain:
                problems.append(f"unknown variable {n!r}")
            elif v not in domain[n].values:
                problems.append(f"value {v!r} not in Val({n})")
        if problems:
            raise ValidationError(problems)

    def __str__(self) -> str:
        return ",".join(f"{n}={v}" for n, v in self.items)


@dataclass(frozen=True)
class Event:
    """``base`` holds jointly, or, when ``negated``, does not hold jointly."""

    base: Assignment
    negated: bool = False

    def __post_init__(self):
        if not self.base:
            raise ValidationError(["an event needs a nonempty base assignment"])

    @property
    def variables(self) -> frozenset[str]:
        return self.base.variables

    def complement(self) -> "Event":
        return Event(self.base, not self.negated)

    def holds(self, scope: Sequence[str], atom: Sequence[str]) -> bool:
        values = dict(zip(scope, atom))
        inside = all(values[n] == v for n, v in self.base.items)
        return inside != self.negated

    def __str__(self) -> str:
        return f"NOT({self.base})" if self.negated else str(self.base)


@dataclass(frozen=True)
class ProbTable:
    scope: tuple[str, ...]
    entries: Mapping[tuple[str, ...], Fraction]

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        frozen = {tuple(k): as_fraction(p) for k, p in dict(self.entries).items()}
        object.__setattr__(self, "entries", MappingProxyType(frozen))

    @classmethod
    def from_list(cls, domain: DomainSpec, scope: Sequence[str], probs: Sequence) -> "ProbTable":
        """Build a dense table from probabilities listed in mixed-radix atom order."""
        atoms = list(domain.atoms(scope))
        if len(atoms) != len(probs):
            raise ValidationError([f"expected {len(atoms)} probabilities, got {len(probs)}"])
        return cls(tuple(scope), dict(zip(atoms, (as_fraction(p) for p in probs))))

    def __getitem__(self, atom: tuple[str, ...]) -> Fraction:
        return self.entries[tuple(atom)]

    def __eq__(self, other):
        if not isinstance(other, ProbTable):
            return NotImplemented
        return self.scope == other.scope and dict(self.entries) == dict(other.entries)

    def __hash__(self):
        return hash((self.scope, frozenset(self.entries.items())))


@dataclass(frozen=True)
class Context:
    id: str
    table: ProbTable

    @property
    def scope(self) -> tuple[str, ...]:
        return self.table.scope

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(self.table.scope)


def validate_context(domain: DomainSpec, context: Context) -> list[str]:
    """Return the list of invariant violations; an empty list means the context is valid."""
    problems = []
    scope = context.scope
    if not context.id:
        problems.append("context id must be nonempty")
    if not scope:
        problems.append(f"context {context.id}: scope is empty")
        return problems
    if len(set(scope)) != len(scope):
        problems.append(f"context {context.id}: scope lists a variable twice")
        return problems
    unknown = [n for n in scope if n not in domain]
    if unknown:
        problems.append(f"context {context.id}: unknown variables {unknown}")
        return problems

    expected = set(domain.atoms(scope))
    for atom in context.table.entries:
        if len(atom) != len(scope):
            problems.append(f"context {context.id}: entry {atom} has wrong arity")
        elif atom not in expected:
            problems.append(f"context {context.id}: entry {atom} uses an unknown value")
    missing = [a for a in domain.atoms(scope) if a not in context.table.entries]
    if missing:
        problems.append(f"context {context.id}: table not dense, missing {_fmt_atom(scope, missing[0])}")

    negative = [(a, p) for a, p in context.table.entries.items() if p < 0 or p > 1]
    for a, p in negative:
        problems.append(f"context {context.id}: entry {_fmt_atom(scope, a)} = {p} outside [0,1]")
    total = sum(context.table.entries.values(), Fraction(0))
    if total != 1:
        problems.append(f"context {context.id}: entries sum to {total} ≠ 1")
    return problems


def _fmt_atom(scope, atom) -> str:
    return "(" + ",".join(f"{n}={v}" for n, v in zip(scope, atom)) + ")"


def event_atoms(domain: DomainSpec, scope: Sequence[str], event: Event) -> list[tuple[str, ...]]:
    """Joint assignments of ``scope`` on which ``event`` holds, in mixed-radix order."""
    scope = tuple(scope)
    outside = event.variables - set(scope)
    if outside:
        raise ScopeError(f"event variables {sorted(outside)} are outside the scope")
    return [a for a in domain.atoms(scope) if event.holds(scope, a)]


@dataclass(frozen=True)
class MCM:
    domain: DomainSpec
    contexts: tuple[Context, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "contexts", tuple(self.contexts))
        problems = []
        seen = set()
        for ctx in self.contexts:
            if ctx.id in seen:
                problems.append(f"duplicate context id {ctx.id!r}")
            seen.add(ctx.id)
            problems.extend(validate_context(self.domain, ctx))
        if problems:
            raise ValidationError(problems)

    def context(self, cid: str) -> Context:
        for ctx in self.contexts:
            if ctx.id == cid:
                return ctx
        raise KeyError(cid)

    def with_context(self, context: Context) -> "MCM":
        return MCM(self.domain, self.contexts + (context,))

    @property
    def covered(self) -> frozenset[str]:
        """Variables that appear in at least one context."""
        return frozenset().union(*(c.variables for c in self.contexts))


MODES = ("min", "max", "interval")


@dataclass(frozen=True)
class Query:
    target: Event
    evidence: Assignment = Assignment()
    mode: str = "interval"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError([f"mode must be one of {MODES}, got {self.mode!r}"])
        shared = self.target.variables & self.evidence.variables
        if shared:
            raise ValidationError([f"target and evidence share variables {sorted(shared)}"])

    @property
    def variables(self) -> frozenset[str]:
        return self.target.variables | self.evidence.variables

    def check(self, domain: DomainSpec) -> None:
        self.target.base.check(domain)
        self.evidence.check(domain)


@dataclass(frozen=True)
class Interval:
    lower: Fraction
    upper: Fraction
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "lower", Fraction(self.lower))
        object.__setattr__(self, "upper", Fraction(self.upper))
        object.__setattr__(self, "notes", tuple(self.notes))
        if not 0 <= self.lower <= self.upper <= 1:
            raise ValueError(f"invalid interval [{self.lower}, {self.upper}]")

    @property
    def is_point(self) -> bool:
        return self.lower == self.upper
