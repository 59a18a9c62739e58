"""Exact rational linear programming.

Two-phase primal simplex over an integer tableau: every row stores integer
entries and a positive row denominator, and is reduced by its gcd after each
pivot. No floating point is involved anywhere.

Entering columns follow the largest reduced cost; a run of degenerate pivots
switches to Bland's rule (lowest index) until progress resumes, so the method
terminates. Linear-fractional objectives go through the Charnes-Cooper
transformation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

RELATIONS = ("=", "<=", ">=")
STALL_LIMIT = 8


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    def satisfied_by(self, x: Sequence[Fraction]) -> bool:
        lhs = sum((Fraction(a) * v for a, v in zip(self.coeffs, x) if a), Fraction(0))
        if self.relation == "=":
            return lhs == self.rhs
        if self.relation == "<=":
            return lhs <= self.rhs
        return lhs >= self.rhs


@dataclass(frozen=True)
class LinearProgram:
    """Optimize ``objective . x`` subject to ``constraints`` and ``x >= 0``."""

    num_vars: int
    constraints: tuple[Constraint, ...]
    objective: tuple
    sense: str = "min"

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "objective", tuple(self.objective))
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        if len(self.objective) != self.num_vars:
            raise ValueError("objective length differs from num_vars")
        for c in self.constraints:
            if len(c.coeffs) != self.num_vars:
                raise ValueError("constraint length differs from num_vars")

    def is_feasible_point(self, x: Sequence[Fraction]) -> bool:
        return all(v >= 0 for v in x) and all(c.satisfied_by(x) for c in self.constraints)

    def evaluate(self, x: Sequence[Fraction]) -> Fraction:
        return sum((Fraction(a) * v for a, v in zip(self.objective, x) if a), Fraction(0))


@dataclass(frozen=True)
class LPResult:
    status: str  # optimal | infeasible | unbounded | denominator_zero
    value: Fraction | None = None
    witness: tuple[Fraction, ...] | None = None
    certificate: str | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _integer_row(values: Sequence, rhs) -> tuple[list[int], int]:
    """Scale a rational row to integers; returns (coefficients, rhs)."""
    fracs = [Fraction(v) for v in values] + [Fraction(rhs)]
    scale = 1
    for f in fracs:
        if f.denominator != 1:
            scale = scale * f.denominator // math.gcd(scale, f.denominator)
    ints = [f.numerator * (scale // f.denominator) for f in fracs]
    return ints[:-1], ints[-1]


class _Tableau:
    """Integer simplex tableau; row ``i`` represents ``rows[i] / dens[i]``.

    ``obj`` rows are minimization reduced-cost rows whose rhs entry holds the
    negated objective value.
    """

    def __init__(self, rows, basis, obj_rows):
        self.rows = rows
        self.dens = [1] * len(rows)
        self.basis = basis
        self.obj = [list(r) for r in obj_rows]
        self.obj_dens = [1] * len(obj_rows)
        self.pivots = 0

    @staticmethod
    def _reduce(row: list[int], den: int) -> tuple[list[int], int]:
        g = math.gcd(den, *row)
        if g > 1:
            row = [a // g for a in row]
            den //= g
        return row, den

    def _eliminate(self, row, den, c, prow, pden):
        f = row[c]
        if not f:
            return row, den
        new = [a * pden - f * b for a, b in zip(row, prow)]
        return self._reduce(new, den * pden)

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        p = prow[c]
        if p < 0:
            prow = [-a for a in prow]
            p = -p
        prow, pden = self._reduce(prow, p)
        self.rows[r], self.dens[r] = prow, pden
        for i in range(len(self.rows)):
            if i != r:
                self.rows[i], self.dens[i] = self._eliminate(self.rows[i], self.dens[i], c, prow, pden)
        for k in range(len(self.obj)):
            self.obj[k], self.obj_dens[k] = self._eliminate(self.obj[k], self.obj_dens[k], c, prow, pden)
        self.basis[r] = c
        self.pivots += 1

    def entering(self, k: int, allowed: int, bland: bool) -> int | None:
        """Entering column among the first ``allowed`` ones, or None at optimality.

        Bland picks the lowest index with negative reduced cost; otherwise the
        most negative reduced cost wins (lowest index on ties).
        """
        row = self.obj[k]
        if bland:
            for j in range(allowed):
                if row[j] < 0:
                    return j
            return None
        best, best_val = None, 0
        for j in range(allowed):
            if row[j] < best_val:
                best, best_val = j, row[j]
        return best

    def leaving(self, c: int) -> int | None:
        """Minimum-ratio row; ties broken by lowest basic column index."""
        best = None
        best_num = best_den = 0
        for i, row in enumerate(self.rows):
            a = row[c]
            if a <= 0:
                continue
            b = row[-1]
            if best is None:
                best, best_num, best_den = i, b, a
                continue
            lhs, rhs = b * best_den, best_num * a
            if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                best, best_num, best_den = i, b, a
        return best

    def run(self, k: int, allowed: int) -> str:
        """Pivot objective row ``k`` to optimality.

        After ``STALL_LIMIT`` consecutive degenerate pivots the entering rule
        switches to Bland's until the objective strictly improves, which rules
        out cycling.
        """
        stalled = 0
        value = self.objective_value(k)
        while True:
            c = self.entering(k, allowed, bland=stalled >= STALL_LIMIT)
            if c is None:
                return "optimal"
            r = self.leaving(c)
            if r is None:
                return "unbounded"
            self.pivot(r, c)
            new_value = self.objective_value(k)
            if new_value == value:
                stalled += 1
            else:
                stalled, value = 0, new_value

    def copy(self) -> "_Tableau":
        twin = _Tableau.__new__(_Tableau)
        twin.rows = [list(r) for r in self.rows]
        twin.dens = list(self.dens)
        twin.basis = list(self.basis)
        twin.obj = [list(r) for r in self.obj]
        twin.obj_dens = list(self.obj_dens)
        twin.pivots = self.pivots
        return twin

    def objective_value(self, k: int) -> Fraction:
        return -Fraction(self.obj[k][-1], self.obj_dens[k])

    def basic_values(self, n: int) -> list[Fraction]:
        x = [Fraction(0)] * n
        for i, j in enumerate(self.basis):
            if j < n:
                x[j] = Fraction(self.rows[i][-1], self.dens[i])
        return x


def _build(num_vars: int, constraints: Sequence[Constraint], objectives):
    """Initial tableau with slack/artificial basis.

    Columns: the ``num_vars`` variables, one slack per inequality (in
    constraint order), then artificials. Returns ``(tableau, real, n_art)``
    where ``real`` counts the non-artificial columns.
    """
    n = num_vars
    normalized = []
    for con in constraints:
        coeffs, rhs = _integer_row(con.coeffs, con.rhs)
        rel = con.relation
        if rhs < 0:
            coeffs, rhs = [-a for a in coeffs], -rhs
            rel = {"=": "=", "<=": ">=", ">=": "<="}[rel]
        normalized.append((coeffs, rel, rhs))

    n_slack = sum(1 for _, rel, _ in normalized if rel != "=")
    needs_art = [rel != "<=" for _, rel, _ in normalized]
    n_art = sum(needs_art)
    width = n + n_slack + n_art
    real = n + n_slack

    rows, basis = [], []
    s_col, a_col = n, real
    for (coeffs, rel, rhs), art in zip(normalized, needs_art):
        row = coeffs + [0] * (n_slack + n_art) + [rhs]
        if rel == "<=":
            row[s_col] = 1
            basis.append(s_col)
            s_col += 1
        else:
            if rel == ">=":
                row[s_col] = -1
                s_col += 1
            row[a_col] = 1
            basis.append(a_col)
            a_col += 1
        rows.append(row)

    # phase-1 reduced costs: minus the sum of rows that carry an artificial
    phase1 = [0] * (width + 1)
    for row, art in zip(rows, needs_art):
        if art:
            for j, a in enumerate(row):
                if a:
                    phase1[j] -= a
    for j in range(real, width):
        phase1[j] = 0

    obj_rows = [phase1]
    for objective, sense in objectives:
        if len(objective) != n:
            raise ValueError("objective length differs from num_vars")
        sign = 1 if sense == "min" else -1
        cost, _ = _integer_row([sign * Fraction(c) for c in objective], 0)
        obj_rows.append(cost + [0] * (width - n + 1))
    return _Tableau(rows, basis, obj_rows), real, n_art


def _phase1(tab: _Tableau, real: int, n_art: int) -> LPResult | None:
    """Drive the artificials to zero; returns an infeasible result on failure."""
    if not n_art:
        return None
    tab.run(0, real)
    residual = tab.objective_value(0)
    if residual > 0:
        carrying = [i for i, j in enumerate(tab.basis) if j >= real and tab.rows[i][-1] != 0]
        return LPResult(
            "infeasible",
            certificate=f"phase-1 minimum of artificial mass is {residual} > 0 "
            f"(constraints {sorted(carrying)} cannot be met)",
        )
    _drive_out_artificials(tab, real)
    return None


def _phase2(tab: _Tableau, k: int, real: int, n: int, objective) -> LPResult:
    if tab.run(k, real) == "unbounded":
        return LPResult("unbounded", certificate="improving column has no positive entry")
    x = tab.basic_values(n)
    value = sum((Fraction(a) * v for a, v in zip(objective, x) if a), Fraction(0))
    return LPResult("optimal", value=value, witness=tuple(x))


def solve_lp(lp: LinearProgram) -> LPResult:
    """Solve ``lp`` exactly."""
    return solve_lp_objectives(lp.num_vars, lp.constraints, [(lp.objective, lp.sense)])[0]


def solve_lp_objectives(
    num_vars: int,
    constraints: Sequence[Constraint],
    objectives: Sequence[tuple[Sequence, str]],
) -> list[LPResult]:
    """Optimize several ``(objective, sense)`` pairs over one feasible region.

    Phase 1 runs once; each objective then starts phase 2 from the same basis.
    """
    tab, real, n_art = _build(num_vars, constraints, objectives)
    failed = _phase1(tab, real, n_art)
    if failed is not None:
        return [failed for _ in objectives]
    results = []
    for k, (objective, _) in enumerate(objectives, start=1):
        work = tab.copy() if len(objectives) > 1 else tab
        results.append(_phase2(work, k, real, num_vars, objective))
    return results


def _drive_out_artificials(tab: _Tableau, real: int) -> None:
    i = 0
    while i < len(tab.rows):
        if tab.basis[i] >= real:
            row = tab.rows[i]
            col = next((j for j in range(real) if row[j] != 0), None)
            if col is None:
                # redundant constraint
                del tab.rows[i], tab.dens[i], tab.basis[i]
                continue
            tab.pivot(i, col)
        i += 1


def _crash(tab: _Tableau, columns: Sequence[int]) -> None:
    """Pivot ``columns`` into the basis, then drop rows left with an artificial.

    ``columns`` must be linearly independent and span the row space; the
    caller guarantees the resulting basic solution is feasible.
    """
    wanted = set(columns)
    for c in columns:
        if c in tab.basis:
            continue
        r = next(
            (i for i, row in enumerate(tab.rows) if row[c] != 0 and tab.basis[i] not in wanted),
            None,
        )
        if r is None:
            raise ArithmeticError("crash basis is singular")
        tab.pivot(r, c)
    keep = [i for i, j in enumerate(tab.basis) if j in wanted]
    tab.rows = [tab.rows[i] for i in keep]
    tab.dens = [tab.dens[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]


def solve_linear_fractional(
    numerator: Sequence,
    denominator: Sequence,
    constraints: Sequence[Constraint],
    sense: str = "min",
) -> LPResult:
    """Optimize ``numerator.q / denominator.q`` over ``{q >= 0 : constraints}``.

    Returns the optimum over the closure of the feasible points with positive
    denominator. Status ``denominator_zero`` means the denominator vanishes on
    every feasible point.
    """
    return solve_linear_fractional_senses(numerator, denominator, constraints, (sense,))[sense]


def solve_linear_fractional_senses(
    numerator: Sequence,
    denominator: Sequence,
    constraints: Sequence[Constraint],
    senses: Sequence[str] = ("min", "max"),
) -> dict[str, LPResult]:
    """Charnes-Cooper transformation: with ``y = t q`` and ``t >= 0`` the
    ratio becomes ``numerator.y`` under the homogenized constraints
    ``a.y - b t (rel) 0`` and ``denominator.y = 1``.

    The transformed program is highly degenerate, so its starting basis is
    taken from a vertex of the original region that maximizes the
    denominator, extended by ``t``.
    """
    n = len(numerator)
    if len(denominator) != n:
        raise ValueError("numerator and denominator lengths differ")
    if any(Fraction(d) < 0 for d in denominator):
        raise ValueError("denominator coefficients must be nonnegative")
    constraints = tuple(constraints)

    tab, real, n_art = _build(n, constraints, [(denominator, "max")])
    failed = _phase1(tab, real, n_art)
    if failed is not None:
        return {s: failed for s in senses}
    best = _phase2(tab, 1, real, n, denominator)
    if best.status == "optimal" and best.value == 0:
        zero = LPResult("denominator_zero", certificate="denominator is 0 on every feasible point")
        return {s: zero for s in senses}

    scaled = [Constraint(tuple(c.coeffs) + (-c.rhs,), c.relation, 0) for c in constraints]
    scaled.append(Constraint(tuple(denominator) + (0,), "=", 1))
    objective = tuple(numerator) + (0,)
    cc, cc_real, cc_art = _build(n + 1, scaled, [(objective, s) for s in senses])
    if best.status == "optimal":
        # original column j maps to j below n and to j + 1 (past t) from the slacks on
        _crash(cc, [j if j < n else j + 1 for j in tab.basis] + [n])
    else:
        # denominator unbounded on the region: no vertex to anchor on
        failed = _phase1(cc, cc_real, cc_art)
        if failed is not None:
            raise ArithmeticError("transformed program infeasible on a feasible region")

    out = {}
    for k, sense in enumerate(senses, start=1):
        work = cc.copy() if len(senses) > 1 else cc
        res = _phase2(work, k, cc_real, n + 1, objective)
        if res.status == "optimal":
            y, t = res.witness[:n], res.witness[n]
            witness = tuple(v / t for v in y) if t > 0 else None
            res = LPResult("optimal", value=res.value, witness=witness)
        out[sense] = res
    return out
