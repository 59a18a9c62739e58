"""Command-line front end.

Every command prints one JSON document on stdout. Failures print an
``{"error": ...}`` document and exit with the code of the error class:
2 validation, 3 inconsistent model, 4 impossible evidence, 5 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import engine
from .construct import check_global_consistency, plan_free_order
from .document import DocumentError, load_document, load_raw, table_rows
from .errors import MCMError, ValidationError
from .identify import relevant_vars, restrict_constraints
from .intra import marginalize
from .model import MCM, Assignment, DomainSpec, Event, Query, as_fraction


def parse_bindings(spec: str | None) -> Assignment:
    """``"x=1,y=0"`` -> Assignment; empty or None -> empty assignment."""
    if not spec or not spec.strip():
        return Assignment()
    pairs = {}
    for part in spec.split(","):
        name, sep, value = part.partition("=")
        if not sep or not name.strip() or not value.strip():
            raise ValidationError([f"cannot parse binding {part!r}; expected name=value"], code="bad_binding")
        if name.strip() in pairs:
            raise ValidationError([f"variable {name.strip()!r} bound twice"], code="bad_binding")
        pairs[name.strip()] = value.strip()
    return Assignment.of(pairs)


def _approx(x: Fraction | None):
    return None if x is None else round(float(x), 4)


def _emit(doc: dict, out) -> None:
    out.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError([f"cannot read {path}: {exc.strerror}"], code="io") from None


def _tolerance(args) -> Fraction:
    try:
        tol = as_fraction(args.tolerance)
    except (TypeError, ValueError):
        raise ValidationError([f"bad tolerance {args.tolerance!r}"], code="bad_tolerance") from None
    if tol < 0:
        raise ValidationError(["tolerance must be nonnegative"], code="bad_tolerance")
    return tol


def _load(args):
    return load_document(_read(args.model), _tolerance(args), args.atom_budget)


def _query(args, mcm: MCM) -> Query:
    target = Event(parse_bindings(args.target), getattr(args, "negate_target", False))
    return Query(target, parse_bindings(args.evidence), getattr(args, "mode", "interval"))


def cmd_validate(args) -> dict:
    doc = _load(args)
    return {
        "valid": True,
        "mode": doc.mode,
        "variables": list(doc.mcm.domain.names),
        "contexts": [c.id for c in doc.mcm.contexts],
    }


def cmd_plan_order(args) -> dict:
    if args.scope:
        scopes = [[n.strip() for n in s.split(",") if n.strip()] for s in args.scope]
        names = []
        for s in scopes:
            names.extend(n for n in s if n not in names)
        if args.model:
            domain = load_raw(_read(args.model))[0]
        else:
            domain = DomainSpec.binary(names)
        labels = [",".join(s) for s in scopes]
    elif args.model:
        domain, contexts, _ = load_raw(_read(args.model))
        scopes = [list(c.scope) for c in contexts]
        labels = [c.id for c in contexts]
    else:
        raise ValidationError(["give a model file or at least one --scope"], code="usage")
    order = plan_free_order(domain, scopes)
    if order is None:
        return {"exists": False, "order": None, "message": "none exists"}
    return {"exists": True, "order": [labels[i] for i in order]}


def cmd_query(args) -> dict:
    doc = _load(args)
    mcm = doc.mcm
    query = _query(args, mcm)
    method = args.method
    plan = engine.plan_query(mcm, query, method)
    senses = {"min": ("min",), "max": ("max",), "interval": ("min", "max")}[query.mode]
    values, notes = engine.run_plan(mcm, query, plan, senses, args.atom_budget)
    lower, upper = values.get("min"), values.get("max")
    result = {
        "lower": None if lower is None else str(lower),
        "upper": None if upper is None else str(upper),
        "lower_approx": _approx(lower),
        "upper_approx": _approx(upper),
        "identified": list(mcm.domain.ordered(plan.identified)),
        "method": plan.method,
        "notes": list(notes),
    }
    if args.check_oracle:
        oracle = {s: engine.oracle_bound(mcm, query, s, args.atom_budget) for s in senses}
        agrees = all(oracle[s] == values[s] for s in senses)
        result["oracle_agrees"] = agrees
        if plan.method not in ("lp", "oracle"):
            result["notes"].append(
                "closed-form result agrees with the full-joint LP" if agrees
                else "closed-form result differs from the full-joint LP"
            )
    return result


def cmd_identify(args) -> dict:
    doc = _load(args)
    mcm = doc.mcm
    query = _query(args, mcm)
    identified = relevant_vars(mcm, query)
    cset = restrict_constraints(mcm, identified)
    return {
        "identified": list(cset.atom_scope),
        "atoms": mcm.domain.atom_count(cset.atom_scope),
        "constraints": [{"context": c.context_id, "scope": list(c.scope)} for c in cset.constraints],
    }


def cmd_marginalize(args) -> dict:
    doc = _load(args)
    try:
        ctx = doc.mcm.context(args.context)
    except KeyError:
        raise ValidationError([f"no context {args.context!r}"], code="unknown_context") from None
    subset = [n.strip() for n in args.vars.split(",") if n.strip()]
    table = marginalize(ctx, subset)
    return {"context": ctx.id, "scope": list(table.scope), "table": table_rows(table)}


def cmd_consistency(args) -> dict:
    domain, contexts, _ = load_raw(_read(args.model))
    report = check_global_consistency(MCM(domain, tuple(contexts)), args.atom_budget)
    out = {"feasible": report.feasible}
    if not report.feasible:
        out["witness"] = list(report.witness)
        out["detail"] = report.detail
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multicontext", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def model_cmd(name, func, help_text, model_optional=False):
        p = sub.add_parser(name, help=help_text)
        if model_optional:
            p.add_argument("model", nargs="?", help="model document (JSON)")
        else:
            p.add_argument("model", help="model document (JSON)")
        p.add_argument("--tolerance", default="0",
                       help="accepted marginal gap when loading generative models (rational, default 0)")
        p.add_argument("--atom-budget", type=int, default=engine.DEFAULT_ATOM_BUDGET)
        p.set_defaults(func=func)
        return p

    model_cmd("validate", cmd_validate, "load and validate a model")
    p = model_cmd("plan-order", cmd_plan_order, "find a free assignment order", model_optional=True)
    p.add_argument("--scope", action="append", help="comma-separated scope; repeatable")

    for name, func, help_text in (
        ("query", cmd_query, "bound a conditional probability"),
        ("identify", cmd_identify, "list the variables relevant to a query"),
    ):
        p = model_cmd(name, func, help_text)
        p.add_argument("--target", required=True, help='e.g. "y=1" or "x=1,z=0"')
        p.add_argument("--negate-target", action="store_true")
        p.add_argument("--evidence", default="", help='e.g. "x=1"')
        if name == "query":
            p.add_argument("--mode", choices=("min", "max", "interval"), default="interval")
            p.add_argument("--method", choices=engine.METHODS, default="auto")
            p.add_argument("--check-oracle", action="store_true")

    p = model_cmd("marginalize", cmd_marginalize, "marginal of one context")
    p.add_argument("--context", required=True)
    p.add_argument("--vars", required=True, help="comma-separated variable names")

    model_cmd("consistency", cmd_consistency, "check that one joint fits all contexts")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        doc = args.func(args)
    except MCMError as exc:
        err = {"code": exc.code, "messages": getattr(exc, "problems", None) or [str(exc)]}
        if isinstance(exc, DocumentError):
            err["issues"] = exc.issues
        _emit({"error": err}, out)
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.command == "consistency" and not doc["feasible"]:
        _emit(doc, out)
        return 3
    _emit(doc, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
