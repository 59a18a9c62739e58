"""JSON model documents.

Layout::

    {"variables": [{"name": "x", "values": ["0", "1"]}],
     "contexts": [{"id": "C1", "scope": ["x"],
                   "table": [{"assign": {"x": "1"}, "p": "3/5"}, ...]}],
     "mode": "generative"}

Probabilities are strings (``"p/q"`` or decimal) and are parsed exactly.
In ``generative`` mode every context, in listed order, must be freely
assignable; in ``authored`` mode the whole model must admit a joint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .construct import RejectedContext, add_context_free, check_global_consistency
from .errors import InconsistentModelError, ValidationError
from .model import MCM, Context, DomainSpec, ProbTable, Variable, as_fraction, validate_context

MODES = ("generative", "authored")


class DocumentError(ValidationError):
    """Structured load failure; ``issues`` holds machine-readable entries."""

    def __init__(self, issues: list[dict], code: str = "invalid_document"):
        self.issues = issues
        super().__init__([i["message"] for i in issues], code=code)


@dataclass(frozen=True)
class ModelDocument:
    mcm: MCM
    mode: str = "generative"


def _issue(code, message, **extra) -> dict:
    return {"code": code, "message": message, **extra}


def _parse_domain(raw) -> DomainSpec:
    if not isinstance(raw, list) or not raw:
        raise DocumentError([_issue("syntax", "'variables' must be a nonempty list")])
    variables = []
    for item in raw:
        if not isinstance(item, dict) or "name" not in item or "values" not in item:
            raise DocumentError([_issue("syntax", f"bad variable entry {item!r}")])
        try:
            variables.append(Variable(str(item["name"]), tuple(str(v) for v in item["values"])))
        except ValidationError as exc:
            raise DocumentError([_issue("bad_variable", m) for m in exc.problems]) from None
    try:
        return DomainSpec(tuple(variables))
    except ValidationError as exc:
        raise DocumentError([_issue("bad_domain", m) for m in exc.problems]) from None


def _parse_prob(value, cid, atom) -> Fraction:
    if isinstance(value, float) or isinstance(value, bool):
        raise DocumentError([_issue("binary_float", f"context {cid}: probability for {atom} must be a string", context=cid, atom=atom)])
    try:
        return as_fraction(value)
    except (TypeError, ValueError):
        raise DocumentError([_issue("bad_probability", f"context {cid}: cannot parse {value!r} for {atom}", context=cid, atom=atom)]) from None


def _parse_context(domain: DomainSpec, raw) -> Context:
    if not isinstance(raw, dict) or not {"id", "scope", "table"} <= raw.keys():
        raise DocumentError([_issue("syntax", f"bad context entry {raw!r}")])
    cid = str(raw["id"])
    scope = tuple(str(n) for n in raw["scope"])
    unknown = [n for n in scope if n not in domain]
    if unknown:
        raise DocumentError([_issue("unknown_variable", f"context {cid}: unknown variables {unknown}", context=cid)])
    issues = []
    entries: dict[tuple[str, ...], Fraction] = {}
    for row in raw["table"]:
        assign = {str(k): str(v) for k, v in row.get("assign", {}).items()}
        if set(assign) != set(scope):
            issues.append(_issue("bad_atom", f"context {cid}: entry {assign} does not assign exactly the scope", context=cid, atom=assign))
            continue
        atom = tuple(assign[n] for n in scope)
        bad = [n for n in scope if assign[n] not in domain[n].values]
        if bad:
            issues.append(_issue("unknown_value", f"context {cid}: entry {assign} uses unknown values for {bad}", context=cid, atom=assign))
            continue
        if atom in entries:
            issues.append(_issue("duplicate_atom", f"context {cid}: duplicate entry {assign}", context=cid, atom=assign))
            continue
        entries[atom] = _parse_prob(row.get("p"), cid, assign)
    for atom in domain.atoms(scope):
        if atom not in entries:
            assign = dict(zip(scope, atom))
            issues.append(_issue("missing_atom", f"context {cid}: table not dense, missing {assign}", context=cid, atom=assign))
    if issues:
        raise DocumentError(issues)
    ordered = {a: entries[a] for a in domain.atoms(scope)}
    ctx = Context(cid, ProbTable(scope, ordered))
    problems = validate_context(domain, ctx)
    if problems:
        raise DocumentError([_issue("invalid_table", m, context=cid) for m in problems])
    return ctx


def load_raw(text: str) -> tuple[DomainSpec, list[Context], str]:
    """Parse structure and tables without running mode checks."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError([_issue("syntax", f"invalid JSON: {exc}")]) from None
    if not isinstance(data, dict):
        raise DocumentError([_issue("syntax", "document must be a JSON object")])
    domain = _parse_domain(data.get("variables"))
    mode = data.get("mode", "generative")
    if mode not in MODES:
        raise DocumentError([_issue("bad_mode", f"mode must be one of {MODES}")])
    contexts = []
    issues = []
    for raw in data.get("contexts", []):
        try:
            contexts.append(_parse_context(domain, raw))
        except DocumentError as exc:
            issues.extend(exc.issues)
    ids = [c.id for c in contexts]
    for cid in sorted({i for i in ids if ids.count(i) > 1}):
        issues.append(_issue("duplicate_context", f"duplicate context id {cid!r}", context=cid))
    if issues:
        raise DocumentError(issues)
    return domain, contexts, mode


def load_document(text: str, tolerance: Fraction = Fraction(0), atom_budget: int | None = None) -> ModelDocument:
    domain, contexts, mode = load_raw(text)
    if mode == "generative":
        mcm = MCM(domain)
        for k, ctx in enumerate(contexts, start=1):
            try:
                mcm = add_context_free(mcm, ctx, tolerance)
            except RejectedContext as exc:
                raise DocumentError(
                    [_issue(exc.code, f"free-assignment violated at context {k}: {exc.problems[0]}",
                            context=ctx.id, position=k)],
                    code=exc.code,
                ) from None
        return ModelDocument(mcm, mode)
    mcm = MCM(domain, tuple(contexts))
    report = check_global_consistency(mcm, atom_budget)
    if not report.feasible:
        raise InconsistentModelError(f"inconsistent model: {report.detail}")
    return ModelDocument(mcm, mode)


def parse_model(text: str, tolerance: Fraction = Fraction(0)) -> MCM:
    return load_document(text, tolerance).mcm


def table_rows(table: ProbTable) -> list[dict]:
    return [{"assign": dict(zip(table.scope, atom)), "p": str(p)} for atom, p in table.entries.items()]


def to_dict(doc: ModelDocument) -> dict:
    mcm = doc.mcm
    return {
        "variables": [{"name": v.name, "values": list(v.values)} for v in mcm.domain.variables],
        "contexts": [
            {"id": c.id, "scope": list(c.scope), "table": table_rows(c.table)} for c in mcm.contexts
        ],
        "mode": doc.mode,
    }


def serialize(doc: ModelDocument) -> str:
    return json.dumps(to_dict(doc), indent=2, ensure_ascii=False) + "\n"
