"""Random model generators and independent oracles shared by the tests."""

from __future__ import annotations

import random
from fractions import Fraction

from multicontext.construct import add_context_free
from multicontext.intra import marginalize
from multicontext.lp import Constraint, LinearProgram
from multicontext.model import MCM, Assignment, Context, DomainSpec, Event, ProbTable, Query


def random_distribution(rng: random.Random, size: int, max_weight: int = 6, zero_bias: float = 0.15):
    """Random exact distribution over ``size`` cells (some cells may be 0)."""
    while True:
        w = [0 if rng.random() < zero_bias else rng.randint(1, max_weight) for _ in range(size)]
        total = sum(w)
        if total:
            return [Fraction(x, total) for x in w]


def random_prob(rng: random.Random, denom: int = 20, lo: int = 0, hi: int | None = None) -> Fraction:
    hi = denom if hi is None else hi
    return Fraction(rng.randint(lo, hi), denom)


def joint_table(domain: DomainSpec, names, probs) -> ProbTable:
    return ProbTable.from_list(domain, tuple(names), probs)


def mcm_from_joint(domain: DomainSpec, joint: ProbTable, scopes, prefix="C") -> MCM:
    """Contexts are marginals of one hidden joint, so the model is consistent."""
    ctxs = []
    for k, scope in enumerate(scopes, start=1):
        scope = domain.ordered(scope)
        ctxs.append(Context(f"{prefix}{k}", marginalize(joint, scope)))
    return MCM(domain, tuple(ctxs))


def random_scopes(rng: random.Random, names, n_contexts: int, max_size: int = 4):
    scopes = []
    for _ in range(n_contexts):
        k = rng.randint(1, min(max_size, len(names)))
        scopes.append(frozenset(rng.sample(list(names), k)))
    return scopes


def random_query(rng: random.Random, domain: DomainSpec, mcm: MCM, max_target=2, max_evidence=2):
    covered = sorted(mcm.covered, key=domain.position)
    k_t = rng.randint(1, min(max_target, len(covered)))
    t_vars = rng.sample(covered, k_t)
    rest = [n for n in covered if n not in t_vars]
    k_e = rng.randint(0, min(max_evidence, len(rest)))
    e_vars = rng.sample(rest, k_e)
    target = Event(Assignment.of({n: rng.choice(domain[n].values) for n in t_vars}), rng.random() < 0.25)
    evidence = Assignment.of({n: rng.choice(domain[n].values) for n in e_vars})
    return Query(target, evidence)


# five contexts around a loop; query blocks X=v0 and Y=v1, overlaps v2..v6
QUERY_LOOP_SCOPES = [(0, 2, 3), (3, 4), (4, 5, 1), (5, 6), (6, 2)]


def random_consistent_mcm(rng: random.Random, n_vars: int, n_contexts: int, max_size: int = 4, topology=None):
    """Contexts are marginals of a random joint. ``topology`` is None (random
    scopes), ``"loop"``, ``"disjoint"`` or ``"query_loop"`` (needs ``n_vars >= 7``;
    variables past the seventh become private members of the loop contexts)."""
    names = [f"v{i}" for i in range(n_vars)]
    domain = DomainSpec.binary(names)
    joint = joint_table(domain, names, random_distribution(rng, 2 ** n_vars))
    if topology == "loop":
        k = min(n_contexts, n_vars)
        scopes = [frozenset({names[i], names[(i + 1) % k]}) for i in range(k)]
    elif topology == "disjoint":
        rng.shuffle(names)
        cuts = sorted(rng.sample(range(1, n_vars), min(n_contexts, n_vars) - 1))
        bounds = [0] + cuts + [n_vars]
        scopes = [frozenset(names[a:b]) for a, b in zip(bounds, bounds[1:])]
    elif topology == "query_loop":
        scopes = [set(names[i] for i in s) for s in QUERY_LOOP_SCOPES]
        for k, extra in enumerate(names[7:]):
            scopes[k % 5].add(extra)
    else:
        scopes = random_scopes(rng, names, n_contexts, max_size)
    return mcm_from_joint(domain, joint, scopes)


def free_extension(rng: random.Random, mcm: MCM, fresh, cid: str, induced_max: int = 3) -> Context:
    """A context over ``fresh`` plus part of one existing context, whose table
    agrees with that context on the shared part (so it is freely assignable)."""
    domain = mcm.domain
    if mcm.contexts and rng.random() < 0.75:
        host = rng.choice(mcm.contexts)
        k = rng.randint(1, min(induced_max, len(host.scope)))
        induced = domain.ordered(rng.sample(list(host.scope), k))
        base = marginalize(host, induced)
    else:
        induced, base = (), None
    fresh = domain.ordered(fresh)
    scope = domain.ordered(list(induced) + list(fresh))
    entries = {}
    for ind_atom in domain.atoms(induced):
        mass = base[tuple(ind_atom)] if induced else Fraction(1)
        cond = random_distribution(rng, domain.atom_count(fresh))
        for f_atom, c in zip(domain.atoms(fresh), cond):
            values = {**dict(zip(induced, ind_atom)), **dict(zip(fresh, f_atom))}
            entries[tuple(values[n] for n in scope)] = mass * c
    return Context(cid, ProbTable(scope, {a: entries[a] for a in domain.atoms(scope)}))


def random_generative_mcm(rng: random.Random, n_vars: int, n_contexts: int, max_size: int = 3,
                          spare: int = 0):
    """Build a model purely through free assignments. The last ``spare``
    variables are left out of every context."""
    names = [f"v{i}" for i in range(n_vars + spare)]
    domain = DomainSpec.binary(names)
    mcm = MCM(domain)
    unused = names[:n_vars]
    for k in range(1, n_contexts + 1):
        if not unused:
            break
        fresh = [unused.pop(0) for _ in range(rng.randint(1, min(max_size, len(unused))))]
        mcm = add_context_free(mcm, free_extension(rng, mcm, fresh, f"G{k}"))
    return mcm


def random_lp(rng: random.Random, max_vars: int = 6, max_cons: int = 8) -> LinearProgram:
    """Random program built around a hidden nonnegative point; about one
    constraint in ten is pushed past it, so some programs are infeasible."""
    n = rng.randint(1, max_vars)
    m = rng.randint(1, max_cons)
    x0 = [Fraction(rng.randint(0, 4), rng.randint(1, 2)) for _ in range(n)]
    cons = []
    for _ in range(m):
        a = tuple(Fraction(rng.randint(-3, 4), rng.randint(1, 2)) for _ in range(n))
        v = sum(p * q for p, q in zip(a, x0))
        rel = rng.choice(["<=", "<=", "<=", ">=", "="])
        slack = Fraction(rng.randint(0, 3)) * (1 if rng.random() > 0.1 else -1)
        cons.append(Constraint(a, rel, {"<=": v + slack, ">=": v - slack, "=": v}[rel]))
    objective = tuple(rng.randint(-3, 4) for _ in range(n))
    return LinearProgram(n, cons, objective, rng.choice(["min", "max"]))


def binary_table(scope, entries) -> ProbTable:
    """Table from ``{"10": "1/5", ...}``; each key spells the binary values in scope order."""
    return ProbTable(tuple(scope), {tuple(k): Fraction(v) for k, v in entries.items()})


def binary_context(cid, scope, entries) -> Context:
    return Context(cid, binary_table(scope, entries))

