"""Independent reference evaluator and random program generator for tests.

The naive evaluator shares only the data model (Rule/Atom/Var) with the
engine: it matches rules by backtracking over a plain set of triples,
strata are taken from a longest-path labeling it computes itself, and each
stratum is iterated to a fixpoint by re-applying every rule to everything.
"""

from __future__ import annotations

import random
import statistics

from edgelog.model import (Abs, Aggregate, Atom, BinOp, Bind, Comp, Neg, Rule, Var,
                           check_rule, local_negative_vars)


def _value(term, env):
    return env[term] if isinstance(term, Var) else term


def _eval_expr(e, env):
    if isinstance(e, Var):
        return env[e]
    if isinstance(e, float):
        return e
    if isinstance(e, BinOp):
        a, b = _eval_expr(e.left, env), _eval_expr(e.right, env)
        return {"+": a + b, "-": a - b, "*": a * b}.get(e.op) if e.op != "/" else a / b
    if isinstance(e, Abs):
        return abs(_eval_expr(e.arg, env))
    if isinstance(e, Neg):
        return -_eval_expr(e.arg, env)
    raise TypeError(e)


def _compare(a, op, b):
    if op == "=":
        return type(a) is type(b) and a == b
    if op == "!=":
        return not (type(a) is type(b) and a == b)
    if type(a) is not float or type(b) is not float:
        raise TypeError("ordered comparison on non-numbers")
    return {">": a > b, ">=": a >= b, "<": a < b, "<=": a <= b}[op]


def _unify(atom, fact, env):
    p, s, o = fact
    if atom.pred != p:
        return None
    out = dict(env)
    for term, value in ((atom.s, s), (atom.o, o)):
        if isinstance(term, Var):
            if term in out:
                if out[term] != value or type(out[term]) is not type(value):
                    return None
            else:
                out[term] = value
        elif term != value or type(term) is not type(value):
            return None
    return out


def bindings(rule: Rule, facts: set):
    """All variable assignments satisfying the body (naive nested search)."""
    positives = list(rule.positive)
    by_pred = {}
    for f in facts:
        by_pred.setdefault(f[0], []).append(f)
    envs = [{}]
    for atom in positives:
        envs = [e2 for e in envs for f in by_pred.get(atom.pred, ())
                for e2 in [_unify(atom, f, e)] if e2 is not None]
    locals_ = local_negative_vars(rule)
    pending = list(rule.builtins)
    while pending:
        progressed = False
        for item in list(pending):
            needed = item.inputs()
            if all(all(v in e for v in needed) for e in envs) or not envs:
                out = []
                for env in envs:
                    if isinstance(item, Bind):
                        value = _eval_expr(item.expr, env)
                        if item.target in env:
                            if env[item.target] == value:
                                out.append(env)
                        else:
                            out.append({**env, item.target: value})
                    elif _compare(_value(item.left, env), item.op, _value(item.right, env)):
                        out.append(env)
                envs = out
                pending.remove(item)
                progressed = True
        if not progressed:
            raise ValueError("unschedulable builtin")
    idx_of = {id(item): i for i, item in enumerate(rule.body)}
    result = []
    for env in envs:
        blocked = False
        for atom in rule.negative:
            local = locals_.get(idx_of[id(atom)], frozenset())
            probe = {k: v for k, v in env.items() if k not in local}
            if any(_unify(atom, f, probe) is not None for f in by_pred.get(atom.pred, ())):
                blocked = True
                break
        if not blocked:
            result.append(env)
    return result


def _median(values):
    return float(statistics.median(values))


def apply_rule(rule: Rule, facts: set) -> set:
    envs = bindings(rule, facts)
    head = rule.head
    if rule.aggregate is None:
        return {(head.pred, _value(head.s, e), _value(head.o, e)) for e in envs}
    agg = rule.aggregate
    rows = {tuple(sorted(((v.name, x) for v, x in e.items()), key=lambda t: t[0])) for e in envs}
    groups = {}
    for row in rows:
        env = dict(row)
        groups.setdefault(env[agg.group_var.name], []).append(env[agg.agg_var.name])
    out = set()
    fold = {"COUNT": lambda v: float(len(v)), "SUM": lambda v: float(sum(v)), "MAX": max,
            "MIN": min, "AVG": lambda v: sum(v) / len(v), "MED": _median}[agg.op]
    for key, values in groups.items():
        env = {agg.group_var: key, agg.result_var: fold(values)}
        out.add((head.pred, _value(head.s, env), _value(head.o, env)))
    return out


def _heads_feed(rule_a, rule_b):
    pa = rule_a.head.pred
    return [atom for atom in rule_b.atoms() if atom.pred == pa]


def strata(rules) -> list:
    """Rule groups in evaluation order (longest path, negation/aggregation strict)."""
    level = {r.id: 0 for r in rules}
    for _ in range(len(rules) + 1):
        changed = False
        for a in rules:
            for b in rules:
                for atom in _heads_feed(a, b):
                    strict = atom.negated or b.aggregate is not None
                    need = level[a.id] + (1 if strict else 0)
                    if level[b.id] < need:
                        level[b.id] = need
                        changed = True
        if not changed:
            break
    else:
        raise ValueError("not stratifiable")
    out = {}
    for r in rules:
        out.setdefault(level[r.id], []).append(r)
    return [out[k] for k in sorted(out)]


def naive_materialize(rules, edb) -> set:
    """Derived facts (head instances) of a stratified program, naively."""
    facts = set(edb)
    derived = set()
    for group in strata(list(rules)):
        while True:
            new = set()
            for rule in group:
                new |= apply_rule(rule, facts)
            fresh = new - facts
            derived |= new
            if not fresh:
                break
            facts |= fresh
    return derived


# -- random programs ----------------------------------------------------------------

X, Y, Z = Var("X"), Var("Y"), Var("Z")
EDB_PREDS = ["e1", "e2", "e3"]
IDB_PREDS = ["i1", "i2", "i3", "i4"]
CONSTS = ["a", "b", "c", "d"]


def random_atom(rng, preds, vars_, negated=False):
    s = rng.choice(vars_)
    o = rng.choice(vars_ + ["a"]) if rng.random() < 0.2 else rng.choice(vars_)
    return Atom(rng.choice(preds), s, o, negated)


def random_rule(rng, rid, allow_negation=True):
    head_pred = rng.choice(IDB_PREDS)
    n_pos = rng.choice([1, 1, 2, 2, 3])
    pool = [X, Y, Z]
    # the first atom leans towards EDB predicates so most programs derive something
    first = EDB_PREDS if rng.random() < 0.6 else EDB_PREDS + IDB_PREDS
    body = [random_atom(rng, first, pool)]
    body += [random_atom(rng, EDB_PREDS + IDB_PREDS, pool) for _ in range(n_pos - 1)]
    bound = set()
    for a in body:
        bound |= a.variables()
    bound = sorted(bound, key=lambda v: v.name)
    if allow_negation and rng.random() < 0.35:
        s = rng.choice(bound)
        o = rng.choice(bound + [Var("W")])
        body.append(Atom(rng.choice(EDB_PREDS + IDB_PREDS), s, o, True))
    if rng.random() < 0.2 and len(bound) >= 2:
        body.append(Comp(bound[0], "!=", bound[1]))
    head = Atom(head_pred, rng.choice(bound), rng.choice(bound))
    return check_rule(Rule(rid, head, tuple(body)))


def random_program(rng, n_rules=None, allow_negation=True):
    n_rules = n_rules or rng.randint(1, 6)
    return [random_rule(rng, f"r{i + 1}", allow_negation) for i in range(n_rules)]


def random_facts(rng, n=None):
    n = rng.randint(0, 30) if n is None else n
    return {(rng.choice(EDB_PREDS), rng.choice(CONSTS), rng.choice(CONSTS)) for _ in range(n)}


def random_aggregate_rule(rng, rid, source):
    op = rng.choice(["COUNT", "SUM", "MAX", "MIN", "AVG", "MED"])
    head = Atom("agg_" + rid, X, Var("R"))
    body = (Atom(source, X, Y), Atom("val", Y, Var("T")))
    return check_rule(Rule(rid, head, body, Aggregate(X, op, Var("T"), Var("R"))))
