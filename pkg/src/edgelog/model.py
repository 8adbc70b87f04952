"""Terms, atoms, builtins and rules.

Constants are plain Python values: an IRI is a ``str``, a number is a
``float`` and a string literal is a :class:`Literal`.  Variables are
:class:`Var` instances.  A ground fact is the triple ``(predicate, subject,
object)``; unary atoms ``C(x)`` are stored as ``(rdf:type, x, C)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .errors import AggregateError, SafetyError

RDF_TYPE = "rdf:type"
RDF_TYPE_IRI = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

COMPARATORS = (">", ">=", "=", "<=", "<", "!=")
AGGREGATE_OPS = ("MAX", "MIN", "AVG", "COUNT", "SUM", "MED")
ARITH_OPS = ("+", "-", "*", "/")


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Literal:
    """A plain string literal, kept distinct from IRIs of the same text."""

    value: str

    def __str__(self):
        return self.value


Const = Union[str, float, Literal]
Term = Union[Var, Const]
Fact = tuple  # (predicate, subject, object)


def is_var(term) -> bool:
    return isinstance(term, Var)


def term_kind(term) -> str:
    if isinstance(term, Var):
        return "variable"
    if isinstance(term, float):
        return "numeric-literal"
    if isinstance(term, Literal):
        return "string-literal"
    if isinstance(term, str):
        return "iri"
    raise TypeError(f"not a term: {term!r}")


def make_number(value) -> float:
    number = float(value)
    if not math.isfinite(number):
        raise ValueError(f"numeric literal must be finite, got {value!r}")
    return number


def is_variable_name(name: str) -> bool:
    return bool(name) and (name[0] == "?" or name[0].isupper())


_NAT = re.compile(r"(\d+)")


def natural_key(text: str):
    """Sort key putting ``r2`` before ``r10``."""
    return tuple(int(part) if part.isdigit() else part for part in _NAT.split(text))


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    s: Term
    o: Term
    negated: bool = False

    @classmethod
    def unary(cls, cls_name: str, term: Term, negated: bool = False) -> "Atom":
        return cls(RDF_TYPE, term, cls_name, negated)

    @property
    def terms(self):
        return (self.s, self.o)

    def variables(self) -> set:
        return {t for t in (self.s, self.o) if isinstance(t, Var)}

    def is_ground(self) -> bool:
        return not isinstance(self.s, Var) and not isinstance(self.o, Var)

    def as_fact(self) -> Fact:
        return (self.pred, self.s, self.o)

    @property
    def key(self) -> str:
        return relation_key(self.pred, self.o)


def relation_key(pred, obj) -> str:
    """Dependency key of an atom.

    ``rdf:type`` atoms with a constant class are keyed by that class, so
    two unrelated unary predicates never look dependent on each other.
    """
    if pred == RDF_TYPE and not isinstance(obj, Var):
        return f"{RDF_TYPE}|{obj}"
    return pred


def keys_overlap(a: str, b: str) -> bool:
    if a == b:
        return True
    if a == RDF_TYPE:
        return b.startswith(RDF_TYPE + "|")
    if b == RDF_TYPE:
        return a.startswith(RDF_TYPE + "|")
    return False


# -- arithmetic expressions used by BIND ---------------------------------


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Abs:
    arg: "Expr"


@dataclass(frozen=True, slots=True)
class Neg:
    arg: "Expr"


Expr = Union[BinOp, Abs, Neg, Var, float]


def expr_variables(expr) -> set:
    if isinstance(expr, Var):
        return {expr}
    if isinstance(expr, BinOp):
        return expr_variables(expr.left) | expr_variables(expr.right)
    if isinstance(expr, (Abs, Neg)):
        return expr_variables(expr.arg)
    return set()


@dataclass(frozen=True, slots=True)
class Bind:
    expr: Expr
    target: Var

    def inputs(self) -> set:
        return expr_variables(self.expr)


@dataclass(frozen=True, slots=True)
class Comp:
    left: Term
    op: str
    right: Term

    def inputs(self) -> set:
        return {t for t in (self.left, self.right) if isinstance(t, Var)}


@dataclass(frozen=True, slots=True)
class Aggregate:
    group_var: Var
    op: str
    agg_var: Var
    result_var: Var


BodyItem = Union[Atom, Bind, Comp]


@dataclass(frozen=True)
class Rule:
    """A rule with its body elements in source order.

    For an aggregate rule ``body`` holds the aggregated conjunction and
    ``aggregate`` the grouping payload.
    """

    id: str
    head: Atom
    body: tuple
    aggregate: Optional[Aggregate] = None

    @property
    def positive(self) -> tuple:
        return tuple(b for b in self.body if isinstance(b, Atom) and not b.negated)

    @property
    def negative(self) -> tuple:
        return tuple(b for b in self.body if isinstance(b, Atom) and b.negated)

    @property
    def builtins(self) -> tuple:
        return tuple(b for b in self.body if isinstance(b, (Bind, Comp)))

    def atoms(self) -> Iterator[Atom]:
        return (b for b in self.body if isinstance(b, Atom))

    def with_id(self, rule_id: str) -> "Rule":
        return Rule(rule_id, self.head, self.body, self.aggregate)

    def __str__(self):
        return render_rule(self)


@dataclass
class Program:
    """Ordered rules keyed by id plus the explicit fact store."""

    rules: dict = field(default_factory=dict)
    edb: object = None

    def __post_init__(self):
        if self.edb is None:
            from .storage import DataStore

            self.edb = DataStore()


# -- validation ---------------------------------------------------------


def local_negative_vars(rule: Rule) -> dict:
    """Map each negated atom index (in ``rule.body``) to its locally existential vars."""
    bound = set()
    for atom in rule.positive:
        bound |= atom.variables()
    bound |= {b.target for b in rule.builtins if isinstance(b, Bind)}
    counts: dict = {}
    for atom in rule.negative:
        for v in atom.variables() - bound:
            counts[v] = counts.get(v, 0) + 1
    out = {}
    for idx, item in enumerate(rule.body):
        if isinstance(item, Atom) and item.negated:
            out[idx] = frozenset(v for v in item.variables() - bound if counts[v] == 1)
    return out


def check_rule(rule: Rule) -> Rule:
    """Raise SafetyError / AggregateError when ``rule`` is not well formed."""
    if rule.aggregate is not None:
        return _check_aggregate(rule)
    positive_vars = set()
    for atom in rule.positive:
        positive_vars |= atom.variables()
    bind_targets = set()
    for item in rule.builtins:
        if isinstance(item, Bind):
            if item.target in positive_vars:
                raise SafetyError(
                    f"{rule.id}: BIND target {item.target} is already bound by a body atom")
            if item.target in bind_targets:
                raise SafetyError(f"{rule.id}: BIND target {item.target} assigned twice")
            bind_targets.add(item.target)
    bound = positive_vars | bind_targets
    for v in rule.head.variables():
        if v not in bound:
            raise SafetyError(f"{rule.id}: head variable {v} does not occur in a positive body atom")
    for item in rule.builtins:
        missing = item.inputs() - bound
        if missing:
            kind = "BIND" if isinstance(item, Bind) else "COMP"
            names = ", ".join(sorted(str(v) for v in missing))
            raise SafetyError(f"{rule.id}: {kind} uses unbound variable(s) {names}")
    seen_local: dict = {}
    for atom in rule.negative:
        for v in atom.variables() - bound:
            if v in seen_local:
                raise SafetyError(
                    f"{rule.id}: variable {v} occurs only under negation, in more than one atom")
            seen_local[v] = atom
    return rule


def _check_aggregate(rule: Rule) -> Rule:
    agg = rule.aggregate
    if agg.op not in AGGREGATE_OPS:
        raise AggregateError(f"{rule.id}: unknown aggregate operator {agg.op}")
    if rule.negative or rule.builtins:
        raise AggregateError(f"{rule.id}: aggregated body must contain positive atoms only")
    if not rule.positive:
        raise AggregateError(f"{rule.id}: empty aggregated body")
    body_vars = set()
    for atom in rule.positive:
        body_vars |= atom.variables()
    for v, what in ((agg.group_var, "group"), (agg.agg_var, "aggregated")):
        if v not in body_vars:
            raise AggregateError(f"{rule.id}: {what} variable {v} does not occur in the body")
    head_vars = rule.head.variables()
    if agg.result_var not in head_vars:
        raise AggregateError(f"{rule.id}: result variable {agg.result_var} missing from the head")
    if agg.result_var in body_vars:
        raise AggregateError(f"{rule.id}: result variable {agg.result_var} occurs in the body")
    extra = head_vars - {agg.group_var, agg.result_var}
    if extra:
        names = ", ".join(sorted(str(v) for v in extra))
        raise SafetyError(f"{rule.id}: head variable(s) {names} are neither grouped nor aggregated")
    return rule


def check_program_rules(rules) -> None:
    """Registration-time checks spanning several rules."""
    ids = set()
    heads: dict = {}
    for rule in rules:
        if rule.id in ids:
            from .errors import DuplicateRuleError

            raise DuplicateRuleError(f"duplicate rule id {rule.id}")
        ids.add(rule.id)
        heads.setdefault(rule.head.key, []).append(rule)
    for key, owners in heads.items():
        if len(owners) > 1 and any(r.aggregate is not None for r in owners):
            names = ", ".join(r.id for r in owners)
            raise AggregateError(
                f"aggregate head {key} is defined by more than one rule ({names})")


# -- rendering ----------------------------------------------------------

_BARE_IRI = re.compile(r"^[a-z_][A-Za-z0-9_]*(?::[A-Za-z0-9_]+)?$")
_BARE_PRED = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(?::[A-Za-z0-9_]+)?$")
_KEYWORDS = {"NOT", "AND", "BIND", "COMP", "AGGREGATE", "ON", "WITH", "AS", "ABS"}


def render_term(term) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, float):
        return repr(term)
    if isinstance(term, Literal):
        escaped = term.value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if _BARE_IRI.match(term) and term.upper() not in _KEYWORDS:
        return term
    return f"<{term}>"


def render_pred(pred: str) -> str:
    if _BARE_PRED.match(pred) and pred.upper() not in _KEYWORDS:
        return pred
    return f"<{pred}>"


def render_atom(atom: Atom) -> str:
    prefix = "not " if atom.negated else ""
    if (atom.pred == RDF_TYPE and isinstance(atom.o, str) and not isinstance(atom.o, Var)
            and _BARE_PRED.match(atom.o) and atom.o.upper() not in _KEYWORDS):
        return f"{prefix}{atom.o}({render_term(atom.s)})"
    return f"{prefix}{render_pred(atom.pred)}({render_term(atom.s)}, {render_term(atom.o)})"


def render_expr(expr, top=True) -> str:
    if isinstance(expr, BinOp):
        text = f"{render_expr(expr.left, False)} {expr.op} {render_expr(expr.right, False)}"
        return text if top else f"({text})"
    if isinstance(expr, Abs):
        return f"abs({render_expr(expr.arg)})"
    if isinstance(expr, Neg):
        return f"-{render_expr(expr.arg, False)}"
    return render_term(expr)


def render_item(item) -> str:
    if isinstance(item, Atom):
        return render_atom(item)
    if isinstance(item, Bind):
        return f"BIND({render_expr(item.expr)} AS {item.target.name})"
    if isinstance(item, Comp):
        return f"COMP({render_term(item.left)}, {item.op}, {render_term(item.right)})"
    raise TypeError(item)


def render_rule(rule: Rule, with_id: bool = True) -> str:
    prefix = f"{rule.id}: " if with_id and rule.id else ""
    head = render_atom(rule.head)
    body = " ∧ ".join(render_item(b) for b in rule.body)
    if rule.aggregate is not None:
        agg = rule.aggregate
        return (f"{prefix}{head} :- AGGREGATE({body}) ON {agg.group_var.name} "
                f"WITH {agg.op}({agg.agg_var.name}) AS {agg.result_var.name}.")
    return f"{prefix}{head} :- {body}."


def render_fact_dl(fact: Fact) -> str:
    p, s, o = fact
    return render_atom(Atom(p, s, o)) + "."


def render_fact_nt(fact: Fact) -> str:
    p, s, o = fact
    pred = RDF_TYPE_IRI if p == RDF_TYPE else p
    return f"{_nt_term(s)} <{pred}> {_nt_term(o)} ."


def _nt_term(term) -> str:
    if isinstance(term, float):
        return f'"{term!r}"^^<http://www.w3.org/2001/XMLSchema#double>'
    if isinstance(term, Literal):
        escaped = term.value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return f"<{term}>"


def fact_sort_key(fact: Fact):
    return tuple((term_kind(t), str(t)) for t in fact)
