"""Surface syntax for rules and facts.

Rules::

    r2: p11(X, Y) :- p11(X, Z) ∧ p11(Z, Y) ∧ COMP(X, !=, Y).
    r4: h(X, Z) :- AGGREGATE(b(X, Y) ∧ v(Y, T)) ON X WITH MED(T) AS Z.

Conjunctions may be written ``∧``, ``and`` or ``,``.  Keywords are case
insensitive.  Facts are either functional (``p(a, b).``) or an N-Triples
subset (``<a> <p> <b> .``).
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import AggregateError, RuleSyntaxError
from .model import (AGGREGATE_OPS, COMPARATORS, RDF_TYPE, RDF_TYPE_IRI, Abs, Aggregate,
                    Atom, BinOp, Bind, Comp, Literal, Neg, Rule, Var, check_rule,
                    is_variable_name, make_number)

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<iri><[^\s<>"{}|^`\\,()]*>)
  | (?P<string>"(?:[^"\\]|\\.)*")(?:\^\^(?P<dtype><[^\s<>]*>))?
  | (?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>\?[A-Za-z_][A-Za-z0-9_]*|[A-Za-z_][A-Za-z0-9_]*(?::[A-Za-z_][A-Za-z0-9_]*)?)
  | (?P<op>:-|<-|!=|>=|<=|∧|[(),.=<>+\-*/])
""", re.VERBOSE)

_RULE_ID = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_\-]*)\s*:\s+(?=\S)")
_NUMERIC_TYPES = ("decimal", "double", "float", "integer", "int", "long")


class _Tok:
    __slots__ = ("kind", "text", "value", "pos")

    def __init__(self, kind, text, value, pos):
        self.kind, self.text, self.value, self.pos = kind, text, value, pos

    def __repr__(self):
        return f"{self.kind}:{self.text}"


def _tokenize(text: str, line=None, source=None):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise RuleSyntaxError(f"unexpected character {text[pos]!r} at column {pos + 1}",
                                  line, source)
        kind = m.lastgroup
        if kind == "dtype":
            kind = "string"
        if kind != "ws":
            tok_text = m.group(0)
            if kind == "iri":
                value = tok_text[1:-1]
                if value == RDF_TYPE_IRI:
                    value = RDF_TYPE
            elif kind == "string":
                raw = m.group("string")[1:-1]
                value = re.sub(r"\\(.)", r"\1", raw)
                dtype = m.group("dtype")
                if dtype and any(dtype.rstrip(">").lower().endswith(t) for t in _NUMERIC_TYPES):
                    try:
                        value = make_number(value)
                        kind = "number"
                    except ValueError:
                        raise RuleSyntaxError(f"bad numeric literal {raw!r}", line, source)
                else:
                    value = Literal(value)
            elif kind == "number":
                value = make_number(tok_text)
            else:
                value = tok_text
            out.append(_Tok(kind, tok_text, value, pos))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text, line=None, source=None):
        self.toks = _tokenize(text, line, source)
        self.i = 0
        self.line = line
        self.source = source

    # token helpers
    def peek(self, offset=0):
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def error(self, message):
        tok = self.peek()
        where = f" near {tok.text!r}" if tok else " at end of input"
        raise RuleSyntaxError(message + where, self.line, self.source)

    def next(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        self.i += 1
        return tok

    def at_op(self, *ops):
        tok = self.peek()
        return tok is not None and tok.kind == "op" and tok.text in ops

    def at_kw(self, *words):
        tok = self.peek()
        return tok is not None and tok.kind == "ident" and tok.text.upper() in words

    def expect_op(self, op):
        if not self.at_op(op):
            self.error(f"expected {op!r}")
        return self.next()

    def expect_kw(self, word):
        if not self.at_kw(word):
            self.error(f"expected {word}")
        return self.next()

    def done(self):
        return self.i >= len(self.toks)

    # grammar
    def term(self, allow_vars=True):
        tok = self.next()
        if tok.kind == "op" and tok.text == "-":
            num = self.next()
            if num.kind != "number":
                self.error("expected a number after '-'")
            return -num.value
        if tok.kind in ("iri", "string", "number"):
            return tok.value
        if tok.kind == "ident":
            if is_variable_name(tok.text):
                if not allow_vars:
                    self.i -= 1
                    self.error("variables are not allowed in facts")
                return Var(tok.text)
            return tok.text
        self.i -= 1
        self.error("expected a term")

    def predicate(self):
        tok = self.next()
        if tok.kind == "iri":
            return tok.value
        if tok.kind == "ident" and not tok.text.startswith("?"):
            return tok.text
        self.i -= 1
        self.error("expected a predicate name")

    def atom(self, negated=False, allow_vars=True):
        pred = self.predicate()
        self.expect_op("(")
        first = self.term(allow_vars)
        if self.at_op(","):
            self.next()
            second = self.term(allow_vars)
            self.expect_op(")")
            return Atom(pred, first, second, negated)
        self.expect_op(")")
        return Atom.unary(pred, first, negated)

    def conj_sep(self):
        if self.at_op(",", "∧"):
            self.next()
            return True
        if self.at_kw("AND"):
            self.next()
            return True
        return False

    def body_item(self):
        if self.at_kw("NOT"):
            self.next()
            return self.atom(negated=True)
        if self.at_kw("BIND") and self._call_follows():
            return self.bind()
        if self.at_kw("COMP") and self._call_follows():
            return self.comp()
        return self.atom()

    def _call_follows(self):
        nxt = self.peek(1)
        return nxt is not None and nxt.kind == "op" and nxt.text == "("

    def bind(self):
        self.next()
        self.expect_op("(")
        expr = self.expr()
        self.expect_kw("AS")
        target = self.term()
        if not isinstance(target, Var):
            self.error("BIND target must be a variable")
        self.expect_op(")")
        return Bind(expr, target)

    def comp(self):
        self.next()
        self.expect_op("(")
        left = self.term()
        self.expect_op(",")
        tok = self.next()
        if tok.kind != "op" or tok.text not in COMPARATORS:
            self.i -= 1
            self.error("expected a comparator (>, >=, =, <=, <, !=)")
        self.expect_op(",")
        right = self.term()
        self.expect_op(")")
        return Comp(left, tok.text, right)

    def expr(self):
        left = self.mul()
        while self.at_op("+", "-"):
            op = self.next().text
            left = BinOp(op, left, self.mul())
        return left

    def mul(self):
        left = self.unary()
        while self.at_op("*", "/"):
            op = self.next().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self):
        if self.at_op("-"):
            self.next()
            inner = self.unary()
            if isinstance(inner, float):
                return -inner
            return Neg(inner)
        if self.at_op("("):
            self.next()
            inner = self.expr()
            self.expect_op(")")
            return inner
        if self.at_kw("ABS") and self._call_follows():
            self.next()
            self.expect_op("(")
            inner = self.expr()
            self.expect_op(")")
            return Abs(inner)
        tok = self.next()
        if tok.kind == "number":
            return tok.value
        if tok.kind == "ident" and is_variable_name(tok.text):
            return Var(tok.text)
        self.i -= 1
        self.error("expected a number or variable in expression")

    def rule(self, rule_id):
        head = self.atom()
        if not self.at_op(":-", "<-"):
            self.error("expected ':-'")
        self.next()
        if self.at_kw("AGGREGATE") and self._call_follows():
            self.next()
            self.expect_op("(")
            body = [self.atom()]
            while self.conj_sep():
                body.append(self.atom())
            self.expect_op(")")
            self.expect_kw("ON")
            group = self.term()
            self.expect_kw("WITH")
            op_tok = self.next()
            if op_tok.kind != "ident":
                self.i -= 1
                self.error("expected an aggregate operator")
            op = op_tok.text.upper()
            self.expect_op("(")
            agg_var = self.term()
            self.expect_op(")")
            self.expect_kw("AS")
            result = self.term()
            self.expect_op(".")
            if not self.done():
                self.error("trailing input after rule")
            for v, what in ((group, "ON"), (agg_var, "aggregated"), (result, "AS")):
                if not isinstance(v, Var):
                    raise AggregateError(f"{rule_id}: {what} argument must be a variable")
            if op not in AGGREGATE_OPS:
                raise AggregateError(f"{rule_id}: unknown aggregate operator {op_tok.text}")
            return Rule(rule_id, head, tuple(body), Aggregate(group, op, agg_var, result))
        body = [self.body_item()]
        while self.conj_sep():
            body.append(self.body_item())
        self.expect_op(".")
        if not self.done():
            self.error("trailing input after rule")
        return Rule(rule_id, head, tuple(body))


def split_rule_id(text: str):
    m = _RULE_ID.match(text)
    if m and not text[m.end(1):].lstrip().startswith(":-"):
        return m.group(1), text[m.end():]
    return None, text


def parse_rule(text: str, rule_id: str = None, line=None, source=None) -> Rule:
    """Parse one rule terminated by ``.``; an ``id:`` prefix names the rule."""
    found_id, body = split_rule_id(text)
    if rule_id is None:
        rule_id = found_id or ""
    head_is_negated = body.lstrip().lower().startswith("not ")
    if head_is_negated:
        raise RuleSyntaxError("rule head cannot be negated", line, source)
    rule = _Parser(body, line, source).rule(rule_id)
    return check_rule(rule)


def parse_aggregate_rule(text: str, rule_id: str = None) -> Rule:
    rule = parse_rule(text, rule_id)
    if rule.aggregate is None:
        raise AggregateError(f"{rule.id or 'rule'}: not an AGGREGATE rule")
    return rule


def _strip_comment(line: str) -> str:
    if line.lstrip().startswith("#") or line.lstrip().startswith("%"):
        return ""
    return line


def parse_rules(text: str, source=None, id_prefix="r") -> list:
    """Parse a rule file: one rule per line, ``#`` comments and blank lines skipped.

    Rules without an explicit id get ``r<line-number>``.
    """
    rules = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        rule = parse_rule(line, line=line_no, source=source)
        if not rule.id:
            rule = rule.with_id(f"{id_prefix}{line_no}")
        rules.append(rule)
    return rules


def parse_fact(text: str, line=None, source=None, fmt=None) -> tuple:
    """Parse one ground fact; ``fmt`` pins the surface form to ``"nt"`` or ``"dl"``."""
    parser = _Parser(text, line, source)
    first = parser.peek()
    if first is None:
        raise RuleSyntaxError("empty fact", line, source)
    triple_form = first.kind in ("iri", "string", "number") or (
        first.kind == "ident" and not parser._call_follows())
    if fmt == "nt" and not triple_form:
        raise RuleSyntaxError("expected an N-Triples line '<s> <p> <o> .'", line, source)
    if fmt == "dl" and triple_form:
        raise RuleSyntaxError("expected a fact of the form 'p(s, o).'", line, source)
    if triple_form:
        subj = parser.term(allow_vars=False)
        pred = parser.predicate()
        obj = parser.term(allow_vars=False)
        parser.expect_op(".")
        fact = (pred, subj, obj)
    else:
        fact = parser.atom(allow_vars=False).as_fact()
        parser.expect_op(".")
    if not parser.done():
        parser.error("trailing input after fact")
    return fact


def parse_facts(text: str, source=None, fmt=None) -> list:
    """Parse a fact file in either the N-Triples subset or ``p(s, o).`` form."""
    facts = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        facts.append(parse_fact(line, line_no, source, fmt))
    return facts


def read_rules(path) -> list:
    path = Path(path)
    return parse_rules(path.read_text(encoding="utf-8"), source=str(path))


def sniff_format(path) -> str:
    return "nt" if str(path).endswith(".nt") else "dl"


def read_facts(path, fmt=None) -> list:
    """Read a fact file; without ``fmt`` the form follows the extension (``.nt`` or other)."""
    path = Path(path)
    if fmt is None:
        fmt = sniff_format(path)
    return parse_facts(path.read_text(encoding="utf-8"), source=str(path), fmt=fmt)
