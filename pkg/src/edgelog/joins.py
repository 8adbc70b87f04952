"""Compile a JoinPlan into a Python function of nested loops.

The generated function has the signature ``fn(views, out, env)``:
``views[k]`` is the accessor for plan step ``k`` (a DataStore or a
:class:`~edgelog.storage.View`), ``out`` collects results and ``env``
carries values for the plan's prebound variables, in sorted-name order.

Modes:
  ``emit``      add head facts to ``out`` (a set)
  ``exists``    return True at the first head instantiation
  ``bindings``  add a tuple of all body variables to ``out``
"""

from __future__ import annotations

from .errors import ComparisonTypeError, InvariantViolation
from .model import Abs, Atom, BinOp, Bind, Comp, Neg, Var, local_negative_vars
from .planner import JoinPlan

_CACHE: dict = {}


def _num(x):
    if type(x) is not float:
        raise ComparisonTypeError(f"arithmetic on non-numeric value {x!r}")
    return x


def _ordered(a, b):
    if type(a) is not float or type(b) is not float:
        raise ComparisonTypeError(f"ordered comparison between {a!r} and {b!r}")
    return True


_ORD_OPS = {">": ">", ">=": ">=", "<": "<", "<=": "<="}


def sorted_vars(vars_) -> list:
    return sorted(vars_, key=lambda v: v.name)


def body_vars(rule) -> list:
    out = set()
    for item in rule.body:
        if isinstance(item, Atom) and not item.negated:
            out |= item.variables()
        elif isinstance(item, Bind):
            out.add(item.target)
    return sorted_vars(out)


class _Gen:
    def __init__(self, plan: JoinPlan, mode: str, out_vars=None):
        self.plan = plan
        self.mode = mode
        self.out_vars = out_vars
        self.lines = []
        self.consts = []
        self.names = {}
        self.bound = set()
        self.depth = 1
        self.tmp = 0

    def const(self, value):
        for i, c in enumerate(self.consts):
            if type(c) is type(value) and c == value:
                return f"K[{i}]"
        self.consts.append(value)
        return f"K[{len(self.consts) - 1}]"

    def var(self, v: Var):
        name = self.names.get(v)
        if name is None:
            name = self.names[v] = f"v{len(self.names)}"
        return name

    def fresh(self):
        self.tmp += 1
        return f"t{self.tmp}"

    def emit(self, line):
        self.lines.append("    " * self.depth + line)

    def open(self, line):
        self.emit(line)
        self.depth += 1

    def term(self, t):
        if isinstance(t, Var):
            return self.var(t)
        return self.const(t)

    def expr(self, e):
        if isinstance(e, Var):
            if e not in self.bound:
                raise InvariantViolation(f"expression variable {e} unbound")
            return f"_num({self.var(e)})"
        if isinstance(e, float):
            return repr(e)
        if isinstance(e, BinOp):
            return f"({self.expr(e.left)} {e.op} {self.expr(e.right)})"
        if isinstance(e, Abs):
            return f"abs({self.expr(e.arg)})"
        if isinstance(e, Neg):
            return f"(-{self.expr(e.arg)})"
        raise InvariantViolation(f"bad expression {e!r}")

    def positive(self, k, atom: Atom, dedup: bool, rename=None):
        rename = rename or {}
        s = rename.get(atom.s, atom.s)
        o = rename.get(atom.o, atom.o)
        P = self.const(atom.pred)
        acc = f"a{k}"
        s_known = not isinstance(s, Var) or s in self.bound
        o_known = not isinstance(o, Var) or o in self.bound
        suffix = "" if dedup else "_iter"
        if s_known and o_known:
            self.open(f"if {acc}.contains({P}, {self.term(s)}, {self.term(o)}):")
        elif s_known:
            self.open(f"for {self.var(o)} in {acc}.objects{suffix}({P}, {self.term(s)}):")
            self.bound.add(o)
        elif o_known:
            self.open(f"for {self.var(s)} in {acc}.subjects{suffix}({P}, {self.term(o)}):")
            self.bound.add(s)
        elif s == o:
            t = self.fresh()
            self.open(f"for {self.var(s)}, {t} in {acc}.pairs{suffix}({P}):")
            self.open(f"if {self.var(s)} == {t}:")
            self.bound.add(s)
        else:
            self.open(f"for {self.var(s)}, {self.var(o)} in {acc}.pairs{suffix}({P}):")
            self.bound.add(s)
            self.bound.add(o)

    def negative(self, k, atom: Atom, local):
        P = self.const(atom.pred)
        acc = f"a{k}"
        s_local = isinstance(atom.s, Var) and atom.s in local
        o_local = isinstance(atom.o, Var) and atom.o in local
        if s_local and o_local and atom.s == atom.o:
            t1, t2 = self.fresh(), self.fresh()
            self.open(f"if not any({t1} == {t2} for {t1}, {t2} in {acc}.pairs_iter({P})):")
            return
        s = "None" if s_local else self.term(atom.s)
        o = "None" if o_local else self.term(atom.o)
        self.open(f"if not {acc}.exists({P}, {s}, {o}):")

    def build(self):
        plan = self.plan
        rule = plan.rule
        locals_ = local_negative_vars(rule)
        pre = sorted_vars(plan.prebound)
        if pre:
            names = ", ".join(self.var(v) for v in pre)
            self.emit(f"{names}, = env")
            self.bound |= set(pre)
        for k, step in enumerate(plan.steps):
            if isinstance(step.item, Atom):
                self.emit(f"a{k} = views[{k}]")
        dedup = self.mode == "bindings"
        for k, step in enumerate(plan.steps):
            item = step.item
            if isinstance(item, Atom):
                if item.negated and not step.as_positive:
                    self.negative(k, item, locals_.get(step.index, frozenset()))
                elif step.as_positive:
                    # locally existential variables only range over this match
                    rename = {v: Var(f"_{v.name}#{k}") for v in locals_.get(step.index, ())}
                    self.positive(k, item, dedup, rename)
                else:
                    self.positive(k, item, dedup)
            elif isinstance(item, Bind):
                code = self.expr(item.expr)
                if item.target in self.bound:
                    self.open(f"if {self.var(item.target)} == {code}:")
                else:
                    self.emit(f"{self.var(item.target)} = {code}")
                    self.bound.add(item.target)
            elif isinstance(item, Comp):
                left, right = self.term(item.left), self.term(item.right)
                if item.op == "=":
                    self.open(f"if {left} == {right}:")
                elif item.op == "!=":
                    self.open(f"if {left} != {right}:")
                else:
                    self.open(f"if _ordered({left}, {right}) and {left} {_ORD_OPS[item.op]} {right}:")
        if self.mode == "emit":
            head = rule.head
            self.emit(f"out.add(({self.const(head.pred)}, {self.term(head.s)}, "
                      f"{self.term(head.o)}))")
        elif self.mode == "exists":
            self.emit("return True")
        elif self.mode == "bindings":
            names = ", ".join(self.var(v) for v in self.out_vars)
            self.emit(f"out.add(({names},))")
        else:
            raise ValueError(self.mode)
        body = "\n".join(self.lines)
        tail = "    return False\n" if self.mode == "exists" else ""
        return f"def _join(views, out, env):\n{body}\n{tail}"


def compile_plan(plan: JoinPlan, mode: str = "emit", out_vars=None):
    """Return ``(fn, source)`` for ``plan``; results are cached per plan shape."""
    key = (plan.rule, plan.signature(), mode, tuple(out_vars or ()))
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    gen = _Gen(plan, mode, out_vars)
    src = gen.build()
    namespace = {"K": tuple(gen.consts), "_num": _num, "_ordered": _ordered}
    exec(compile(src, f"<join {plan.rule.id}>", "exec"), namespace)
    result = (namespace["_join"], src)
    if len(_CACHE) > 20000:
        _CACHE.clear()
    _CACHE[key] = result
    return result
