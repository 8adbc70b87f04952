"""Left-deep join planning.

Body elements are bucketed into heuristic classes and the classes are
ordered as::

    P(S,O) > P(?s,O) = P(S,?o) > P(?s,?o) > C(?s) > Bind > Comp
      > not P(S,O) > not P(?s,O) = not P(S,?o) > not P(?s,?o) > not C(?s)

Within a class, atoms with fewer facts come first, then source order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PlanError
from .model import RDF_TYPE, Atom, Bind, Comp, Rule, Var, local_negative_vars

CLASS_NAMES = {
    0: "P(S,O)",
    1: "P(?s,O)|P(S,?o)",
    2: "P(?s,?o)",
    3: "C(?s)",
    4: "Bind",
    5: "Comp",
    6: "not P(S,O)",
    7: "not P(?s,O)|not P(S,?o)",
    8: "not P(?s,?o)",
    9: "not C(?s)",
}


def atom_class(atom: Atom, known=frozenset()) -> int:
    """Heuristic class of an atom; variables in ``known`` count as constants."""

    def const(t):
        return not isinstance(t, Var) or t in known

    s_const, o_const = const(atom.s), const(atom.o)
    if s_const and o_const:
        base = 0
    elif atom.pred == RDF_TYPE and not isinstance(atom.o, Var):
        base = 3
    elif s_const or o_const:
        base = 1
    else:
        base = 2
    return base + 6 if atom.negated else base


@dataclass
class PlanStep:
    index: int  # position in rule.body
    item: object
    klass: int
    count: int = 0
    source: str = "full"  # full | delta | pinned
    access: str = ""
    as_positive: bool = False  # a negated atom matched positively against a pinned store

    def describe(self) -> str:
        from .model import render_item

        item = self.item
        if self.as_positive:
            item = Atom(item.pred, item.s, item.o)
        text = render_item(item)
        extra = f" via {self.access}" if self.access else ""
        src = "" if self.source == "full" else f" [{self.source}]"
        cls = CLASS_NAMES.get(self.klass, "?")
        return f"{text:<48} class={cls} count={self.count}{extra}{src}"


@dataclass
class JoinPlan:
    rule: Rule
    steps: list = field(default_factory=list)
    prebound: frozenset = frozenset()

    @property
    def order(self) -> tuple:
        return tuple(s.index for s in self.steps)

    def signature(self) -> tuple:
        return (self.order, tuple(s.source for s in self.steps),
                tuple(s.as_positive for s in self.steps), self.prebound)

    def describe(self) -> str:
        lines = [f"plan {self.rule.id}:"]
        for k, step in enumerate(self.steps, 1):
            lines.append(f"  {k}. {step.describe()}")
        if self.rule.aggregate is not None:
            agg = self.rule.aggregate
            lines.append(f"  {len(self.steps) + 1}. AGGREGATE ON {agg.group_var} "
                         f"WITH {agg.op}({agg.agg_var}) AS {agg.result_var}")
        return "\n".join(lines)


def _annotate_access(plan: JoinPlan) -> JoinPlan:
    bound = set(plan.prebound)
    for step in plan.steps:
        item = step.item
        if isinstance(item, Atom):
            if item.negated and not step.as_positive:
                step.access = "exists"
                continue

            def known(t):
                return not isinstance(t, Var) or t in bound

            s_known, o_known = known(item.s), known(item.o)
            if s_known and o_known:
                step.access = "lookup"
            elif s_known:
                step.access = "PSO"
            elif o_known:
                step.access = "POS"
            else:
                step.access = "scan"
            bound |= item.variables()
        elif isinstance(item, Bind):
            bound.add(item.target)
    return plan


def plan_rule(rule: Rule, statistics=None, *, pinned=None, pinned_count=None,
              prebound=frozenset(), ignore_negation=False) -> JoinPlan:
    """Order the body of ``rule``.

    ``statistics`` maps predicate -> fact count (missing means 0).  ``pinned``
    is the body index of an atom read from a delta/pinned store instead of
    the full relation; its count is ``pinned_count``.  A pinned negated atom
    is matched positively.  With ``ignore_negation`` negated atoms other
    than the pinned one are dropped from the plan.
    """
    statistics = statistics or {}
    prebound = frozenset(prebound)
    entries = []
    for idx, item in enumerate(rule.body):
        if isinstance(item, Atom):
            as_positive = item.negated and idx == pinned
            if item.negated and not as_positive and ignore_negation:
                continue
            probe = Atom(item.pred, item.s, item.o) if as_positive else item
            klass = atom_class(probe, prebound)
            if idx == pinned and pinned_count is not None:
                count = pinned_count
            else:
                count = statistics.get(item.pred, 0)
            source = "pinned" if as_positive else ("delta" if idx == pinned else "full")
            entries.append(PlanStep(idx, item, klass, count, source, as_positive=as_positive))
        elif isinstance(item, Bind):
            entries.append(PlanStep(idx, item, 4))
        elif isinstance(item, Comp):
            entries.append(PlanStep(idx, item, 5))
    entries.sort(key=lambda e: (e.klass, e.count, e.index))
    plan = JoinPlan(rule, _schedule_builtins(rule, entries, prebound), prebound)
    return _annotate_access(plan)


def _schedule_builtins(rule, entries, prebound):
    """Keep class order but delay builtins/negations until their inputs are bound."""
    positives = [e for e in entries if e.klass < 4 or (isinstance(e.item, Atom) and e.as_positive)]
    positives.sort(key=lambda e: (e.klass % 6, e.count, e.index))
    builtins = [e for e in entries if e.klass in (4, 5)]
    negatives = [e for e in entries if e.klass >= 6 and not e.as_positive]
    bound = set(prebound)
    for e in positives:
        bound |= e.item.variables()
    ordered = list(positives)
    pending = list(builtins)
    while pending:
        progressed = False
        for e in list(pending):
            ready = e.item.inputs() <= bound
            # a BIND is scheduled before any COMP of the same rank
            if ready and isinstance(e.item, Comp) and any(
                    isinstance(p.item, Bind) and p.item.inputs() <= bound for p in pending):
                continue
            if ready:
                ordered.append(e)
                pending.remove(e)
                if isinstance(e.item, Bind):
                    bound.add(e.item.target)
                progressed = True
                break
        if not progressed:
            names = ", ".join(sorted(str(v) for p in pending for v in p.item.inputs() - bound))
            raise PlanError(f"{rule.id}: builtin inputs can never be bound ({names})")
    locals_ = local_negative_vars(rule)
    for e in negatives:
        needed = e.item.variables() - locals_.get(e.index, frozenset())
        if not needed <= bound:
            names = ", ".join(sorted(str(v) for v in needed - bound))
            raise PlanError(f"{rule.id}: negated atom uses unbound variable(s) {names}")
    return ordered + negatives


def plan_from_order(rule: Rule, order, prebound=frozenset()) -> JoinPlan:
    """Build a plan with an explicit body order; raises PlanError if it is not legal."""
    steps = []
    for idx in order:
        item = rule.body[idx]
        klass = 4 if isinstance(item, Bind) else 5 if isinstance(item, Comp) else atom_class(item)
        steps.append(PlanStep(idx, item, klass))
    plan = JoinPlan(rule, steps, frozenset(prebound))
    check_legal(plan)
    return _annotate_access(plan)


def check_legal(plan: JoinPlan) -> None:
    bound = set(plan.prebound)
    locals_ = local_negative_vars(plan.rule)
    for step in plan.steps:
        item = step.item
        if isinstance(item, Atom) and (not item.negated or step.as_positive):
            bound |= item.variables()
        elif isinstance(item, Atom):
            needed = item.variables() - locals_.get(step.index, frozenset())
            if not needed <= bound:
                raise PlanError(f"{plan.rule.id}: negated atom before its variables are bound")
        else:
            if not item.inputs() <= bound:
                raise PlanError(f"{plan.rule.id}: builtin before its inputs are bound")
            if isinstance(item, Bind):
                bound.add(item.target)
