"""Rule evaluation: joins, aggregates, per-node semi-naive fixpoints and full materialization."""

from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass, field

from .errors import ComparisonTypeError
from .graph import HRDG, RDG, build_hrdg, build_rdg, topological_order
from .joins import body_vars, compile_plan, sorted_vars
from .model import Atom, Program, Rule, Var, keys_overlap
from .planner import JoinPlan, plan_rule
from .storage import DataStore, DataStoreBag, View

log = logging.getLogger(__name__)


class Stats:
    """Instrumentation counters, keyed by hyper-node id."""

    def __init__(self, explain_plans=False, trace_fixpoint=False):
        self.explain_plans = explain_plans
        self.trace_fixpoint = trace_fixpoint
        self.reset()

    def reset(self):
        self.rule_evals = Counter()
        self.iterations = Counter()
        self.derived = Counter()
        self.trace = []
        self.plans = []
        self.timings = {}

    @property
    def total_evals(self) -> int:
        return sum(self.rule_evals.values())


@dataclass
class DeltaSet:
    """Facts added to / removed from a set of relations."""

    plus: DataStore = field(default_factory=DataStore)
    minus: DataStore = field(default_factory=DataStore)

    def __bool__(self):
        return bool(self.plus.count or self.minus.count)


def unify_head(head: Atom, fact) -> dict:
    """Variable assignment making ``head`` equal ``fact``, or None."""
    p, s, o = fact
    if head.pred != p:
        return None
    env = {}
    for term, value in ((head.s, s), (head.o, o)):
        if isinstance(term, Var):
            if term in env and env[term] != value:
                return None
            env[term] = value
        elif term != value or type(term) is not type(value):
            return None
    return env


class NodeContext:
    """Evaluation state for one hyper-node.

    Atoms over a predicate read every member of ``node.edb`` holding that
    predicate plus ``node.idb`` when the node itself defines the predicate.
    """

    def __init__(self, node, rules: dict, stats: Stats = None, rule_ids=None):
        self.node = node
        ids = node.sorted_rules() if rule_ids is None else [
            rid for rid in node.sorted_rules() if rid in rule_ids]
        self.rules = [rules[rid] for rid in ids]
        self.stats = stats if stats is not None else Stats()
        self._derive_plans = {}
        self.head_preds = {r.head.pred for r in self.rules}
        self.head_keys = {r.head.key for r in self.rules}
        self.local_atoms = {}
        for rule in self.rules:
            self.local_atoms[rule.id] = [
                i for i, item in enumerate(rule.body)
                if isinstance(item, Atom) and not item.negated and rule.aggregate is None
                and any(keys_overlap(item.key, k) for k in self.head_keys)]
        node.edb.refresh_index()

    def stores(self, pred, extra=()) -> list:
        found = list(self.node.edb.stores_for(pred))
        if pred in self.head_preds:
            found.append(self.node.idb)
        for ds in extra:
            if ds is not None and pred in ds.pso:
                found.append(ds)
        return found

    def view(self, pred, extra=()) -> View:
        return View(self.stores(pred, extra))

    def statistics(self, rule: Rule, extra=()) -> dict:
        stats = {}
        for atom in rule.atoms():
            if atom.pred not in stats:
                stats[atom.pred] = sum(ds.predicate_count(atom.pred)
                                       for ds in self.stores(atom.pred, extra))
        return stats

    def plan(self, rule, *, pinned=None, pin_store=None, prebound=frozenset(),
             ignore_negation=False, extra=()) -> JoinPlan:
        pinned_count = None
        if pinned is not None:
            pinned_count = pin_store.predicate_count(rule.body[pinned].pred)
        plan = plan_rule(rule, self.statistics(rule, extra), pinned=pinned,
                         pinned_count=pinned_count, prebound=prebound,
                         ignore_negation=ignore_negation)
        if self.stats.explain_plans:
            self.stats.plans.append((self.node.id, plan.describe()))
        return plan

    def views_for(self, plan: JoinPlan, pin_store=None, extra=()) -> list:
        views = []
        for step in plan.steps:
            item = step.item
            if not isinstance(item, Atom):
                views.append(None)
            elif step.source in ("delta", "pinned"):
                views.append(pin_store)
            else:
                views.append(self.view(item.pred, extra))
        return views

    def evaluate(self, rule: Rule, *, pinned=None, pin_store=None, ignore_negation=False,
                 extra=(), out=None) -> set:
        """Head facts of ``rule``; ``pinned`` restricts one body atom to ``pin_store``."""
        if out is None:
            out = set()
        if rule.aggregate is not None:
            out |= eval_aggregate(rule, self)
            return out
        plan = self.plan(rule, pinned=pinned, pin_store=pin_store,
                         ignore_negation=ignore_negation, extra=extra)
        fn, _ = compile_plan(plan, "emit")
        self.stats.rule_evals[self.node.id] += 1
        fn(self.views_for(plan, pin_store, extra), out, ())
        return out

    def derivable(self, rule: Rule, fact) -> bool:
        """True when ``fact`` has a one-step derivation by ``rule`` in the current state."""
        env = unify_head(rule.head, fact)
        if env is None:
            return False
        if rule.aggregate is not None:
            return fact in eval_aggregate(rule, self)
        pre = sorted_vars(env)
        key = (rule.id, tuple(pre))
        cached = self._derive_plans.get(key)
        if cached is None:
            # the edb index and idb handle are fixed for this context, so views are too
            plan = self.plan(rule, prebound=frozenset(pre))
            cached = (compile_plan(plan, "exists")[0], self.views_for(plan))
            self._derive_plans[key] = cached
        fn, views = cached
        self.stats.rule_evals[self.node.id] += 1
        return fn(views, None, tuple(env[v] for v in pre))


def eval_rule(rule: Rule, plan: JoinPlan, edb, idb_view, delta: DataStore = None) -> set:
    """Evaluate ``rule`` under ``plan`` over ``edb`` ∪ ``idb_view``.

    Steps whose source is ``delta`` read ``delta`` instead of the full
    relation.  ``edb`` and ``idb_view`` are DataStoreBags or DataStores.
    """
    sources = []
    for part in (edb, idb_view):
        if isinstance(part, DataStoreBag):
            sources.extend(part.stores)
        elif part is not None:
            sources.append(part)
    full = View(sources)
    views = []
    for step in plan.steps:
        if not isinstance(step.item, Atom):
            views.append(None)
        elif step.source in ("delta", "pinned"):
            views.append(delta)
        else:
            views.append(full)
    fn, _ = compile_plan(plan, "emit")
    out = set()
    fn(views, out, ())
    return out


def _numbers(values, op):
    for v in values:
        if type(v) is not float:
            raise ComparisonTypeError(f"{op} over non-numeric value {v!r}")
    return values


def median(values):
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    if n % 2:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2.0


def apply_aggregate(op: str, values: list) -> float:
    if op == "COUNT":
        return float(len(values))
    _numbers(values, op)
    if op == "SUM":
        return float(sum(values))
    if op == "MAX":
        return max(values)
    if op == "MIN":
        return min(values)
    if op == "AVG":
        return sum(values) / len(values)
    if op == "MED":
        return median(values)
    raise ValueError(op)


def eval_aggregate(rule: Rule, ctx: NodeContext) -> set:
    """Group distinct body bindings by the ON variable and fold the aggregated variable."""
    agg = rule.aggregate
    plan = ctx.plan(rule)
    out_vars = body_vars(rule)
    fn, _ = compile_plan(plan, "bindings", out_vars)
    ctx.stats.rule_evals[ctx.node.id] += 1
    rows = set()
    fn(ctx.views_for(plan), rows, ())
    gi = out_vars.index(agg.group_var)
    ai = out_vars.index(agg.agg_var)
    groups: dict = {}
    for row in rows:
        groups.setdefault(row[gi], []).append(row[ai])
    head = rule.head
    facts = set()
    for key, values in groups.items():
        result = apply_aggregate(agg.op, values)
        env = {agg.group_var: key, agg.result_var: result}
        s = env.get(head.s, head.s) if isinstance(head.s, Var) else head.s
        o = env.get(head.o, head.o) if isinstance(head.o, Var) else head.o
        facts.add((head.pred, s, o))
    return facts


def propagate(ctx: NodeContext, delta: DataStore, added: list, iteration: int = 1) -> int:
    """Semi-naive continuation: fire local-atom variants pinned to ``delta`` until nothing is new.

    Newly inserted facts are appended to ``added``.  Returns the final
    iteration number.
    """
    idb = ctx.node.idb
    while delta.count:
        iteration += 1
        new = set()
        for rule in ctx.rules:
            for idx in ctx.local_atoms[rule.id]:
                if rule.body[idx].pred in delta.pso:
                    ctx.evaluate(rule, pinned=idx, pin_store=delta, out=new)
        delta = DataStore()
        for fact in new:
            if idb.insert(fact):
                delta.insert(fact)
                added.append(fact)
        _trace(ctx, iteration, delta.count)
    return iteration


def _trace(ctx, iteration, size):
    stats = ctx.stats
    stats.iterations[ctx.node.id] = max(stats.iterations[ctx.node.id], iteration)
    stats.derived[ctx.node.id] += size
    if stats.trace_fixpoint:
        stats.trace.append((ctx.node.id, iteration, size))


def insert_all(ctx: NodeContext, facts, added: list) -> DataStore:
    delta = DataStore()
    for fact in facts:
        if ctx.node.idb.insert(fact):
            delta.insert(fact)
            added.append(fact)
    return delta


def rollback(idb: DataStore, added: list) -> None:
    for fact in added:
        idb.delete(fact)


def seminaive_fixpoint(ctx: NodeContext, rules=None) -> int:
    """Least fixpoint of the node's rules over ``node.edb``; returns the iteration count.

    With ``rules`` only those rules seed the first round; later rounds use
    every rule of the node.  On error the idb is restored.
    """
    seed_rules = ctx.rules if rules is None else rules
    added = []
    try:
        new = set()
        for rule in seed_rules:
            ctx.evaluate(rule, out=new)
        delta = insert_all(ctx, new, added)
        _trace(ctx, 1, delta.count)
        if any(r.aggregate is not None for r in ctx.rules):
            return 1
        return propagate(ctx, delta, added)
    except Exception:
        rollback(ctx.node.idb, added)
        raise


def wire_edb(node, hrdg: HRDG, program_edb: DataStore) -> None:
    """Point ``node.edb`` at its predecessors' IDBs plus the program EDB (no copying)."""
    bag = DataStoreBag(name=node.id + ".EDB")
    for pid in hrdg.predecessors(node.id):
        if pid != node.id:
            bag.add_store(hrdg.nodes[pid].idb)
    bag.add_store(program_edb)
    node.edb = bag


@dataclass
class Materialization:
    rdg: RDG
    hrdg: HRDG
    order: list
    idb: DataStoreBag

    def facts(self) -> set:
        return self.idb.facts()

    def node_facts(self) -> dict:
        return {nid: node.idb.facts() for nid, node in self.hrdg.nodes.items()}


def materialize(program: Program, stats: Stats = None, order=None) -> Materialization:
    """Build RDG and HRDG, then evaluate hyper-nodes in topological order.

    ``order`` may pin a particular topological order; it must be one.
    """
    stats = stats if stats is not None else Stats()
    rdg = build_rdg(list(program.rules.values()))
    hrdg = build_hrdg(rdg)
    if order is None:
        order = topological_order(hrdg)
    else:
        order = list(order)
        pos = {nid: i for i, nid in enumerate(order)}
        if sorted(order) != sorted(hrdg.nodes) or any(
                pos[a] >= pos[b] for a, b in hrdg.hep | hrdg.hen):
            raise ValueError("order is not a topological order of the hyper-nodes")
    idb = DataStoreBag(name="program.IDB")
    for nid in order:
        node = hrdg.nodes[nid]
        wire_edb(node, hrdg, program.edb)
        started = time.perf_counter()
        seminaive_fixpoint(NodeContext(node, program.rules, stats))
        stats.timings[nid] = time.perf_counter() - started
        idb.add_store(node.idb)
        log.debug("node %s derived %d facts", nid, node.idb.count)
    idb.refresh_index()
    return Materialization(rdg, hrdg, order, idb)
