"""Incremental maintenance of a materialized program.

Rule updates follow the hyper-node procedure: find the directly impacted
hyper-nodes (DIHN), order everything reachable from them into an execution
plan, then re-evaluate plan nodes in order.  DIHN nodes are evaluated with
their (new) rules; every other plan node absorbs its predecessors' IDB
differences with delete/rederive scoped to that node.

Fact updates reuse the same machinery with the nodes reading the changed
predicates standing in for the DIHN.
"""

from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass, field

from .errors import DuplicateRuleError, InvariantViolation, UnknownRuleError, UnsafeProgramError
from .evaluation import (Materialization, NodeContext, Stats, insert_all, materialize,
                         propagate, seminaive_fixpoint, wire_edb)
from .graph import (HRDG, HyperNode, _find_cycle, assemble_hrdg, build_rdg,
                    check_partition_safety, kosaraju, node_id, topological_order)
from .model import Atom, Program, Rule, check_program_rules, keys_overlap, natural_key, relation_key
from .storage import DataStore, DataStoreBag

log = logging.getLogger(__name__)


@dataclass
class IdbDiff:
    """What one hyper-node's IDB gained and lost during an update."""

    added: DataStore = field(default_factory=DataStore)
    removed: DataStore = field(default_factory=DataStore)

    def __bool__(self):
        return bool(self.added.count or self.removed.count)

    def sizes(self) -> str:
        return f"+{self.added.count}/-{self.removed.count}"


def _holds(store, fact) -> bool:
    if isinstance(store, DataStoreBag):
        return store.contains(*fact)
    return fact in store


def diff_idb(before, after) -> IdbDiff:
    """``added = after - before`` and ``removed = before - after``.

    Either side may be a DataStore, a DataStoreBag or a set of facts.
    """
    diff = IdbDiff()
    for fact in after:
        if not _holds(before, fact):
            diff.added.insert(fact)
    for fact in before:
        if not _holds(after, fact):
            diff.removed.insert(fact)
    return diff


@dataclass
class DIHNSet:
    """Directly impacted hyper-nodes of a rule update (post-update ids).

    ``dirty`` lists pre-update nodes that were replaced or dropped;
    ``merged_from`` maps each merged node to the nodes it absorbed.
    """

    node_ids: set = field(default_factory=set)
    dirty: set = field(default_factory=set)
    new_rules: set = field(default_factory=set)
    merged_from: dict = field(default_factory=dict)
    split_from: dict = field(default_factory=dict)
    dropped: set = field(default_factory=set)

    def sorted(self) -> list:
        return sorted(self.node_ids, key=natural_key)


@dataclass
class ExecutionPlan:
    node_ids: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.node_ids)

    def __len__(self):
        return len(self.node_ids)

    def __contains__(self, nid):
        return nid in self.node_ids


@dataclass
class UpdateReport:
    kind: str
    dihn: list = field(default_factory=list)
    dirty: list = field(default_factory=list)
    plan: list = field(default_factory=list)
    diffs: dict = field(default_factory=dict)
    evals: Counter = field(default_factory=Counter)
    elapsed: float = 0.0
    edb_added: int = 0
    edb_removed: int = 0

    @property
    def total_evals(self) -> int:
        return sum(self.evals.values())

    def log_line(self) -> str:
        diffs = ",".join(f"{nid}:{d.sizes()}" for nid, d in self.diffs.items())
        return (f"{self.kind} dihn=[{','.join(self.dihn)}] dirty=[{','.join(self.dirty)}] "
                f"plan=[{','.join(self.plan)}] diffs=[{diffs}] evals={self.total_evals} "
                f"edb=+{self.edb_added}/-{self.edb_removed} time={self.elapsed:.6f}s")


# -- Algorithms 2-4 -------------------------------------------------------------


def _scc_lists(vertices, succ) -> list:
    comps = [frozenset(c) for c in kosaraju(sorted(vertices, key=natural_key), succ)]
    return sorted(comps, key=lambda c: min(natural_key(v) for v in c))


def identify_dihn_insert(new_rules, rules: dict, hrdg: HRDG):
    """DIHN for inserting ``new_rules`` into a program whose HRDG is ``hrdg``.

    Each new rule starts as a provisional hyper-node; strongly connected
    groups of (old and provisional) nodes are merged.  Returns
    ``(dihn, rdg, new_hrdg)``; old node objects are reused when untouched and
    are never mutated.  Raises UnsafeProgramError when the result is unsafe.
    """
    for rule in new_rules:
        if rule.id in rules:
            raise DuplicateRuleError(f"rule id {rule.id} already exists")
    all_rules = dict(rules)
    for rule in new_rules:
        if rule.id in all_rules:
            raise DuplicateRuleError(f"rule id {rule.id} given twice")
        all_rules[rule.id] = rule
    check_program_rules(all_rules.values())
    rdg = build_rdg(all_rules)
    group_of = dict(hrdg.rule_node)
    groups = {nid: set(node.rules) for nid, node in hrdg.nodes.items()}
    for rule in new_rules:
        gid = "new:" + rule.id
        group_of[rule.id] = gid
        groups[gid] = {rule.id}
    succ = {g: set() for g in groups}
    for a, b in rdg.ep | rdg.en:
        ga, gb = group_of[a], group_of[b]
        if ga != gb:
            succ[ga].add(gb)
    dihn = DIHNSet(new_rules={r.id for r in new_rules})
    nodes = []
    partition = []
    for comp in _scc_lists(groups, succ):
        members = set()
        for g in comp:
            members |= groups[g]
        partition.append(frozenset(members))
        old = [g for g in comp if not g.startswith("new:")]
        if len(comp) == 1 and old:
            nodes.append(hrdg.nodes[old[0]])
            continue
        node = HyperNode(members)
        if old:
            merged = DataStore(name=node.id + ".IDB")
            for g in sorted(old, key=natural_key):
                merged.update(hrdg.nodes[g].idb)
            node.idb = merged
            dihn.merged_from[node.id] = sorted(old, key=natural_key)
            dihn.dirty.update(old)
        dihn.node_ids.add(node.id)
        nodes.append(node)
    check_partition_safety(rdg, partition)
    new_hrdg = assemble_hrdg(rdg, nodes)
    cycle = _find_cycle(new_hrdg)
    if cycle:
        raise UnsafeProgramError("hyper rules dependency graph is not acyclic", cycle)
    return dihn, rdg, new_hrdg


def identify_dihn_delete(rule_ids, rules: dict, hrdg: HRDG):
    """DIHN for deleting ``rule_ids``.

    Dirty nodes (those losing a rule) are dropped when empty and otherwise
    split along the SCCs of their remaining rules.  Split nodes and the
    surviving successors of dirty nodes form the DIHN.  Returns
    ``(dihn, rdg, new_hrdg)``.
    """
    rule_ids = list(rule_ids)
    missing = [rid for rid in rule_ids if rid not in rules]
    if missing:
        raise UnknownRuleError(f"unknown rule id(s): {', '.join(missing)}")
    doomed = set(rule_ids)
    remaining = {rid: r for rid, r in rules.items() if rid not in doomed}
    rdg = build_rdg(remaining)
    dihn = DIHNSet()
    dihn.dirty = {hrdg.rule_node[rid] for rid in doomed}
    succ = hrdg.succ_map()
    # successors of every dirty node are directly impacted
    for nid in dihn.dirty:
        for m in succ[nid]:
            if m not in dihn.dirty:
                dihn.node_ids.add(m)
    nodes = [node for nid, node in hrdg.nodes.items() if nid not in dihn.dirty]
    rdg_succ = rdg.successors()
    for nid in sorted(dihn.dirty, key=natural_key):
        rest = hrdg.nodes[nid].rules - doomed
        if not rest:
            dihn.dropped.add(nid)
            continue
        local = {r: {x for x in rdg_succ[r] if x in rest} for r in rest}
        for comp in _scc_lists(rest, local):
            node = HyperNode(comp)
            dihn.split_from[node.id] = nid
            dihn.node_ids.add(node.id)
            nodes.append(node)
    new_hrdg = assemble_hrdg(rdg, nodes)
    return dihn, rdg, new_hrdg


def compute_plan(dihn, hrdg: HRDG) -> ExecutionPlan:
    """Nodes reachable from ``dihn`` in topological order (DFS post-order, reversed)."""
    ids = dihn.node_ids if isinstance(dihn, DIHNSet) else dihn
    succ = hrdg.succ_map()
    visited = set()
    post = []
    for root in sorted(ids, key=natural_key):
        if root in visited:
            continue
        visited.add(root)
        stack = [(root, iter(sorted(succ[root], key=natural_key)))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if w not in visited:
                    visited.add(w)
                    stack.append((w, iter(sorted(succ[w], key=natural_key))))
                    break
            else:
                stack.pop()
                post.append(v)
    post.reverse()
    return ExecutionPlan(post)


# -- per-node maintenance -------------------------------------------------------


def _fact_key(fact) -> str:
    return relation_key(fact[0], fact[2])


def body_preds(ctx: NodeContext) -> set:
    return {atom.pred for rule in ctx.rules for atom in rule.atoms()}


def _pinned_atoms(ctx, store: DataStore, negated: bool):
    for rule in ctx.rules:
        for idx, item in enumerate(rule.body):
            if isinstance(item, Atom) and item.negated == negated and item.pred in store.pso:
                yield rule, idx


def overdelete(ctx: NodeContext, removed: DataStore, added: DataStore) -> DataStore:
    """IDB facts with some derivation in the old state that touches a change.

    Derivations are enumerated over ``edb ∪ removed ∪ idb`` (a superset of
    the old state) with negation ignored, so the result over-approximates
    what has to go; rederivation restores the rest.
    """
    idb = ctx.node.idb
    doomed = DataStore()
    cand = set()
    for rule, idx in _pinned_atoms(ctx, removed, negated=False):
        ctx.evaluate(rule, pinned=idx, pin_store=removed, ignore_negation=True,
                     extra=(removed,), out=cand)
    for rule, idx in _pinned_atoms(ctx, added, negated=True):
        ctx.evaluate(rule, pinned=idx, pin_store=added, ignore_negation=True,
                     extra=(removed,), out=cand)
    while cand:
        frontier = DataStore()
        for fact in cand:
            if fact in idb and doomed.insert(fact):
                frontier.insert(fact)
        cand = set()
        for rule in ctx.rules:
            for idx in ctx.local_atoms[rule.id]:
                if rule.body[idx].pred in frontier.pso:
                    ctx.evaluate(rule, pinned=idx, pin_store=frontier, ignore_negation=True,
                                 extra=(removed,), out=cand)
    return doomed


def _filter_removed(ctx: NodeContext, removed: DataStore) -> DataStore:
    """Drop removed inputs that another store of the node's EDB still holds."""
    preds = body_preds(ctx)
    out = DataStore()
    for fact in removed:
        if fact[0] in preds and not ctx.node.edb.contains(*fact):
            out.insert(fact)
    return out


def _filter_added(ctx: NodeContext, added: DataStore) -> DataStore:
    preds = body_preds(ctx)
    out = DataStore()
    for p in preds & set(added.pso):
        for s, objs in added.pso[p].items():
            for o in objs:
                out.insert((p, s, o))
    return out


def recompute_node(ctx: NodeContext, journal: list) -> IdbDiff:
    """Re-evaluate the node from scratch in place (used for aggregate nodes)."""
    idb = ctx.node.idb
    before = idb.copy()

    def undo():
        idb.clear()
        idb.update(before)

    journal.append(undo)
    idb.clear()
    seminaive_fixpoint(ctx)
    return diff_idb(before, idb)


def maintain_node(ctx: NodeContext, added: DataStore, removed: DataStore,
                  journal: list) -> IdbDiff:
    """Bring the node's IDB up to date after its inputs changed.

    ``added``/``removed`` are input facts that appeared in / vanished from
    the node's EDB (which already reflects the new state).  Delete/rederive:
    overdelete, rederive one step from the surviving state, then insert
    consequences of ``added`` and of negations that became true.
    """
    idb = ctx.node.idb
    removed = _filter_removed(ctx, removed)
    added = _filter_added(ctx, added)
    if not removed.count and not added.count:
        return IdbDiff()
    if any(r.aggregate is not None for r in ctx.rules):
        return recompute_node(ctx, journal)

    doomed = overdelete(ctx, removed, added)
    inserted = []

    def undo():
        for fact in inserted:
            idb.delete(fact)
        idb.update(doomed)

    journal.append(undo)
    for fact in doomed:
        idb.delete(fact)

    by_head = {}
    for rule in ctx.rules:
        by_head.setdefault(rule.head.pred, []).append(rule)
    new = set()
    for fact in doomed:
        for rule in by_head.get(fact[0], ()):
            if ctx.derivable(rule, fact):
                new.add(fact)
                break

    for rule, idx in _pinned_atoms(ctx, added, negated=False):
        ctx.evaluate(rule, pinned=idx, pin_store=added, out=new)
    for rule, idx in _pinned_atoms(ctx, removed, negated=True):
        # candidates whose blocking fact vanished; the negation must hold now
        for fact in ctx.evaluate(rule, pinned=idx, pin_store=removed, ignore_negation=True):
            if fact not in idb and fact not in new and ctx.derivable(rule, fact):
                new.add(fact)
    delta = insert_all(ctx, new, inserted)
    propagate(ctx, delta, inserted)

    diff = IdbDiff()
    for fact in doomed:
        if fact not in idb:
            diff.removed.insert(fact)
    for fact in inserted:
        if fact not in doomed:
            diff.added.insert(fact)
    return diff


# -- engine ---------------------------------------------------------------------


class Engine:
    """A materialized program kept up to date under rule and fact updates.

    Every update either applies completely or leaves the engine exactly as
    it was.  ``stats`` accumulates instrumentation across updates when
    ``cumulative`` is set; otherwise it holds the last update's counters.
    """

    def __init__(self, program: Program = None, stats: Stats = None, cumulative: bool = False):
        self.program = program if program is not None else Program()
        self.stats = stats if stats is not None else Stats()
        self.cumulative = cumulative
        self.rdg = None
        self.hrdg = None
        self.order = []
        self.idb = DataStoreBag(name="program.IDB")
        self.updates: list = []
        self.materialized = False

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rules(cls, rules, facts=(), **kwargs) -> "Engine":
        program = Program({r.id: r for r in rules})
        program.edb.update(facts)
        engine = cls(program, **kwargs)
        engine.materialize()
        return engine

    def _fresh_stats(self) -> Stats:
        return Stats(self.stats.explain_plans, self.stats.trace_fixpoint)

    def _absorb(self, stats: Stats):
        if self.cumulative:
            self.stats.rule_evals.update(stats.rule_evals)
            for nid, it in stats.iterations.items():
                self.stats.iterations[nid] = max(self.stats.iterations[nid], it)
            self.stats.derived.update(stats.derived)
            self.stats.trace.extend(stats.trace)
            self.stats.plans.extend(stats.plans)
            self.stats.timings.update(stats.timings)
        else:
            self.stats.rule_evals = stats.rule_evals
            self.stats.iterations = stats.iterations
            self.stats.derived = stats.derived
            self.stats.trace = stats.trace
            self.stats.plans = stats.plans
            self.stats.timings = stats.timings

    def materialize(self) -> Materialization:
        check_program_rules(self.program.rules.values())
        stats = self._fresh_stats()
        result = materialize(self.program, stats)
        self.rdg, self.hrdg, self.order, self.idb = result.rdg, result.hrdg, result.order, result.idb
        self.materialized = True
        self._absorb(stats)
        return result

    def _require(self):
        if not self.materialized:
            self.materialize()

    # -- queries ----------------------------------------------------------

    def facts(self) -> set:
        return self.idb.facts()

    def all_facts(self) -> set:
        return self.idb.facts() | self.program.edb.facts()

    def node_facts(self) -> dict:
        return {nid: node.idb.facts() for nid, node in self.hrdg.nodes.items()}

    def query(self, p, s=None, o=None) -> list:
        bag = DataStoreBag(list(self.idb.stores) + [self.program.edb])
        return sorted(bag.match(p, s, o), key=lambda f: (str(f[1]), str(f[2])))

    # -- transactions -----------------------------------------------------

    def _snapshot(self):
        nodes = {nid: (node, node.idb, node.edb) for nid, node in self.hrdg.nodes.items()}
        return (dict(self.program.rules), self.rdg, self.hrdg, list(self.order),
                self.idb, nodes)

    def _restore(self, snap, journal):
        for undo in reversed(journal):
            undo()
        rules, self.rdg, self.hrdg, self.order, self.idb, nodes = snap
        self.program.rules.clear()
        self.program.rules.update(rules)
        for node, idb, edb in nodes.values():
            node.idb = idb
            node.edb = edb
        self.idb.refresh_index()

    def _commit(self, rdg, hrdg):
        self.rdg = rdg
        self.hrdg = hrdg
        self.order = topological_order(hrdg)
        bag = DataStoreBag(name="program.IDB")
        for nid in self.order:
            node = hrdg.nodes[nid]
            wire_edb(node, hrdg, self.program.edb)
            node.edb.refresh_index()
            bag.add_store(node.idb)
        self.idb = bag

    def _inputs(self, nid, hrdg, diffs, edb_diff):
        added, removed = DataStore(), DataStore()
        parts = [diffs[p] for p in hrdg.predecessors(nid) if p in diffs and p != nid]
        if edb_diff is not None:
            parts.append(edb_diff)
        for d in parts:
            added.update(d.added)
            removed.update(d.removed)
        return added, removed

    def _run_plan(self, plan, hrdg, stats, journal, diffs, edb_diff=None, handlers=None):
        """Walk ``plan``; nodes with a handler use it, the others absorb input diffs."""
        handlers = handlers or {}
        for nid in plan:
            node = hrdg.nodes[nid]
            wire_edb(node, hrdg, self.program.edb)
            started = time.perf_counter()
            if nid in handlers:
                diff = handlers[nid](node)
            else:
                added, removed = self._inputs(nid, hrdg, diffs, edb_diff)
                if not added.count and not removed.count:
                    continue
                ctx = NodeContext(node, self.program.rules, stats)
                diff = maintain_node(ctx, added, removed, journal)
            stats.timings[nid] = time.perf_counter() - started
            diffs[nid] = diff

    def _finish(self, report, stats, started):
        report.evals = Counter({k: v for k, v in stats.rule_evals.items() if v})
        report.elapsed = time.perf_counter() - started
        self._absorb(stats)
        self.updates.append(report)
        log.info("%s", report.log_line())
        return report

    # -- rule updates -----------------------------------------------------

    def add_rules(self, rules) -> UpdateReport:
        """Insert rules (Rule objects) and maintain the materialization."""
        if isinstance(rules, Rule):
            rules = [rules]
        self._require()
        started = time.perf_counter()
        stats = self._fresh_stats()
        dihn, rdg, hrdg = identify_dihn_insert(rules, self.program.rules, self.hrdg)
        snap = self._snapshot()
        journal = []
        try:
            for rule in rules:
                self.program.rules[rule.id] = rule
            plan = compute_plan(dihn, hrdg)
            new_ids = dihn.new_rules
            old_hrdg = self.hrdg
            diffs = {}

            def fresh(node):
                seminaive_fixpoint(NodeContext(node, self.program.rules, stats))
                return IdbDiff(added=node.idb.copy())

            def merged(node):
                before = DataStoreBag([old_hrdg.nodes[g].idb for g in dihn.merged_from[node.id]])
                added, removed = self._inputs(node.id, hrdg, diffs, None)
                old_ids = node.rules - new_ids
                if added.count or removed.count:
                    ctx = NodeContext(node, self.program.rules, stats, rule_ids=old_ids)
                    maintain_node(ctx, added, removed, journal)
                ctx = NodeContext(node, self.program.rules, stats)
                seeds = [r for r in ctx.rules if r.id in new_ids]
                seminaive_fixpoint(ctx, rules=seeds)
                return diff_idb(before, node.idb)

            handlers = {}
            for nid in dihn.node_ids:
                handlers[nid] = merged if nid in dihn.merged_from else fresh
            self._run_plan(plan, hrdg, stats, journal, diffs, handlers=handlers)
            self._commit(rdg, hrdg)
        except BaseException:
            self._restore(snap, journal)
            raise
        report = UpdateReport("add-rule", dihn.sorted(), sorted(dihn.dirty, key=natural_key),
                              plan.node_ids, diffs)
        return self._finish(report, stats, started)

    def delete_rules(self, rule_ids) -> UpdateReport:
        if isinstance(rule_ids, str):
            rule_ids = [rule_ids]
        self._require()
        started = time.perf_counter()
        stats = self._fresh_stats()
        dihn, rdg, hrdg = identify_dihn_delete(rule_ids, self.program.rules, self.hrdg)
        snap = self._snapshot()
        journal = []
        try:
            old_hrdg = self.hrdg
            for rid in rule_ids:
                del self.program.rules[rid]
            plan = compute_plan(dihn, hrdg)
            diffs = {}
            for nid in sorted(dihn.dropped, key=natural_key):
                diffs[nid] = IdbDiff(removed=old_hrdg.nodes[nid].idb.copy())

            def rebuild(node):
                if node.id in dihn.split_from:
                    old = old_hrdg.nodes[dihn.split_from[node.id]].idb
                    keys = {self.program.rules[r].head.key for r in node.rules}
                    before = [f for f in old if any(keys_overlap(_fact_key(f), k) for k in keys)]
                else:
                    before = node.idb
                node.idb = DataStore(name=node.id + ".IDB")
                seminaive_fixpoint(NodeContext(node, self.program.rules, stats))
                return diff_idb(DataStore(before), node.idb)

            handlers = {nid: rebuild for nid in dihn.node_ids}
            self._run_plan(plan, hrdg, stats, journal, diffs, handlers=handlers)
            self._commit(rdg, hrdg)
        except BaseException:
            self._restore(snap, journal)
            raise
        report = UpdateReport("del-rule", dihn.sorted(), sorted(dihn.dirty, key=natural_key),
                              plan.node_ids, diffs)
        return self._finish(report, stats, started)

    # -- fact updates -----------------------------------------------------

    def _fact_update(self, kind, facts, inserting: bool) -> UpdateReport:
        self._require()
        started = time.perf_counter()
        stats = self._fresh_stats()
        edb = self.program.edb
        changed = DataStore()
        for fact in facts:
            if (edb.insert(fact) if inserting else edb.delete(fact)):
                changed.insert(fact)
        edb_diff = IdbDiff(added=changed) if inserting else IdbDiff(removed=changed)
        preds = set(changed.pso)
        impacted = set()
        for rule in self.program.rules.values():
            if any(a.pred in preds for a in rule.atoms()):
                impacted.add(self.hrdg.rule_node[rule.id])
        journal = []
        diffs = {}
        plan = compute_plan(impacted, self.hrdg)
        try:
            self._run_plan(plan, self.hrdg, stats, journal, diffs, edb_diff=edb_diff)
            for node in self.hrdg.nodes.values():
                node.edb.refresh_index()
            self.idb.refresh_index()
        except BaseException:
            for undo in reversed(journal):
                undo()
            for fact in changed:
                edb.delete(fact) if inserting else edb.insert(fact)
            self.idb.refresh_index()
            raise
        report = UpdateReport(kind, sorted(impacted, key=natural_key), [], plan.node_ids, diffs,
                              edb_added=changed.count if inserting else 0,
                              edb_removed=0 if inserting else changed.count)
        return self._finish(report, stats, started)

    def insert_facts(self, facts) -> UpdateReport:
        return self._fact_update("add-fact", facts, inserting=True)

    def delete_facts(self, facts) -> UpdateReport:
        return self._fact_update("del-fact", facts, inserting=False)

    # -- checks -----------------------------------------------------------

    def check(self) -> None:
        """Raise InvariantViolation if derived state disagrees with a fresh materialization."""
        fresh = Program(dict(self.program.rules), self.program.edb.copy())
        expected = materialize(fresh).facts()
        got = self.facts()
        if got != expected:
            missing = sorted(map(str, expected - got))[:5]
            extra = sorted(map(str, got - expected))[:5]
            raise InvariantViolation(f"materialization drift: missing {missing}, extra {extra}")
        for nid, node in self.hrdg.nodes.items():
            if node_id(node.rules) != nid:
                raise InvariantViolation(f"node {nid} has rules {sorted(node.rules)}")


# functional entry points


def apply_rule_update(engine: Engine, insert=None, delete=None) -> dict:
    """Apply ``insert`` (Rules) or ``delete`` (rule ids); returns the per-node IdbDiffs."""
    if (insert is None) == (delete is None):
        raise ValueError("give exactly one of insert= or delete=")
    report = engine.add_rules(insert) if insert is not None else engine.delete_rules(delete)
    return report.diffs


def data_insert(engine: Engine, facts) -> dict:
    return engine.insert_facts(facts).diffs


def data_delete(engine: Engine, facts) -> dict:
    return engine.delete_facts(facts).diffs
