"""Rule dependency graph, its SCC condensation and stratification."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .errors import UnsafeProgramError
from .model import RDF_TYPE, natural_key
from .storage import DataStore, DataStoreBag


@dataclass
class RDG:
    """Rules as vertices; ``ep``/``en`` hold (producer, consumer) rule-id pairs."""

    rules: dict
    ep: set = field(default_factory=set)
    en: set = field(default_factory=set)

    @property
    def vertices(self) -> list:
        return sorted(self.rules, key=natural_key)

    def successors(self) -> dict:
        succ = {rid: set() for rid in self.rules}
        for a, b in self.ep | self.en:
            succ[a].add(b)
        return succ


class _HeadIndex:
    def __init__(self, rules):
        self.by_key: dict = {}
        for rule in rules:
            self.by_key.setdefault(rule.head.key, []).append(rule.id)

    def producers(self, key) -> list:
        found = list(self.by_key.get(key, ()))
        if key.startswith(RDF_TYPE + "|"):
            found += self.by_key.get(RDF_TYPE, ())
        elif key == RDF_TYPE:
            for k, ids in self.by_key.items():
                if k.startswith(RDF_TYPE + "|"):
                    found += ids
        return found


def build_rdg(rules) -> RDG:
    if isinstance(rules, dict):
        rules = list(rules.values())
    rdg = RDG({r.id: r for r in rules})
    index = _HeadIndex(rules)
    for rule in rules:
        for atom in rule.atoms():
            edges = rdg.en if atom.negated else rdg.ep
            for producer in index.producers(atom.key):
                edges.add((producer, rule.id))
    return rdg


def kosaraju(vertices, succ) -> list:
    """Strongly connected components, iterative two-pass Kosaraju."""
    vertices = list(vertices)
    pred = {v: [] for v in vertices}
    for v in vertices:
        for w in succ.get(v, ()):
            pred[w].append(v)
    visited = set()
    finish = []
    for root in vertices:
        if root in visited:
            continue
        visited.add(root)
        stack = [(root, iter(sorted(succ.get(root, ()), key=_sort_key)))]
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if w not in visited:
                    visited.add(w)
                    stack.append((w, iter(sorted(succ.get(w, ()), key=_sort_key))))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                finish.append(v)
    assigned = set()
    components = []
    for root in reversed(finish):
        if root in assigned:
            continue
        comp = {root}
        assigned.add(root)
        todo = [root]
        while todo:
            v = todo.pop()
            for w in pred[v]:
                if w not in assigned:
                    assigned.add(w)
                    comp.add(w)
                    todo.append(w)
        components.append(comp)
    return components


def _sort_key(v):
    return natural_key(v) if isinstance(v, str) else (v,)


def scc(rdg: RDG) -> list:
    """SCCs of Ep ∪ En, sorted by their smallest rule id."""
    comps = kosaraju(rdg.vertices, rdg.successors())
    comps = [frozenset(c) for c in comps]
    return sorted(comps, key=lambda c: min(natural_key(r) for r in c))


def node_id(rule_ids) -> str:
    return "hn[" + ",".join(sorted(rule_ids, key=natural_key)) + "]"


class HyperNode:
    """A reasoning unit: one SCC of rules with its input bag and derived store."""

    __slots__ = ("id", "rules", "edb", "idb")

    def __init__(self, rules, idb: DataStore = None):
        self.rules = frozenset(rules)
        if not self.rules:
            raise ValueError("hyper-node needs at least one rule")
        self.id = node_id(self.rules)
        self.edb = DataStoreBag(name=self.id + ".EDB")
        self.idb = idb if idb is not None else DataStore(name=self.id + ".IDB")

    def __repr__(self):
        return f"<HyperNode {self.id} idb={self.idb.count}>"

    def sorted_rules(self) -> list:
        return sorted(self.rules, key=natural_key)


@dataclass
class HRDG:
    nodes: dict = field(default_factory=dict)
    hep: set = field(default_factory=set)
    hen: set = field(default_factory=set)
    rule_node: dict = field(default_factory=dict)

    @property
    def hv(self) -> list:
        return sorted(self.nodes, key=natural_key)

    def successors(self, nid) -> list:
        return sorted({b for a, b in self.hep | self.hen if a == nid}, key=natural_key)

    def predecessors(self, nid) -> list:
        return sorted({a for a, b in self.hep | self.hen if b == nid}, key=natural_key)

    def succ_map(self) -> dict:
        out = {nid: set() for nid in self.nodes}
        for a, b in self.hep | self.hen:
            out[a].add(b)
        return out

    def pred_map(self) -> dict:
        out = {nid: set() for nid in self.nodes}
        for a, b in self.hep | self.hen:
            out[b].add(a)
        return out


def check_partition_safety(rdg: RDG, partition) -> None:
    """Reject negation or aggregation inside one component of ``partition``."""
    where = {}
    for comp in partition:
        for rid in comp:
            where[rid] = comp
    for a, b in sorted(rdg.en):
        if where[a] is where[b]:
            cycle = sorted(where[a], key=natural_key)
            raise UnsafeProgramError(
                f"negation through recursion: {a} feeds 'not' in {b} within "
                f"{{{', '.join(cycle)}}}", cycle)
    for comp in partition:
        for rid in comp:
            if rdg.rules[rid].aggregate is None:
                continue
            if len(comp) > 1 or (rid, rid) in rdg.ep:
                cycle = sorted(comp, key=natural_key)
                raise UnsafeProgramError(
                    f"aggregation through recursion: {rid} within {{{', '.join(cycle)}}}",
                    cycle)


def lift_edges(rdg: RDG, rule_node: dict):
    hep, hen = set(), set()
    for a, b in rdg.ep:
        na, nb = rule_node[a], rule_node[b]
        if na != nb:
            hep.add((na, nb))
    for a, b in rdg.en:
        hen.add((rule_node[a], rule_node[b]))
    return hep, hen


def assemble_hrdg(rdg: RDG, nodes) -> HRDG:
    """HRDG over given hyper-nodes, which must partition the RDG's rules."""
    hrdg = HRDG()
    for node in sorted(nodes, key=lambda n: natural_key(n.id)):
        hrdg.nodes[node.id] = node
        for rid in node.rules:
            hrdg.rule_node[rid] = node.id
    hrdg.hep, hrdg.hen = lift_edges(rdg, hrdg.rule_node)
    return hrdg


def build_hrdg(rdg: RDG, rules=None) -> HRDG:
    partition = scc(rdg)
    check_partition_safety(rdg, partition)
    hrdg = assemble_hrdg(rdg, [HyperNode(comp) for comp in partition])
    cyclic = _find_cycle(hrdg)
    if cyclic:
        raise UnsafeProgramError("hyper rules dependency graph is not acyclic", cyclic)
    return hrdg


def _find_cycle(hrdg: HRDG):
    for a, b in hrdg.hep | hrdg.hen:
        if a == b:
            return sorted(hrdg.nodes[a].rules, key=natural_key)
    order = topological_order(hrdg, strict=False)
    if len(order) != len(hrdg.nodes):
        return sorted(set(hrdg.nodes) - set(order), key=natural_key)
    return None


def topological_order(hrdg: HRDG, strict: bool = True) -> list:
    """Kahn's algorithm over HEp ∪ HEn with ties broken by node id."""
    indeg = {nid: 0 for nid in hrdg.nodes}
    succ = hrdg.succ_map()
    for a, targets in succ.items():
        for b in targets:
            if a != b:
                indeg[b] += 1
    heap = [(natural_key(n), n) for n, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, n = heapq.heappop(heap)
        order.append(n)
        for m in succ[n]:
            if m == n:
                continue
            indeg[m] -= 1
            if indeg[m] == 0:
                heapq.heappush(heap, (natural_key(m), m))
    if strict and len(order) != len(hrdg.nodes):
        raise UnsafeProgramError("hyper rules dependency graph has a cycle")
    return order


def stratify(rdg: RDG) -> dict:
    """Minimal stratum per rule: longest path over the condensation, En edges weigh 1."""
    comps = scc(rdg)
    where = {}
    for i, comp in enumerate(comps):
        for rid in comp:
            where[rid] = i
    weight: dict = {}
    for a, b in rdg.ep:
        if where[a] != where[b]:
            key = (where[a], where[b])
            weight[key] = max(weight.get(key, 0), 0)
    for a, b in rdg.en:
        if where[a] == where[b]:
            cycle = sorted(comps[where[a]], key=natural_key)
            raise UnsafeProgramError(
                f"program is not stratifiable: negation from {a} to {b} inside a cycle", cycle)
        weight[(where[a], where[b])] = 1
    succ = {i: [] for i in range(len(comps))}
    indeg = {i: 0 for i in range(len(comps))}
    for (i, j), w in weight.items():
        succ[i].append((j, w))
        indeg[j] += 1
    level = {i: 0 for i in range(len(comps))}
    ready = [i for i, d in indeg.items() if d == 0]
    while ready:
        i = ready.pop()
        for j, w in succ[i]:
            level[j] = max(level[j], level[i] + w)
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    return {rid: level[where[rid]] for rid in rdg.rules}


def check_stratification(rdg: RDG, strata: dict) -> bool:
    return all(strata[a] <= strata[b] for a, b in rdg.ep) and all(
        strata[a] < strata[b] for a, b in rdg.en)


def rdg_to_dot(rdg: RDG) -> str:
    lines = ["digraph RDG {"]
    for rid in rdg.vertices:
        lines.append(f'  "{rid}";')
    for a, b in sorted(rdg.ep, key=lambda e: (natural_key(e[0]), natural_key(e[1]))):
        lines.append(f'  "{a}" -> "{b}";')
    for a, b in sorted(rdg.en, key=lambda e: (natural_key(e[0]), natural_key(e[1]))):
        lines.append(f'  "{a}" -> "{b}" [style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def hrdg_to_dot(hrdg: HRDG) -> str:
    lines = ["digraph HRDG {"]
    for nid in hrdg.hv:
        rules = ", ".join(hrdg.nodes[nid].sorted_rules())
        lines.append(f'  "{nid}" [label="{rules}"];')
    for a, b in sorted(hrdg.hep, key=lambda e: (natural_key(e[0]), natural_key(e[1]))):
        lines.append(f'  "{a}" -> "{b}";')
    for a, b in sorted(hrdg.hen, key=lambda e: (natural_key(e[0]), natural_key(e[1]))):
        lines.append(f'  "{a}" -> "{b}" [style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"
