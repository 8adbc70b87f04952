"""Benchmark scenarios.  Every scenario compares against a from-scratch oracle.

Scenario ids:

  rs2-insert-<rule>   materialize RS2 without <rule>, then add it
  rs2-delete-<rule>   materialize RS2, then delete <rule>
  rs3-insert-<rule>, rs3-delete-<rule>   same over RS3
  rs2-suite, rs3-suite   every rule of the set, both directions
  rs3-negation        add/delete r6 and r10_new under RS3, diffs must be nonempty
  rs1-scale           RS1 closure size and time over chain lengths
  rs1-data            add then remove extra turbines on an RS1 chain
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

from .errors import DatalogError
from .evaluation import materialize
from .generators import NEIGHBOUR, chain_ds1, extend_chain, multirel_ds2
from .incremental import Engine
from .model import Program, natural_key
from .rulesets import load_rule_set

DEFAULT_SCALE = (10, 50, 100, 200)
DEFAULT_FRACTIONS = (0.1, 0.3, 0.5)


@dataclass
class BenchRow:
    scenario: str
    param: str
    incremental_s: float
    scratch_s: float
    derived: int
    evals: int
    plan: int
    diff_added: int
    diff_removed: int
    verdict: str
    detail: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


FIELDS = list(BenchRow.__dataclass_fields__)


def scratch(rules, facts):
    """(facts, seconds) of a from-scratch materialization."""
    program = Program({r.id: r for r in rules})
    program.edb.update(facts)
    started = time.perf_counter()
    result = materialize(program).facts()
    return result, time.perf_counter() - started


def compare(got: set, expected: set) -> tuple:
    if got == expected:
        return "PASS", ""
    missing = sorted(map(repr, expected - got))[:3]
    extra = sorted(map(repr, got - expected))[:3]
    return "FAIL", f"missing={len(expected - got)} {missing} extra={len(got - expected)} {extra}"


def _diff_sizes(report):
    return (sum(d.added.count for d in report.diffs.values()),
            sum(d.removed.count for d in report.diffs.values()))


def rule_update(rule_set: str, rule_id: str, insert: bool, n: int = 100, seed: int = 0,
                facts=None) -> BenchRow:
    rules = load_rule_set(rule_set)
    if rule_id not in {r.id for r in rules}:
        raise DatalogError(f"{rule_set} has no rule {rule_id}")
    facts = multirel_ds2(n, seed) if facts is None else facts
    rest = [r for r in rules if r.id != rule_id]
    target = [r for r in rules if r.id == rule_id]
    engine = Engine.from_rules(rest if insert else rules, facts)
    started = time.perf_counter()
    report = engine.add_rules(target) if insert else engine.delete_rules([rule_id])
    elapsed = time.perf_counter() - started
    expected, scratch_s = scratch(rules if insert else rest, facts)
    verdict, detail = compare(engine.facts(), expected)
    outside = sorted(set(report.evals) - set(report.plan), key=natural_key)
    if outside:
        verdict, detail = "FAIL", f"evaluations outside the plan: {outside}"
    added, removed = _diff_sizes(report)
    kind = "insert" if insert else "delete"
    return BenchRow(f"{rule_set}-{kind}-{rule_id}", f"n={n}", elapsed, scratch_s,
                    len(engine.facts()), report.total_evals, len(report.plan), added, removed,
                    verdict, detail)


def rule_suite(rule_set: str, n: int = 100, seed: int = 0) -> list:
    facts = multirel_ds2(n, seed)
    rows = []
    for rule in load_rule_set(rule_set):
        for insert in (True, False):
            rows.append(rule_update(rule_set, rule.id, insert, n, seed, facts))
    return rows


def negation_scenario(n: int = 100, seed: int = 0) -> list:
    facts = multirel_ds2(n, seed)
    rows = []
    for rule_id in ("r6", "r10_new"):
        for insert in (True, False):
            row = rule_update("rs3", rule_id, insert, n, seed, facts)
            if row.verdict == "PASS" and not (row.diff_added or row.diff_removed):
                row.verdict, row.detail = "FAIL", "diff is empty"
            rows.append(row)
    return rows


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den


def rs1_scale(sizes=DEFAULT_SCALE, seed: int = 0) -> list:
    rules = load_rule_set("rs1")
    rows = []
    for n in sizes:
        facts = chain_ds1(n, seed)
        derived, elapsed = scratch(rules, facts)
        count = sum(1 for f in derived if f[0] == NEIGHBOUR)
        verdict = "PASS" if count == n * (n - 1) else "FAIL"
        detail = f"expected {n * (n - 1)}" if verdict == "FAIL" else ""
        rows.append(BenchRow("rs1-scale", f"n={n}", 0.0, elapsed, count, 0, 0, 0, 0,
                             verdict, detail))
    return rows


def rs1_data(n: int = 200, fractions=DEFAULT_FRACTIONS, seed: int = 0) -> list:
    """Add ``fraction * n`` turbines to the chain, check, remove them, check."""
    rules = load_rule_set("rs1")
    base = chain_ds1(n, seed)
    engine = Engine.from_rules(rules, base)
    base_expected, base_s = scratch(rules, base)
    rows = []
    for frac in fractions:
        extra = extend_chain(n, max(1, int(round(n * frac))), seed + 1)
        for insert in (True, False):
            started = time.perf_counter()
            report = engine.insert_facts(extra) if insert else engine.delete_facts(extra)
            elapsed = time.perf_counter() - started
            if insert:
                expected, scratch_s = scratch(rules, base + extra)
            else:
                expected, scratch_s = base_expected, base_s
            verdict, detail = compare(engine.facts(), expected)
            added, removed = _diff_sizes(report)
            kind = "insert" if insert else "delete"
            rows.append(BenchRow(f"rs1-data-{kind}", f"n={n} extra={frac:.0%}", elapsed,
                                 scratch_s, len(engine.facts()), report.total_evals,
                                 len(report.plan), added, removed, verdict, detail))
    return rows


def scenario_names() -> list:
    names = ["rs1-scale", "rs1-data", "rs2-suite", "rs3-suite", "rs3-negation"]
    for rs in ("rs2", "rs3"):
        for rule in load_rule_set(rs):
            names += [f"{rs}-insert-{rule.id}", f"{rs}-delete-{rule.id}"]
    return names


def run_scenario(name: str, n: int = None, seed: int = 0, sizes=None, fractions=None) -> list:
    if name == "rs1-scale":
        return rs1_scale(tuple(sizes or DEFAULT_SCALE), seed)
    if name == "rs1-data":
        return rs1_data(n or 200, tuple(fractions or DEFAULT_FRACTIONS), seed)
    if name in ("rs2-suite", "rs3-suite"):
        return rule_suite(name[:3], n or 100, seed)
    if name == "rs3-negation":
        return negation_scenario(n or 100, seed)
    parts = name.split("-", 2)
    if len(parts) == 3 and parts[0] in ("rs2", "rs3") and parts[1] in ("insert", "delete"):
        return [rule_update(parts[0], parts[2], parts[1] == "insert", n or 100, seed)]
    raise DatalogError(f"unknown scenario {name!r}; known: rs1-scale, rs1-data, rs2-suite, "
                       "rs3-suite, rs3-negation, rs2|rs3-insert|delete-<rule>")
