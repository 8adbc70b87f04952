"""Command line interface.

One-shot subcommands build a session from ``--rules``/``--facts`` and run a
single action; ``shell`` reads the same actions line by line from stdin or a
script, keeping one live engine across them.

Exit codes: 0 success, 1 user error, 2 internal invariant violation
(including a benchmark whose incremental result disagrees with its oracle).
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
import time
from pathlib import Path

from . import __version__
from .errors import DatalogError, InvariantViolation
from .evaluation import Stats
from .generators import GeneratorSpec, generate, write_facts
from .graph import build_hrdg, build_rdg, hrdg_to_dot, rdg_to_dot
from .incremental import Engine, UpdateReport
from .model import (RDF_TYPE, Var, check_program_rules, fact_sort_key, natural_key,
                    render_fact_dl, render_fact_nt, render_rule)
from .parser import _Parser, parse_fact, parse_rule, read_facts, read_rules
from .rulesets import RULE_SETS, load_rule_set

log = logging.getLogger("edgelog")


class UserError(DatalogError):
    pass


class Session:
    """A live engine plus the settings of the command line that created it."""

    def __init__(self, out=None, explain_plan=False, trace_fixpoint=False, cumulative=False,
                 fmt=None, update_log=None, notes=None):
        self.out = out or sys.stdout
        self.notes = notes or self.out
        self.engine = Engine(stats=Stats(explain_plan, trace_fixpoint), cumulative=cumulative)
        self.fmt = fmt
        self.update_log = update_log
        self.history = []

    def say(self, text=""):
        print(text, file=self.out)

    def note(self, text):
        """Load summaries; kept off stdout when it carries a dump or query result."""
        print(text, file=self.notes)

    @property
    def program(self):
        return self.engine.program

    # -- loading ----------------------------------------------------------

    def load_rules(self, source: str):
        rules = resolve_rules(source)
        if self.engine.materialized:
            report = self.engine.add_rules(rules)
            self.show_update(report)
            return
        merged = dict(self.program.rules)
        for rule in rules:
            merged[rule.id] = rule
        check_program_rules(list(self.program.rules.values()) + rules)
        self.program.rules.clear()
        self.program.rules.update(merged)
        hrdg = build_hrdg(build_rdg(self.program.rules))
        aggregates = sum(1 for node in hrdg.nodes.values()
                         if any(self.program.rules[r].aggregate is not None for r in node.rules))
        line = f"{len(self.program.rules)} rules, {len(hrdg.nodes)} hyper-nodes"
        if aggregates:
            line += f", {aggregates} with aggregation"
        self.note(line)

    def load_facts(self, path: str):
        facts = read_facts(path, self.fmt)
        if self.engine.materialized:
            self.show_update(self.engine.insert_facts(facts))
            return
        added = self.program.edb.update(facts)
        self.note(f"{added} facts ({self.program.edb.count} total)")

    # -- commands ---------------------------------------------------------

    def materialize(self):
        started = time.perf_counter()
        self.engine.materialize()
        elapsed = time.perf_counter() - started
        stats = self.engine.stats
        for nid in self.engine.order:
            node = self.engine.hrdg.nodes[nid]
            self.say(f"{nid:<24} derived={node.idb.count:<8} iterations={stats.iterations[nid]:<3} "
                     f"evals={stats.rule_evals[nid]:<5} time={stats.timings.get(nid, 0.0):.4f}s")
        counts = {}
        for p, _, o in self.engine.facts():
            key = f"{RDF_TYPE}:{o}" if p == RDF_TYPE else p
            counts[key] = counts.get(key, 0) + 1
        for key in sorted(counts, key=natural_key):
            self.say(f"  {key} {counts[key]}")
        self.say(f"{len(self.engine.facts())} derived in {elapsed:.4f}s")
        self.show_instrumentation()

    def show_instrumentation(self):
        stats = self.engine.stats
        if stats.explain_plans:
            seen = set()
            for nid, text in stats.plans:
                if (nid, text) not in seen:
                    seen.add((nid, text))
                    self.say(f"[{nid}] {text}")
        if stats.trace_fixpoint:
            for nid, iteration, size in stats.trace:
                self.say(f"trace {nid} iteration={iteration} delta={size}")

    def show_update(self, report: UpdateReport):
        self.say(f"{report.kind}: {report.elapsed:.4f}s, {report.total_evals} rule evaluations")
        if report.kind in ("add-fact", "del-fact"):
            self.say(f"  edb: +{report.edb_added}/-{report.edb_removed}")
            self.say(f"  impacted: {', '.join(report.dihn) or '-'}")
        else:
            self.say(f"  DIHN: {', '.join(report.dihn) or '-'}")
            self.say(f"  replaced/dropped: {', '.join(report.dirty) or '-'}")
        self.say(f"  plan: {', '.join(report.plan) or '-'}")
        for nid, diff in report.diffs.items():
            self.say(f"  {nid:<24} {diff.sizes()}  evals={report.evals.get(nid, 0)}")
        self.show_instrumentation()
        if self.update_log:
            with open(self.update_log, "a", encoding="utf-8") as fh:
                fh.write(report.log_line() + "\n")

    def add_rule(self, text: str):
        rule = parse_rule(text.strip())
        if not rule.id:
            rule = rule.with_id(next_rule_id(self.program.rules))
        self.show_update(self.engine.add_rules([rule]))

    def del_rule(self, ids):
        self.show_update(self.engine.delete_rules(list(ids)))

    def _facts(self, texts):
        return [parse_fact(fact_text(t), fmt=self.fmt) for t in texts]

    def add_facts(self, texts):
        self.show_update(self.engine.insert_facts(self._facts(texts)))

    def del_facts(self, texts):
        self.show_update(self.engine.delete_facts(self._facts(texts)))

    def query(self, pattern: str):
        self.engine._require()
        p, s, o = parse_pattern(pattern)
        found = self.engine.query(p, s, o)
        render = render_fact_nt if self.fmt == "nt" else render_fact_dl
        for fact in sorted(found, key=fact_sort_key):
            self.say(render(fact))
        self.say(f"{len(found)} results")

    def dump(self, what="idb", fmt=None):
        self.engine._require()
        fmt = fmt or self.fmt or "nt"
        if what == "idb":
            facts = self.engine.facts()
        elif what == "edb":
            facts = self.program.edb.facts()
        else:
            facts = self.engine.all_facts()
        render = render_fact_nt if fmt == "nt" else render_fact_dl
        for fact in sorted(facts, key=fact_sort_key):
            self.say(render(fact))

    def rules(self):
        for rid in sorted(self.program.rules, key=natural_key):
            self.say(render_rule(self.program.rules[rid]))

    def stats(self):
        self.engine._require()
        e = self.engine
        self.say(f"rules: {len(e.program.rules)}")
        self.say(f"hyper-nodes: {len(e.hrdg.nodes)}")
        self.say(f"edb facts: {e.program.edb.count}")
        self.say(f"idb facts: {len(e.facts())}")
        self.say(f"updates applied: {len(e.updates)}")
        for nid in e.order:
            self.say(f"{nid:<24} idb={e.hrdg.nodes[nid].idb.count:<8} "
                     f"evals={e.stats.rule_evals[nid]:<6} derived={e.stats.derived[nid]}")

    def export_graph(self, out_dir=None):
        rdg = build_rdg(self.program.rules)
        hrdg = build_hrdg(rdg)
        if out_dir is None:
            self.say(rdg_to_dot(rdg))
            self.say(hrdg_to_dot(hrdg))
            return
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "rdg.dot").write_text(rdg_to_dot(rdg), encoding="utf-8")
        (out_dir / "hrdg.dot").write_text(hrdg_to_dot(hrdg), encoding="utf-8")
        self.say(f"wrote {out_dir / 'rdg.dot'} and {out_dir / 'hrdg.dot'}")


def next_rule_id(rules) -> str:
    i = len(rules) + 1
    while f"r{i}" in rules:
        i += 1
    return f"r{i}"


def fact_text(text: str) -> str:
    """Command-line facts may omit the closing period."""
    text = text.strip()
    return text if text.endswith(".") else text + " ."


def resolve_rules(source: str) -> list:
    """Rules from a file path, or from a packaged set when ``source`` names one."""
    if not Path(source).exists() and source.lower() in RULE_SETS:
        return load_rule_set(source)
    return read_rules(source)


_WILDCARD = re.compile(r"(?<![\w?])\?(?![\w])")


def parse_pattern(text: str):
    """``p(s|?, o|?)`` -> (p, s or None, o or None); unary ``C(x)`` means rdf:type."""
    text = _WILDCARD.sub("?_", text.strip().rstrip("."))
    atom = _Parser(text).atom()
    s = None if isinstance(atom.s, Var) else atom.s
    o = None if isinstance(atom.o, Var) else atom.o
    return atom.pred, s, o


# -- argument parsing -----------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rules", action="append", default=[], metavar="FILE",
                        help="rule file, or one of rs1/rs2/rs3 (repeatable)")
    common.add_argument("--facts", action="append", default=[], metavar="FILE",
                        help="fact file (.nt or p(s, o). form; repeatable)")
    common.add_argument("--format", choices=("nt", "dl"), default=None,
                        help="fact surface form for reading and printing")
    common.add_argument("--explain-plan", action="store_true", help="print join plans")
    common.add_argument("--trace-fixpoint", action="store_true",
                        help="print per-iteration delta sizes")
    common.add_argument("--cumulative", action="store_true",
                        help="keep counters across commands")
    common.add_argument("--update-log", metavar="FILE", help="append one line per update")
    common.add_argument("--seed", type=int, default=0, help="seed for generators and benches")
    common.add_argument("-v", "--verbose", action="count", default=0)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="edgelog", description="Incremental Datalog reasoning over binary predicates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("load", parents=[common], help="parse inputs and report counts")
    sub.add_parser("materialize", parents=[common], help="materialize and report per node")
    p = sub.add_parser("add-rule", parents=[common], help="materialize, then insert a rule")
    p.add_argument("rule", nargs="+", help="rule text, e.g. 'r19: p(X,Y) :- q(X,Y).'")
    p = sub.add_parser("del-rule", parents=[common], help="materialize, then delete rules")
    p.add_argument("ids", nargs="+")
    p = sub.add_parser("add-fact", parents=[common], help="materialize, then insert facts")
    p.add_argument("fact", nargs="+")
    p = sub.add_parser("del-fact", parents=[common], help="materialize, then delete facts")
    p.add_argument("fact", nargs="+")
    p = sub.add_parser("query", parents=[common], help="match a pattern such as 'p(a, ?)'")
    p.add_argument("pattern")
    p = sub.add_parser("dump", parents=[common], help="print facts, sorted")
    p.add_argument("--what", choices=("idb", "edb", "all"), default="idb")
    p = sub.add_parser("export-graph", parents=[common], help="RDG and HRDG in DOT")
    p.add_argument("--out-dir", default=None)
    p = sub.add_parser("generate", parents=[common], help="write a synthetic dataset")
    p.add_argument("kind", choices=("chain-ds1", "multirel-ds2"))
    p.add_argument("-n", type=int, required=True, help="number of turbines / entities")
    p.add_argument("-o", "--out", required=True, help="output path (.nt or .dl)")
    p.add_argument("--cluster", type=int, default=10, help="multirel-ds2 cluster size")
    p = sub.add_parser("bench", parents=[common], help="run a scenario against its oracle")
    p.add_argument("scenario", nargs="?", default=None)
    p.add_argument("-n", type=int, default=None, help="dataset size")
    p.add_argument("--sizes", default=None, help="rs1-scale chain lengths, comma separated")
    p.add_argument("--fractions", default=None, help="rs1-data fractions, comma separated")
    p.add_argument("--out", default=None, help="table path (.csv or .tsv); figures go alongside")
    p.add_argument("--figures", default=None, help="directory for figures")
    p.add_argument("--list", action="store_true", help="list scenario ids")
    sub.add_parser("stats", parents=[common], help="materialize and print counters")
    p = sub.add_parser("shell", parents=[common], help="read commands from stdin or a script")
    p.add_argument("--script", default=None)
    return parser


def open_session(args, out=None) -> Session:
    notes = out if args.command in ("load", "shell") else sys.stderr
    session = Session(out, args.explain_plan, args.trace_fixpoint, args.cumulative,
                      args.format, args.update_log, notes)
    for source in args.rules:
        session.load_rules(source)
    for path in args.facts:
        session.load_facts(path)
    return session


def run_bench(args, out) -> int:
    from .bench import run_scenario, scenario_names
    from .report import render, write_table

    if args.list or not args.scenario:
        for name in scenario_names():
            print(name, file=out)
        return 0
    sizes = [int(x) for x in args.sizes.split(",")] if args.sizes else None
    fractions = [float(x) for x in args.fractions.split(",")] if args.fractions else None
    rows = run_scenario(args.scenario, args.n, args.seed, sizes, fractions)
    if args.out:
        delim = "\t" if args.out.endswith(".tsv") else ","
        write_table(rows, args.out, delim)
        print(f"wrote {args.out}", file=out)
    else:
        write_table(rows, out, "\t")
    fig_dir = args.figures or (str(Path(args.out).parent) if args.out else None)
    if fig_dir:
        stem = Path(args.out).stem if args.out else args.scenario
        for path in render(rows, fig_dir, stem):
            print(f"wrote {path}", file=out)
    failed = [r for r in rows if r.verdict != "PASS"]
    for row in failed:
        print(f"FAIL {row.scenario} {row.param}: {row.detail}", file=sys.stderr)
    print(f"{len(rows) - len(failed)}/{len(rows)} PASS", file=out)
    return 2 if failed else 0


SHELL_HELP = """commands:
  load rules FILE | load facts FILE     materialize
  add-rule TEXT                         del-rule ID [ID ...]
  add-fact FACT [; FACT ...]            del-fact FACT [; FACT ...]
  query PATTERN                         dump [idb|edb|all] [nt|dl]
  rules | stats | export-graph [DIR]    help | quit"""


def run_shell(session: Session, lines, interactive=False) -> int:
    status = 0
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cmd, _, rest = line.partition(" ")
        rest = rest.strip()
        session.history.append(line)
        try:
            if cmd in ("quit", "exit"):
                break
            elif cmd == "help":
                session.say(SHELL_HELP)
            elif cmd == "load":
                kind, _, path = rest.partition(" ")
                if kind == "rules":
                    session.load_rules(path.strip())
                elif kind == "facts":
                    session.load_facts(path.strip())
                else:
                    raise UserError("usage: load rules|facts PATH")
            elif cmd == "materialize":
                session.materialize()
            elif cmd == "add-rule":
                session.add_rule(rest)
            elif cmd == "del-rule":
                session.del_rule(rest.split())
            elif cmd == "add-fact":
                session.add_facts([t for t in rest.split(";") if t.strip()])
            elif cmd == "del-fact":
                session.del_facts([t for t in rest.split(";") if t.strip()])
            elif cmd == "query":
                session.query(rest)
            elif cmd == "dump":
                words = rest.split()
                what = next((w for w in words if w in ("idb", "edb", "all")), "idb")
                fmt = next((w for w in words if w in ("nt", "dl")), None)
                session.dump(what, fmt)
            elif cmd == "rules":
                session.rules()
            elif cmd == "stats":
                session.stats()
            elif cmd == "export-graph":
                session.export_graph(rest or None)
            else:
                raise UserError(f"unknown command {cmd!r} (try 'help')")
        except InvariantViolation as exc:
            print(f"invariant violation: {exc}", file=sys.stderr)
            return 2
        except (DatalogError, OSError, ValueError, ArithmeticError, KeyError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            status = 1
        if interactive:
            session.out.flush()
    return status


def dispatch(args, out) -> int:
    if args.command == "generate":
        spec = GeneratorSpec(args.kind, args.n, args.seed, cluster=args.cluster)
        facts = generate(spec)
        path = write_facts(facts, args.out, args.format)
        print(f"wrote {len(set(facts))} facts to {path}", file=out)
        return 0
    if args.command == "bench":
        return run_bench(args, out)
    if args.command == "shell":
        session = open_session(args, out)
        if args.script:
            with open(args.script, encoding="utf-8") as fh:
                return run_shell(session, fh)
        return run_shell(session, sys.stdin, interactive=sys.stdin.isatty())

    session = open_session(args, out)
    cmd = args.command
    if cmd == "load":
        return 0
    if cmd == "materialize":
        session.materialize()
    elif cmd == "add-rule":
        session.engine._require()
        session.add_rule(" ".join(args.rule))
    elif cmd == "del-rule":
        session.engine._require()
        session.del_rule(args.ids)
    elif cmd == "add-fact":
        session.engine._require()
        session.add_facts(args.fact)
    elif cmd == "del-fact":
        session.engine._require()
        session.del_facts(args.fact)
    elif cmd == "query":
        session.query(args.pattern)
    elif cmd == "dump":
        session.dump(args.what)
    elif cmd == "export-graph":
        session.export_graph(args.out_dir)
    elif cmd == "stats":
        session.stats()
    return 0


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return dispatch(args, out)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except (DatalogError, OSError, ValueError, ArithmeticError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
