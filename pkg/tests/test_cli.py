import io
import subprocess
import sys

import pytest

from edgelog.cli import main, parse_pattern
from edgelog.model import fact_sort_key
from edgelog.parser import parse_fact


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture(scope="module")
def data(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert run("generate", "chain-ds1", "-n", "50", "-o", str(root / "chain.nt"))[0] == 0
    assert run("generate", "multirel-ds2", "-n", "60", "-o", str(root / "ds2.dl"))[0] == 0
    (root / "three.dl").write_text("hasNeighbour(wt1, wt2).\nhasNeighbour(wt2, wt3).\n")
    (root / "empty.dl").write_text("")
    return root


class TestLoad:
    def test_rs2(self):
        assert run("load", "--rules", "rs2") == (0, "18 rules, 14 hyper-nodes\n")

    def test_rs1_reports_aggregates(self):
        code, out = run("load", "--rules", "rs1")
        assert code == 0 and out.startswith("6 rules, 5 hyper-nodes") and "aggregation" in out

    def test_empty_file(self, data):
        code, out = run("load", "--rules", str(data / "empty.dl"))
        assert code == 0 and out.startswith("0 rules")

    def test_bad_file(self, tmp_path):
        bad = tmp_path / "bad.dl"
        bad.write_text("r1: a(X, Y) :- b(X, Y).\nr2: c(X :- d.\n")
        assert run("load", "--rules", str(bad))[0] == 1

    def test_missing_file(self):
        assert run("load", "--rules", "/nonexistent/rules.dl")[0] == 1


class TestMaterialize:
    def test_rs1_chain(self, data):
        code, out = run("materialize", "--rules", "rs1", "--facts", str(data / "chain.nt"))
        assert code == 0
        assert "  hasNeighbour 2450" in out
        assert "rdf:type:SensorAnomalyWindTurbine 1" in out

    def test_no_rules(self):
        code, out = run("materialize")
        assert code == 0 and out.startswith("0 derived")

    def test_rs3_node_lines(self, data):
        _, out = run("materialize", "--rules", "rs3", "--facts", str(data / "ds2.dl"))
        assert sum(1 for line in out.splitlines() if line.startswith("hn[")) == 14

    def test_explain_and_trace(self, data):
        _, out = run("materialize", "--rules", "rs2", "--facts", str(data / "ds2.dl"),
                     "--explain-plan", "--trace-fixpoint")
        assert "class=P(?s,?o)" in out and "trace hn[r2,r3] iteration=1" in out


class TestUpdates:
    def test_split_report(self, tmp_path):
        from test_graph import EXAMPLE

        rules = tmp_path / "example.dl"
        rules.write_text(EXAMPLE)
        code, out = run("del-rule", "--rules", str(rules), "r4")
        assert code == 0
        assert "DIHN: hn[r2], hn[r3], hn[r5], hn[r6,r7]" in out
        assert "replaced/dropped: hn[r2,r3,r4]" in out

    def test_bad_rule(self, data):
        code, out = run("add-rule", "--rules", "rs2", "--facts", str(data / "ds2.dl"),
                        "r19: broken(X :- p1.")
        assert code == 1 and "rule evaluations" not in out

    def test_leaf_insert(self, tmp_path, data):
        from edgelog.rulesets import rule_set_text

        text = "\n".join(line for line in rule_set_text("rs2").splitlines()
                         if not line.startswith("r18:"))
        rules = tmp_path / "rs2-minus.dl"
        rules.write_text(text)
        log = tmp_path / "updates.log"
        code, out = run("add-rule", "--rules", str(rules), "--facts", str(data / "ds2.dl"),
                        "--update-log", str(log), "r18: p31(X, Y) :- p25(X, Y) ∧ p26(Y, Z).")
        assert code == 0
        assert "plan: hn[r18]" in out
        evaluated = [line.split()[0] for line in out.splitlines()
                     if "evals=" in line and not line.strip().endswith("evals=0")]
        assert evaluated == ["hn[r18]"]
        assert log.read_text().startswith("add-rule dihn=[hn[r18]]")

    def test_unsafe_rule(self, data):
        code, _ = run("add-rule", "--rules", "rs3", "--facts", str(data / "ds2.dl"),
                      "r40: p13(X, Y) :- p20(X, Y).")
        assert code == 1

    def test_add_fact(self, data):
        code, out = run("add-fact", "--rules", "rs1", "--facts", str(data / "three.dl"),
                        "hasNeighbour(wt3, wt4)")
        assert code == 0 and "edb: +1/-0" in out

    def test_del_fact(self, data):
        code, out = run("del-fact", "--rules", "rs1", "--facts", str(data / "three.dl"),
                        "<wt2> <hasNeighbour> <wt3> .")
        assert code == 0 and "edb: +0/-1" in out


class TestQuery:
    def test_three_chain(self, data):
        code, out = run("query", "--rules", "rs1", "--facts", str(data / "three.dl"),
                        "hasNeighbour(wt1, ?)")
        assert code == 0 and out.endswith("2 results\n")

    def test_both_constants(self, data):
        _, out = run("query", "--rules", "rs1", "--facts", str(data / "three.dl"),
                     "hasNeighbour(wt1, wt3)")
        assert out.endswith("1 results\n")

    def test_unknown_predicate(self, data):
        code, out = run("query", "--rules", "rs1", "--facts", str(data / "three.dl"),
                        "nothing(?, ?)")
        assert code == 0 and out.endswith("0 results\n")

    def test_pattern_parsing(self):
        assert parse_pattern("p(a, ?)") == ("p", "a", None)
        assert parse_pattern("p(?, ?)") == ("p", None, None)
        assert parse_pattern("Turbine(?)") == ("rdf:type", None, "Turbine")


class TestDump:
    def test_sorted_and_stable(self, data):
        args = ("dump", "--rules", "rs2", "--facts", str(data / "ds2.dl"))
        first, second = run(*args), run(*args)
        assert first == second
        lines = first[1].splitlines()
        assert lines and all(line.endswith(" .") for line in lines)
        facts = [parse_fact(line) for line in lines]
        assert facts == sorted(facts, key=fact_sort_key)

    def test_edb_dl(self, data):
        _, out = run("dump", "--rules", "rs1", "--facts", str(data / "three.dl"),
                     "--what", "edb", "--format", "dl")
        assert out == "hasNeighbour(wt1, wt2).\nhasNeighbour(wt2, wt3).\n"


def test_export_graph(tmp_path):
    code, out = run("export-graph", "--rules", "rs3", "--out-dir", str(tmp_path))
    assert code == 0
    assert "[style=dashed]" in (tmp_path / "rdg.dot").read_text()
    assert (tmp_path / "hrdg.dot").read_text().startswith("digraph HRDG")


def test_stats(data):
    code, out = run("stats", "--rules", "rs2", "--facts", str(data / "ds2.dl"))
    assert code == 0 and "hyper-nodes: 14" in out


def test_generate_counts(tmp_path):
    code, out = run("generate", "chain-ds1", "-n", "3", "-o", str(tmp_path / "c.nt"))
    assert code == 0
    assert (tmp_path / "c.nt").read_text().count("<hasNeighbour>") == 2


class TestBench:
    def test_list(self):
        code, out = run("bench", "--list")
        assert code == 0 and "rs2-insert-r18" in out.splitlines()

    def test_scenario_with_figures(self, tmp_path):
        table = tmp_path / "neg.tsv"
        code, out = run("bench", "rs3-negation", "-n", "40", "--out", str(table))
        assert code == 0 and "4/4 PASS" in out
        assert table.read_text().splitlines()[0].split("\t")[0] == "scenario"
        assert (tmp_path / "neg-updates.png").exists()

    def test_scale_csv(self, tmp_path):
        table = tmp_path / "scale.csv"
        code, _ = run("bench", "rs1-scale", "--sizes", "5,10", "--out", str(table))
        assert code == 0
        assert "rs1-scale,n=10," in table.read_text()
        assert (tmp_path / "scale-scaling.png").exists()

    def test_unknown(self):
        assert run("bench", "nope")[0] == 1


class TestShell:
    def test_script(self, tmp_path, data):
        script = tmp_path / "s.txt"
        script.write_text(f"""# session
load rules rs1
load facts {data / 'three.dl'}
materialize
query hasNeighbour(wt1, ?)
add-fact hasNeighbour(wt3, wt4); hasAirTemperatureMesurement(wt4, 20.0)
query hasNeighbour(wt1, ?)
del-rule r2
query hasNeighbour(wt1, ?)
rules
help
quit
query never(?, ?)
""")
        code, out = run("shell", "--script", str(script))
        assert code == 0
        results = [line for line in out.splitlines() if line.endswith(" results")]
        assert results == ["2 results", "3 results", "1 results"]
        assert "never" not in out

    def test_errors_set_status(self, tmp_path):
        script = tmp_path / "s.txt"
        script.write_text("bogus\nload rules rs2\nstats\n")
        code, out = run("shell", "--script", str(script))
        assert code == 1 and "hyper-nodes: 14" in out

    def test_stdin(self, monkeypatch):
        monkeypatch.setattr(sys, "stdin", io.StringIO("load rules rs2\nmaterialize\n"))
        code, out = run("shell")
        assert code == 0 and "18 rules, 14 hyper-nodes" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "edgelog", "load", "--rules", "rs3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "18 rules, 14 hyper-nodes\n"


def test_invariant_violation_exit_code(monkeypatch):
    from edgelog.errors import InvariantViolation
    from edgelog import cli

    def boom(self):
        raise InvariantViolation("drift")

    monkeypatch.setattr(cli.Session, "stats", boom)
    assert run("stats", "--rules", "rs2")[0] == 2
