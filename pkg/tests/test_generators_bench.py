import csv

import pytest

from edgelog.bench import (compare, loglog_slope, negation_scenario, rs1_scale, rule_update,
                           run_scenario, scenario_names)
from edgelog.errors import DatalogError
from edgelog.generators import (NEIGHBOUR, TEMPERATURE, GeneratorSpec, chain_ds1, extend_chain,
                                generate, multirel_ds2, write_facts)
from edgelog.parser import read_facts
from edgelog.report import render, write_table


class TestChain:
    def test_three(self):
        facts = chain_ds1(3)
        assert sorted(f for f in facts if f[0] == NEIGHBOUR) == [
            (NEIGHBOUR, "wt1", "wt2"), (NEIGHBOUR, "wt2", "wt3")]

    def test_four_hundred(self):
        assert sum(1 for f in chain_ds1(400) if f[0] == NEIGHBOUR) == 399

    def test_temperatures(self):
        temps = {s: o for p, s, o in chain_ds1(10) if p == TEMPERATURE}
        assert len(temps) == 10
        assert temps["wt5"] == 30.0
        assert all(19.5 <= t <= 20.5 for s, t in temps.items() if s != "wt5")

    def test_custom_anomalies(self):
        temps = {s: o for p, s, o in chain_ds1(6, anomalies={2: 40.0}) if p == TEMPERATURE}
        assert temps["wt2"] == 40.0 and temps["wt3"] != 30.0

    def test_extend(self):
        extra = extend_chain(10, 3)
        assert (NEIGHBOUR, "wt10", "wt11") in extra
        assert sum(1 for f in extra if f[0] == NEIGHBOUR) == 3
        assert sum(1 for f in extra if f[0] == TEMPERATURE) == 3


class TestMultirel:
    def test_deterministic(self):
        assert multirel_ds2(100, seed=4) == multirel_ds2(100, seed=4)
        assert multirel_ds2(100, seed=4) != multirel_ds2(100, seed=5)

    def test_predicates(self):
        preds = {p for p, _, _ in multirel_ds2(100)}
        assert preds == {"p1", "p2", "p3", "p4", "p5"}

    def test_bytes_identical(self, tmp_path):
        a, b = tmp_path / "a.nt", tmp_path / "b.nt"
        write_facts(multirel_ds2(50, seed=9), a)
        write_facts(multirel_ds2(50, seed=9), b)
        assert a.read_bytes() == b.read_bytes()
        assert sorted(read_facts(a)) == sorted(set(multirel_ds2(50, seed=9)))


class TestSpec:
    def test_minimum_size(self):
        with pytest.raises(ValueError):
            GeneratorSpec("chain-ds1", 1)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            GeneratorSpec("tree", 5)

    def test_generate(self):
        assert generate(GeneratorSpec("chain-ds1", 4)) == chain_ds1(4)
        assert generate(GeneratorSpec("multirel-ds2", 30, seed=2)) == multirel_ds2(30, 2)


def test_dl_output(tmp_path):
    path = tmp_path / "c.dl"
    write_facts(chain_ds1(3), path)
    assert "hasNeighbour(wt1, wt2)." in path.read_text()
    assert sorted(read_facts(path)) == sorted(chain_ds1(3))


class TestBench:
    def test_slope(self):
        assert loglog_slope([10, 100], [100, 10000]) == pytest.approx(2.0)

    def test_compare(self):
        assert compare({1}, {1}) == ("PASS", "")
        verdict, detail = compare({1}, {2})
        assert verdict == "FAIL" and "missing=1" in detail

    def test_leaf_insert(self):
        row = rule_update("rs2", "r18", insert=True, n=40)
        assert row.verdict == "PASS" and row.plan == 1

    def test_unknown_rule(self):
        with pytest.raises(DatalogError):
            rule_update("rs2", "r99", insert=True, n=10)

    def test_negation_rows(self):
        rows = negation_scenario(n=60)
        assert [r.verdict for r in rows] == ["PASS"] * 4
        assert all(r.diff_added or r.diff_removed for r in rows)

    def test_scale(self):
        rows = rs1_scale((5, 10, 20))
        assert [r.derived for r in rows] == [20, 90, 380]

    def test_names_and_dispatch(self):
        names = scenario_names()
        assert "rs2-insert-r18" in names and "rs3-delete-r10_new" in names
        assert run_scenario("rs3-delete-r10_new", n=30)[0].verdict == "PASS"
        with pytest.raises(DatalogError):
            run_scenario("nope")

    def test_table_and_figures(self, tmp_path):
        rows = rs1_scale((5, 10)) + negation_scenario(n=30)
        out = tmp_path / "sub" / "bench.tsv"
        write_table(rows, out, "\t")
        with open(out, newline="") as fh:
            parsed = list(csv.DictReader(fh, delimiter="\t"))
        assert len(parsed) == len(rows) and parsed[0]["verdict"] == "PASS"
        paths = render(rows, tmp_path / "sub", "bench")
        assert [p.name for p in paths] == ["bench-scaling.png", "bench-updates.png"]
        assert all(p.stat().st_size > 1000 for p in paths)
