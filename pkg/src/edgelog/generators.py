"""Synthetic datasets.

``chain-ds1``: turbines ``wt1..wtn`` linked as a chain by ``hasNeighbour``,
each with one ``hasAirTemperatureMesurement`` reading.  Normal readings are
20.0 ± 0.5; anomalous turbines read 30.0.

``multirel-ds2``: relations ``p1..p5`` over entities ``wt1..wtn``.  Entities
are split into clusters and each ordered pair inside a cluster carries a
relation with that relation's density.  Clusters keep closures bounded;
densities and cluster size are configuration, not part of any contract.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .model import fact_sort_key, render_fact_dl, render_fact_nt

NEIGHBOUR = "hasNeighbour"
TEMPERATURE = "hasAirTemperatureMesurement"

DS2_DENSITIES = {"p1": 0.12, "p2": 0.12, "p3": 0.06, "p4": 0.10, "p5": 0.10}


@dataclass
class GeneratorSpec:
    kind: str  # chain-ds1 | multirel-ds2
    n: int
    seed: int = 0
    densities: dict = field(default_factory=lambda: dict(DS2_DENSITIES))
    cluster: int = 10
    anomalies: tuple = None  # 1-based turbine indexes reading 30.0
    start: int = 1

    def __post_init__(self):
        if self.kind not in ("chain-ds1", "multirel-ds2"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.n < 2:
            raise ValueError("n must be at least 2")


def turbine(i: int) -> str:
    return f"wt{i}"


def normal_reading(rng: random.Random) -> float:
    return round(20.0 + rng.uniform(-0.5, 0.5), 2)


def chain_ds1(n: int, seed: int = 0, anomalies=None, start: int = 1) -> list:
    """Chain of ``n`` turbines numbered from ``start`` with one reading each.

    ``anomalies`` is a collection of turbine numbers read at 30.0, or a
    mapping from turbine number to reading; by default the middle turbine.
    """
    rng = random.Random(seed)
    if anomalies is None:
        anomalies = ((n + 1) // 2 + start - 1,)
    if not isinstance(anomalies, dict):
        anomalies = {i: 30.0 for i in anomalies}
    facts = []
    for i in range(start, start + n - 1):
        facts.append((NEIGHBOUR, turbine(i), turbine(i + 1)))
    for i in range(start, start + n):
        value = anomalies[i] if i in anomalies else normal_reading(rng)
        facts.append((TEMPERATURE, turbine(i), value))
    return facts


def extend_chain(n: int, extra: int, seed: int = 1) -> list:
    """Facts attaching turbines ``n+1..n+extra`` to the end of an ``n``-chain."""
    rng = random.Random(seed)
    facts = []
    for i in range(n, n + extra):
        facts.append((NEIGHBOUR, turbine(i), turbine(i + 1)))
        facts.append((TEMPERATURE, turbine(i + 1), normal_reading(rng)))
    return facts


def multirel_ds2(n: int, seed: int = 0, densities=None, cluster: int = 10) -> list:
    rng = random.Random(seed)
    densities = dict(DS2_DENSITIES if densities is None else densities)
    facts = []
    for lo in range(1, n + 1, cluster):
        members = [turbine(i) for i in range(lo, min(lo + cluster, n + 1))]
        for pred in sorted(densities):
            density = densities[pred]
            for a in members:
                for b in members:
                    if a != b and rng.random() < density:
                        facts.append((pred, a, b))
    return facts


def generate(spec: GeneratorSpec) -> list:
    if spec.kind == "chain-ds1":
        return chain_ds1(spec.n, spec.seed, spec.anomalies, spec.start)
    return multirel_ds2(spec.n, spec.seed, spec.densities, spec.cluster)


def write_facts(facts, path, fmt: str = None) -> Path:
    """Write facts sorted, one per line, as N-Triples (``.nt``) or ``p(s, o).``."""
    path = Path(path)
    if fmt is None:
        fmt = "nt" if path.suffix == ".nt" else "dl"
    render = render_fact_nt if fmt == "nt" else render_fact_dl
    lines = [render(f) for f in sorted(set(facts), key=fact_sort_key)]
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return path
