"""Delimited tables and figures for benchmark rows."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import FIELDS, loglog_slope  # noqa: E402


def write_table(rows, out, delimiter: str = ",") -> None:
    """Write rows to a path or an open text stream."""
    if isinstance(out, (str, Path)):
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="", encoding="utf-8") as fh:
            write_table(rows, fh, delimiter)
        return
    writer = csv.DictWriter(out, fieldnames=FIELDS, delimiter=delimiter, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        d = row.as_dict()
        for key in ("incremental_s", "scratch_s"):
            d[key] = f"{d[key]:.6f}"
        writer.writerow(d)


def _n_of(row) -> int:
    return int(row.param.split()[0].split("=")[1])


def plot_scaling(rows, path) -> Path:
    """Log-log plot of closure size and time against chain length."""
    rows = sorted(rows, key=_n_of)
    ns = [_n_of(r) for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(ns, [r.derived for r in rows], "o-", label="hasNeighbour facts")
    ax.loglog(ns, [n * (n - 1) for n in ns], "k--", lw=0.8, label="n(n-1)")
    ax.set_xlabel("turbines n")
    ax.set_ylabel("facts")
    ax2 = ax.twinx()
    ax2.set_yscale("log")
    ax2.plot(ns, [max(r.scratch_s, 1e-6) for r in rows], "s:", color="tab:red", label="time")
    ax2.set_ylabel("seconds")
    if len(ns) > 1:
        slope = loglog_slope(ns, [max(r.scratch_s, 1e-6) for r in rows])
        ax.set_title(f"closure growth (time slope {slope:.2f})")
    lines = ax.get_legend_handles_labels()
    lines2 = ax2.get_legend_handles_labels()
    ax.legend(lines[0] + lines2[0], lines[1] + lines2[1], loc="upper left", fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_updates(rows, path) -> Path:
    """Incremental vs from-scratch time per scenario row."""
    labels = [f"{r.scenario} {r.param}" if r.scenario.startswith("rs1") else r.scenario
              for r in rows]
    xs = range(len(rows))
    fig, ax = plt.subplots(figsize=(max(5, 0.35 * len(rows)), 4))
    width = 0.4
    ax.bar([x - width / 2 for x in xs], [r.incremental_s for r in rows], width,
           label="incremental")
    ax.bar([x + width / 2 for x in xs], [r.scratch_s for r in rows], width,
           label="from scratch")
    ax.set_yscale("log")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=75, ha="right", fontsize=7)
    ax.set_ylabel("seconds")
    for x, r in zip(xs, rows):
        if r.verdict != "PASS":
            ax.annotate("FAIL", (x, r.incremental_s), color="red", fontsize=7, ha="center")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render(rows, outdir, stem: str) -> list:
    """Write ``<stem>.png`` figures next to the table; returns the paths."""
    outdir = Path(outdir)
    scale = [r for r in rows if r.scenario == "rs1-scale"]
    other = [r for r in rows if r.scenario != "rs1-scale"]
    paths = []
    if scale:
        paths.append(plot_scaling(scale, outdir / f"{stem}-scaling.png"))
    if other:
        paths.append(plot_updates(other, outdir / f"{stem}-updates.png"))
    return paths
