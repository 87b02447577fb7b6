"""Figures for benchmark CSVs."""
from __future__ import annotations

import os
from collections import defaultdict
from statistics import median
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import BenchRecord  # noqa: E402
from .solver import SAT  # noqa: E402


def satisfiable_fractions(records: Sequence[BenchRecord]) -> dict[tuple[str, int], float]:
    """Fraction of instances with a matching, per (class, k)."""
    hits: dict[tuple[str, int], list[bool]] = defaultdict(list)
    for r in records:
        hits[(r.cls, r.k)].append(r.outcome == SAT)
    return {key: sum(v) / len(v) for key, v in sorted(hits.items())}


def plot_bench(records: Sequence[BenchRecord], path: str | os.PathLike, title: str | None = None) -> None:
    """Two panels: satisfiable fraction per class and k, median solve time per n and k."""
    fracs = satisfiable_fractions(records)
    classes = sorted({c for c, _ in fracs})
    ks = sorted({k for _, k in fracs})
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))

    width = 0.8 / max(len(ks), 1)
    for j, k in enumerate(ks):
        xs = [i + (j - (len(ks) - 1) / 2) * width for i in range(len(classes))]
        ys = [fracs.get((c, k), 0.0) for c in classes]
        ax1.bar(xs, ys, width=width, label=f"k={k}")
    ax1.set_xticks(range(len(classes)))
    ax1.set_xticklabels(classes)
    ax1.set_ylim(0, 1.05)
    ax1.set_ylabel("fraction with a matching")
    ax1.legend(frameon=False)

    times: dict[int, dict[int, list[float]]] = defaultdict(lambda: defaultdict(list))
    for r in records:
        if r.outcome in ("sat", "unsat"):
            times[r.k][r.n].append(r.solve_ms / 1000)
    for k in sorted(times):
        ns = sorted(times[k])
        ax2.plot(ns, [median(times[k][n]) for n in ns], marker="o", label=f"k={k}")
    ax2.set_xlabel("agents")
    ax2.set_ylabel("median solve time (s)")
    if times:
        ax2.legend(frameon=False)

    for ax in (ax1, ax2):
        ax.spines["top"].set_visible(False)
        ax.spines["right"].set_visible(False)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
