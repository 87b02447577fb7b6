"""Benchmark harness: solve a directory of instances for several k values."""
from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .formats import read_instance, write_text_atomic
from .gen import LMA, classify, completeness_degree, mutual_acceptability_rate
from .knet import k_extend
from .solver import Budget, find_k_stable

log = logging.getLogger(__name__)

COLUMNS = ["instance", "n", "cd", "map", "class", "k", "outcome", "solve_ms", "nodes"]
ERROR = "error"


@dataclass
class BenchRecord:
    instance: str
    n: int
    cd: float
    map: float
    cls: str
    k: int
    outcome: str
    solve_ms: float
    nodes: int

    def as_row(self) -> dict[str, str]:
        d = asdict(self)
        d["class"] = d.pop("cls")
        d["cd"] = "" if math.isnan(self.cd) else f"{self.cd:.6f}"
        d["map"] = "" if math.isnan(self.map) else f"{self.map:.6f}"
        d["solve_ms"] = f"{self.solve_ms:.3f}"
        return {c: str(d[c]) for c in COLUMNS}

    @classmethod
    def from_row(cls, row: dict[str, str]) -> "BenchRecord":
        def num(s: str) -> float:
            return float(s) if s else math.nan

        return cls(
            row["instance"], int(row["n"]), num(row["cd"]), num(row["map"]), row["class"],
            int(row["k"]), row["outcome"], float(row["solve_ms"]), int(row["nodes"]),
        )


def instance_files(directory: str | os.PathLike) -> list[tuple[str, Path]]:
    root = Path(directory)
    if not root.is_dir():
        raise NotADirectoryError(str(root))
    files = sorted(p for p in root.rglob("*.json") if p.is_file())
    return [(p.relative_to(root).with_suffix("").as_posix(), p) for p in files]


def _metrics(inst) -> tuple[float, float, str]:
    # c.d. counts stated entries; m.a.p. is measured on stated + inferred lists
    cd = completeness_degree(inst) if len(inst.agents) >= 2 else math.nan
    lists = k_extend(inst, 0).lists
    try:
        rate = mutual_acceptability_rate(lists)
    except ValueError:
        return cd, math.nan, LMA
    return cd, rate, classify(rate)


def bench_instance(name: str, path: Path, ks: Sequence[int], budget: Budget) -> list[BenchRecord]:
    try:
        inst = read_instance(path)
        cd, rate, cls = _metrics(inst)
    except Exception as e:  # recorded, not raised: one bad file must not stop the run
        log.warning("%s: %s", name, e)
        return [BenchRecord(name, 0, math.nan, math.nan, LMA, k, ERROR, 0.0, 0) for k in ks]
    out = []
    for k in ks:
        try:
            r = find_k_stable(inst, k, budget)
            out.append(BenchRecord(name, len(inst.agents), cd, rate, cls, k, r.outcome, r.seconds * 1000, r.nodes))
        except Exception as e:
            log.warning("%s k=%d: %s", name, k, e)
            out.append(BenchRecord(name, len(inst.agents), cd, rate, cls, k, ERROR, 0.0, 0))
    return out


def read_records(path: str | os.PathLike) -> list[BenchRecord]:
    with open(path, newline="", encoding="utf-8") as f:
        return [BenchRecord.from_row(r) for r in csv.DictReader(f)]


def dumps_records(records: Iterable[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in sorted(records, key=lambda r: (r.instance, r.k)):
        w.writerow(r.as_row())
    return buf.getvalue()


def _job(args):
    return bench_instance(*args)


def run_bench(
    directory: str | os.PathLike,
    ks: Sequence[int],
    out: str | os.PathLike,
    budget: Budget = Budget(),
    jobs: int = 1,
) -> list[BenchRecord]:
    """Solve every ``*.json`` under ``directory`` for each k, writing ``out``.

    Rows already present in ``out`` are kept and their (instance, k) pairs
    skipped, so an interrupted run can be resumed.  The CSV is rewritten
    atomically after each instance.
    """
    files = instance_files(directory)
    done: dict[tuple[str, int], BenchRecord] = {}
    if Path(out).exists():
        for r in read_records(out):
            done[(r.instance, r.k)] = r
    todo = []
    for name, path in files:
        missing = [k for k in ks if (name, k) not in done]
        if missing:
            todo.append((name, path, missing, budget))
    write_text_atomic(out, dumps_records(done.values()))
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for rows in pool.map(_job, todo):
                _merge(done, rows, out)
    else:
        for args in todo:
            _merge(done, _job(args), out)
    return sorted(done.values(), key=lambda r: (r.instance, r.k))


def _merge(done, rows, out) -> None:
    for r in rows:
        done[(r.instance, r.k)] = r
    write_text_atomic(out, dumps_records(done.values()))
