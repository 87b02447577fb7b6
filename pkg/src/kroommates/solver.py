"""Find, enumerate and verify k-stable matchings.

The search is a backtracking solver over partner domains.  Every agent's
domain holds its remaining mutually acceptable partners plus itself (single).
Two rules are propagated after each decision:

* symmetry: y may partner x only while x may partner y, and a fixed
  partnership fixes both sides;
* stability: once the best value left for x is strictly worse than some
  mutual partner y, then y must end with a partner it ranks at least as
  high as x, otherwise {x, y} would block.

A complete assignment reached this way has no blocking pair, and every
stable matching survives propagation, so exhaustive search enumerates
exactly the stable matchings.

Before searching, ``solve_lists`` runs Irving's algorithm on a few strict
refinements of the lists (ties ordered by id, then seeded shuffles).  Any
matching found that way is weakly stable for the tied lists; the search
remains the complete procedure and the only way to prove unsatisfiability.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Iterator, Mapping

from .core import (
    Instance,
    InvalidInstanceError,
    InvalidMatchingError,
    Matching,
    Pair,
    RankedList,
    blocking_pairs,
    mutual_pairs,
    pair,
    validate_instance,
)
from .irving import refine, stable_roommates
from .knet import k_extend

SAT = "sat"
UNSAT = "unsat"
TIMEOUT = "timeout"

DEFAULT_MAX_NODES = 10_000_000
DEFAULT_MAX_SECONDS = 60.0
ORACLE_MAX_AGENTS = 10
IRVING_ATTEMPTS = 32


@dataclass(frozen=True)
class Budget:
    max_nodes: int | None = DEFAULT_MAX_NODES
    max_seconds: float | None = DEFAULT_MAX_SECONDS


UNLIMITED = Budget(None, None)


@dataclass
class SolveResult:
    outcome: str
    matching: Matching | None = None
    nodes: int = 0
    seconds: float = 0.0
    method: str = "search"

    @property
    def satisfiable(self) -> bool:
        return self.outcome == SAT


@dataclass(frozen=True)
class Certificate:
    """Empty ``blocking`` means the matching is stable."""

    blocking: tuple[Pair, ...] = ()

    @property
    def stable(self) -> bool:
        return not self.blocking


class _Timeout(Exception):
    pass


def _check_k(k: int) -> None:
    if not isinstance(k, int) or k < 0:
        raise ValueError(f"k must be a non-negative integer, got {k!r}")


def k_lists(inst: Instance, k: int) -> dict[str, RankedList]:
    _check_k(k)
    return dict(k_extend(inst, k).lists)


def check_matching(lists: Mapping[str, RankedList], m: Matching, forbidden=frozenset()) -> None:
    """Raise unless every matched pair is mutually acceptable and allowed."""
    for x in lists:
        if x not in m.partner:
            raise InvalidMatchingError(f"matching does not cover agent {x}")
    for a in m.partner:
        if a not in lists:
            raise InvalidMatchingError(f"unknown agent {a}")
    for x, y in m.pairs():
        if pair(x, y) in forbidden:
            raise InvalidMatchingError(f"forbidden pair {x}-{y} is matched")
        if y not in lists[x] or x not in lists[y]:
            raise InvalidMatchingError(f"invalid k-matching: {x}-{y} not mutually acceptable")


def verify_lists(lists: Mapping[str, RankedList], m: Matching, forbidden=frozenset()) -> Certificate:
    check_matching(lists, m, forbidden)
    return Certificate(tuple(sorted(blocking_pairs(lists, m))))


def verify_k_stable(inst: Instance, k: int, m: Matching) -> Certificate:
    """All k-blocking pairs of ``m`` under the k-extended lists of ``inst``."""
    return verify_lists(k_lists(inst, k), m, inst.forbidden_pairs())


class _Search:
    def __init__(self, lists: Mapping[str, RankedList], forbidden, budget: Budget):
        self.names = sorted(lists)
        idx = {a: i for i, a in enumerate(self.names)}
        n = len(self.names)
        self.n = n
        self.single_rank = 1 << 30
        self.rank: list[dict[int, int]] = []
        for i, a in enumerate(self.names):
            r = {idx[b]: t for b, t in lists[a].rank_map().items() if b in idx}
            r[i] = self.single_rank
            self.rank.append(r)
        self.mutual: list[list[int]] = [[] for _ in range(n)]
        for x, y in mutual_pairs(lists):
            if pair(x, y) in forbidden:
                continue
            i, j = idx[x], idx[y]
            self.mutual[i].append(j)
            self.mutual[j].append(i)
        for i in range(n):
            self.mutual[i].sort(key=lambda j, i=i: (self.rank[i][j], j))
        # tie order for smallest-domain-first picks: fewest mutual partners, then id
        self.order = sorted(range(n), key=lambda i: (len(self.mutual[i]), self.names[i]))
        self.budget = budget
        self.nodes = 0
        self.start = time.perf_counter()

    def initial(self) -> list[set[int]] | None:
        dom = [set(self.mutual[i]) | {i} for i in range(self.n)]
        return dom if self.propagate(dom, list(range(self.n))) else None

    def propagate(self, dom: list[set[int]], queue: list[int]) -> bool:
        rank, mutual = self.rank, self.mutual
        while queue:
            x = queue.pop()
            dx = dom[x]
            if not dx:
                return False
            rx = rank[x]
            for y in mutual[x]:
                if y not in dx and x in dom[y]:
                    dom[y].discard(x)
                    queue.append(y)
            if len(dx) == 1:
                (v,) = dx
                if v != x:
                    dv = dom[v]
                    if x not in dv:
                        return False
                    if len(dv) > 1:
                        dom[v] = {x}
                        queue.append(v)
            best = min(rx[v] for v in dx)
            for y in mutual[x]:
                ry = rank[y]
                if rx[y] >= best:
                    # mutual[x] is sorted by x's rank; the rest are no better
                    break
                cap = ry[x]
                dy = dom[y]
                worse = [v for v in dy if ry[v] > cap]
                if worse:
                    dy.difference_update(worse)
                    queue.append(y)
        return True

    def tick(self) -> None:
        self.nodes += 1
        b = self.budget
        if b.max_nodes is not None and self.nodes > b.max_nodes:
            raise _Timeout
        if b.max_seconds is not None and self.nodes % 256 == 0:
            if time.perf_counter() - self.start > b.max_seconds:
                raise _Timeout

    def pick(self, dom: list[set[int]]) -> int | None:
        best, size = None, 1 << 30
        for i in self.order:
            s = len(dom[i])
            if 1 < s < size:
                best, size = i, s
                if s == 2:
                    break
        return best

    def solutions(self, dom: list[set[int]]) -> Iterator[list[int]]:
        self.tick()
        x = self.pick(dom)
        if x is None:
            yield [next(iter(d)) for d in dom]
            return
        rx = self.rank[x]
        for v in sorted(dom[x], key=lambda v: (rx[v], v)):
            child = [set(d) for d in dom]
            child[x] = {v}
            if self.propagate(child, [x]):
                yield from self.solutions(child)

    def to_matching(self, assign: list[int]) -> Matching:
        return Matching({self.names[i]: self.names[j] for i, j in enumerate(assign)})


def _iter_stable(lists, forbidden, budget) -> tuple[_Search, Iterator[Matching]]:
    s = _Search(lists, forbidden, budget)

    def gen():
        dom = s.initial()
        if dom is None:
            return
        for assign in s.solutions(dom):
            m = s.to_matching(assign)
            if not m.pairs():
                # the all-single matching is not accepted as a solution
                continue
            yield m

    return s, gen()


def _irving_fast_path(lists, forbidden, attempts: int, budget: Budget, t0: float) -> Matching | None:
    # with strict lists every refinement is the same instance: one attempt
    if all(len(l) == len(l.tiers) for l in lists.values()):
        attempts = min(attempts, 1)
    for a in range(attempts):
        if budget.max_seconds is not None and time.perf_counter() - t0 > budget.max_seconds:
            break
        m = stable_roommates(refine(lists, forbidden, None if a == 0 else random.Random(a)))
        if m is not None:
            # an empty stable matching means there is no mutual pair at all
            return m if m.pairs() else None
    return None


def solve_lists(
    lists: Mapping[str, RankedList],
    forbidden=frozenset(),
    budget: Budget = Budget(),
    irving_attempts: int = IRVING_ATTEMPTS,
) -> SolveResult:
    """A stable matching of the given lists, or UNSAT / TIMEOUT."""
    t0 = time.perf_counter()
    m = _irving_fast_path(lists, forbidden, irving_attempts, budget, t0)
    if m is not None:
        method, nodes = "irving", 0
    else:
        method = "search"
        s, it = _iter_stable(lists, forbidden, budget)
        s.start = t0
        try:
            m = next(it, None)
        except _Timeout:
            return SolveResult(TIMEOUT, None, s.nodes, time.perf_counter() - t0)
        nodes = s.nodes
    dt = time.perf_counter() - t0
    if m is None:
        return SolveResult(UNSAT, None, nodes, dt)
    cert = verify_lists(lists, m, forbidden)
    if not cert.stable:
        raise AssertionError(f"solver produced a blocked matching: {cert.blocking}")
    return SolveResult(SAT, m, nodes, dt, method)


def enumerate_lists(
    lists: Mapping[str, RankedList],
    forbidden=frozenset(),
    limit: int | None = None,
    budget: Budget = UNLIMITED,
) -> list[Matching]:
    if limit is not None and limit < 1:
        raise ValueError("limit must be >= 1")
    _, it = _iter_stable(lists, forbidden, budget)
    try:
        found = list(itertools.islice(it, limit))
    except _Timeout:
        raise TimeoutError("search budget exhausted during enumeration") from None
    return sorted(found, key=Matching.sort_key)


def _require_valid(inst: Instance) -> None:
    problems = validate_instance(inst)
    if problems:
        raise InvalidInstanceError("; ".join(problems))


def find_k_stable(
    inst: Instance,
    k: int,
    budget: Budget = Budget(),
    irving_attempts: int = IRVING_ATTEMPTS,
) -> SolveResult:
    """A k-stable matching with at least one pair, or UNSAT / TIMEOUT."""
    _require_valid(inst)
    return solve_lists(k_lists(inst, k), inst.forbidden_pairs(), budget, irving_attempts)


def enumerate_k_stable(inst: Instance, k: int, limit: int | None = 10, budget: Budget = UNLIMITED) -> list[Matching]:
    """Up to ``limit`` distinct k-stable matchings, sorted by pair lists."""
    _require_valid(inst)
    return enumerate_lists(k_lists(inst, k), inst.forbidden_pairs(), limit, budget)


def all_matchings(lists: Mapping[str, RankedList], forbidden=frozenset()) -> Iterator[Matching]:
    """Every partition of the agents into singles and allowed mutual pairs."""
    agents = sorted(lists)
    ok = {p for p in mutual_pairs(lists) if p not in forbidden}

    def rec(rest: list[str], partner: dict[str, str]):
        if not rest:
            yield Matching(partner)
            return
        x, tail = rest[0], rest[1:]
        partner[x] = x
        yield from rec(tail, partner)
        del partner[x]
        for i, y in enumerate(tail):
            if pair(x, y) in ok:
                partner[x], partner[y] = y, x
                yield from rec(tail[:i] + tail[i + 1 :], partner)
                del partner[x], partner[y]

    yield from rec(agents, {})


def brute_force_oracle(inst: Instance, k: int, max_agents: int = ORACLE_MAX_AGENTS) -> list[Matching]:
    """Every k-stable matching (with at least one pair) by exhaustive listing."""
    if len(inst.agents) > max_agents:
        raise ValueError(f"oracle limited to {max_agents} agents, instance has {len(inst.agents)}")
    _require_valid(inst)
    lists = k_lists(inst, k)
    forbidden = inst.forbidden_pairs()
    out = [
        m
        for m in all_matchings(lists, forbidden)
        if m.pairs() and not blocking_pairs(lists, m)
    ]
    return sorted(out, key=Matching.sort_key)
