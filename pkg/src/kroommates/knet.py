"""Acceptability graph, k-connected pairs and k-extended preference lists."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .core import Instance, Pair, RankedList, RoommatesError, pair
from .personalize import infer_list

STATED = "stated"
INFERRED = "inferred"


def network_tag(d: int) -> str:
    return f"network:{d}"


@dataclass(frozen=True)
class AcceptGraph:
    """Undirected graph of known, non-forbidden pairs with BFS distances.

    ``dist`` holds an entry for every connected pair of distinct agents.
    """

    vertices: tuple[str, ...]
    edges: frozenset[Pair]
    dist: Mapping[Pair, int]

    def distance(self, x: str, y: str) -> int | None:
        if x == y:
            return 0
        return self.dist.get(pair(x, y))


def build_accept_graph(inst: Instance) -> AcceptGraph:
    forbidden = inst.forbidden_pairs()
    adj: dict[str, set[str]] = {a: set() for a in inst.agents}
    edges = set()
    for x in inst.agents:
        for y in inst.stated[x].agents():
            p = pair(x, y)
            # one-sided listing suffices; either side's veto removes the edge
            if x != y and p not in forbidden and y in adj:
                edges.add(p)
                adj[x].add(y)
                adj[y].add(x)
    dist: dict[Pair, int] = {}
    for s in inst.agents:
        seen = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen[v] = seen[u] + 1
                    queue.append(v)
        for v, d in seen.items():
            if s < v:
                dist[(s, v)] = d
    return AcceptGraph(tuple(inst.agents), frozenset(edges), dist)


def k_connected_pairs(g: AcceptGraph, k: int) -> frozenset[Pair]:
    """Pairs at shortest-path distance exactly k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return frozenset(p for p, d in g.dist.items() if d == k)


def break_ties(x: str, inferred: RankedList, g: AcceptGraph) -> RankedList:
    """Split each tie by ascending network distance from x; unreachable agents
    form the last sub-tier."""
    out = []
    inf = float("inf")
    for tier in inferred.tiers:
        by_d: dict[float, set[str]] = {}
        for y in tier:
            d = g.distance(x, y)
            by_d.setdefault(inf if d is None else d, set()).add(y)
        out.extend(frozenset(by_d[d]) for d in sorted(by_d))
    return RankedList(tuple(out))


def candidate_tiers(
    x: str,
    inst: Instance,
    g: AcceptGraph,
    k: int,
    inferred: RankedList | None = None,
) -> RankedList:
    """Network candidates of x grouped by distance 1..k, excluding agents x
    already lists, infers, or declared unwanted."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return RankedList()
    if inferred is None:
        inferred = infer_list(x, inst)
    known = inst.stated[x].agents() | inferred.agents() | inst.unwanted[x] | {x}
    layers: dict[int, set[str]] = {}
    for y in inst.agents:
        d = g.distance(x, y)
        if y not in known and d is not None and 1 <= d <= k:
            layers.setdefault(d, set()).add(y)
    return RankedList(tuple(frozenset(layers[d]) for d in sorted(layers)))


@dataclass(frozen=True)
class KExtendedLists:
    k: int
    lists: Mapping[str, RankedList]
    provenance: Mapping[tuple[str, str], str]

    def tag(self, x: str, y: str) -> str | None:
        return self.provenance.get((x, y))


def k_extend(
    inst: Instance,
    k: int,
    g: AcceptGraph | None = None,
    break_ties_at_zero: bool = False,
) -> KExtendedLists:
    """Per agent: stated list, then the (tie-broken) inferred list, then
    network candidates up to distance k.

    Ties in the inferred lists are broken only for ``k >= 1`` unless
    ``break_ties_at_zero`` is set.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if g is None:
        g = build_accept_graph(inst)
    lists: dict[str, RankedList] = {}
    prov: dict[tuple[str, str], str] = {}
    for x in inst.agents:
        stated = inst.stated[x]
        inferred = infer_list(x, inst)
        if k >= 1 or break_ties_at_zero:
            inferred = break_ties(x, inferred, g)
        cands = candidate_tiers(x, inst, g, k, inferred)
        a, b, c = stated.agents(), inferred.agents(), cands.agents()
        if a & b or a & c or b & c:
            raise RoommatesError(f"overlapping list segments for agent {x}")
        lists[x] = stated + inferred + cands
        for y in a:
            prov[(x, y)] = STATED
        for y in b:
            prov[(x, y)] = INFERRED
        for y in c:
            prov[(x, y)] = network_tag(g.distance(x, y))
    return KExtendedLists(k, lists, prov)
