"""Shared strategies, independent oracles and expected worked-example data."""
from __future__ import annotations

import itertools
import string

from hypothesis import strategies as st

from kroommates.core import Criterion, Instance, Matching, RankedList, pair


def T(*entries) -> RankedList:
    """T("e", {"a", "b"}, "c") -> <e, {a,b}, c>"""
    return RankedList.of(*entries)


def M(agents, *pairs) -> Matching:
    """M("abcde", "bc", "de") -> {bc, de, a}"""
    return Matching.from_pairs(list(agents), [tuple(p) for p in pairs])


# Worked-example columns, transcribed tier by tier.
TABLE1_EXTENDED = {
    "a": T("e", "b"),
    "b": T("e"),
    "c": T("b", {"a", "e"}),
    "d": T("b"),
    "e": T("d"),
}
TABLE2_K1 = {
    "a": T("e", "b"),
    "b": T("e", "c"),
    "c": T("b", "e", "a"),
    "d": T("b", "e"),
    "e": T("d", {"a", "b"}),
}
TABLE2_K2 = {
    "a": T("e", "b", "d"),
    "b": T("e", "c", "a"),
    "c": T("b", "e", "a"),
    "d": T("b", "e", "a"),
    "e": T("d", {"a", "b"}, "c"),
}
TABLE3_K1 = {
    "a": T("b", "d", "f"),
    "b": T("f", "e", {"a", "c"}),
    "c": T("b", "d"),
    "d": T("c", "b"),
    "e": T("c", "a"),
    "f": T("a", "c"),
}
TABLE3_K2 = {
    "a": T("b", "d", "f", "c"),
    "b": T("f", "e", {"a", "c"}, "d"),
    "c": T("b", "d", "a"),
    "d": T("c", "b"),
    "e": T("c", "a"),
    "f": T("a", "c", "b"),
}
TABLE4_K1 = {
    "a": T("b"),
    "b": T("e", "a", {"c", "d"}),
    "c": T("b", "d", "e"),
    "d": T("b", "c"),
    "e": T("b"),
}


# ---------------------------------------------------------------- strategies

@st.composite
def ranked_lists(draw, owner: str, others: list[str], max_tier: int = 3) -> RankedList:
    chosen = draw(st.lists(st.sampled_from(others), unique=True)) if others else []
    tiers, i = [], 0
    while i < len(chosen):
        size = draw(st.integers(1, max_tier))
        tiers.append(chosen[i : i + size])
        i += size
    return RankedList.from_lists(tiers)


@st.composite
def instances(draw, min_agents: int = 2, max_agents: int = 6, profiles: bool = True, unwanted: bool = True) -> Instance:
    n = draw(st.integers(min_agents, max_agents))
    agents = list(string.ascii_lowercase[:n])
    stated, unw = {}, {}
    for x in agents:
        others = [y for y in agents if y != x]
        stated[x] = draw(ranked_lists(x, others))
        rest = [y for y in others if y not in stated[x]]
        unw[x] = frozenset(draw(st.lists(st.sampled_from(rest), unique=True, max_size=2))) if unwanted and rest else frozenset()
    if not profiles or not draw(st.booleans()):
        return Instance(tuple(agents), stated, unw)
    nc = draw(st.integers(1, 3))
    catalog = tuple(
        Criterion(f"c{i}", tuple(f"o{j}" for j in range(draw(st.integers(1, 3))))) for i in range(nc)
    )
    respondents = draw(st.lists(st.sampled_from(agents), unique=True))
    prof, wts = {}, {}
    for x in respondents:
        prof[x] = tuple(draw(st.integers(1, len(c.choices))) for c in catalog)
        wts[x] = tuple(draw(st.integers(0, 3)) for _ in catalog)
    return Instance(tuple(agents), stated, unw, catalog, prof, wts)


@st.composite
def matchings(draw, agents: list[str]) -> Matching:
    order = draw(st.permutations(agents))
    partner = {}
    i = 0
    while i < len(order):
        if i + 1 < len(order) and draw(st.booleans()):
            x, y = order[i], order[i + 1]
            partner[x], partner[y] = y, x
            i += 2
        else:
            partner[order[i]] = order[i]
            i += 1
    return Matching(partner)


# ---------------------------------------------------------------- oracles

def naive_blocking(lists, m: Matching) -> set:
    """Blocking pairs straight from the definition, via list positions."""
    def pos(x, y):
        for i, tier in enumerate(lists[x].tiers):
            if y in tier:
                return i
        return None

    out = set()
    for x, y in itertools.combinations(sorted(lists), 2):
        if pos(x, y) is None or pos(y, x) is None:
            continue
        x_wants = m[x] == x or pos(x, y) < pos(x, m[x])
        y_wants = m[y] == y or pos(y, x) < pos(y, m[y])
        if x_wants and y_wants:
            out.add(pair(x, y))
    return out


def floyd_warshall(agents, edges) -> dict:
    inf = float("inf")
    d = {(x, y): (0 if x == y else inf) for x in agents for y in agents}
    for x, y in edges:
        d[x, y] = d[y, x] = 1
    for w in agents:
        for x in agents:
            for y in agents:
                if d[x, w] + d[w, y] < d[x, y]:
                    d[x, y] = d[x, w] + d[w, y]
    return d


def pairwise_infer_prefers(inst: Instance, x: str, y: str, z: str) -> bool:
    """y strictly above z in x's inferred order, by the level-wise definition."""
    px, w = inst.profiles[x], inst.weights[x]
    levels = sorted({u for u in w if u > 0}, reverse=True)
    py, pz = inst.profiles[y], inst.profiles[z]
    for u in levels:
        crit = [i for i, wi in enumerate(w) if wi == u]
        cy = sum(py[i] == px[i] for i in crit)
        cz = sum(pz[i] == px[i] for i in crit)
        if cy != cz:
            return cy > cz
        if cy < len(crit):
            return False
    return False


def pairwise_choice_acceptable(inst: Instance, x: str, y: str) -> bool:
    if x == y or y in inst.stated[x] or y in inst.unwanted[x]:
        return False
    if not inst.profiles or x not in inst.profiles or y not in inst.profiles:
        return False
    px, py, w = inst.profiles[x], inst.profiles[y], inst.weights[x]
    return any(w[i] > 0 and px[i] == py[i] for i in range(len(w)))
