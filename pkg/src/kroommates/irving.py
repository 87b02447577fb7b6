"""Irving's stable roommates algorithm for strict, possibly incomplete lists.

Used as a fast path for tied instances: a stable matching of any strict
refinement of tied lists is weakly stable for the tied lists, since a pair
that blocks under the ties strictly prefers each other under every
refinement.
"""
from __future__ import annotations

import random
from collections import deque
from typing import Mapping, Sequence

from .core import Matching, RankedList, mutual_pairs


class _Table:
    def __init__(self, prefs: Mapping[str, Sequence[str]]):
        self.prefs = {x: list(p) for x, p in prefs.items()}
        self.rank = {x: {y: i for i, y in enumerate(p)} for x, p in self.prefs.items()}
        self.alive = {x: [True] * len(p) for x, p in self.prefs.items()}
        self.size = {x: len(p) for x, p in self.prefs.items()}
        self.head = {x: 0 for x in self.prefs}
        self.tail = {x: len(p) - 1 for x, p in self.prefs.items()}

    def delete(self, x: str, y: str) -> None:
        for a, b in ((x, y), (y, x)):
            i = self.rank[a][b]
            if self.alive[a][i]:
                self.alive[a][i] = False
                self.size[a] -= 1

    def first(self, x: str) -> str | None:
        p, alive, i = self.prefs[x], self.alive[x], self.head[x]
        while i < len(p) and not alive[i]:
            i += 1
        self.head[x] = i
        return p[i] if i < len(p) else None

    def second(self, x: str) -> str | None:
        p, alive = self.prefs[x], self.alive[x]
        i = self.rank[x][self.first(x)] + 1
        while i < len(p) and not alive[i]:
            i += 1
        return p[i] if i < len(p) else None

    def last(self, x: str) -> str | None:
        alive, i = self.alive[x], self.tail[x]
        while i >= 0 and not alive[i]:
            i -= 1
        self.tail[x] = i
        return self.prefs[x][i] if i >= 0 else None

    def truncate_after(self, y: str, x: str) -> list[str]:
        """Delete every entry after x in y's list; return the agents dropped
        that were holding a proposal to y at the time."""
        p, alive = self.prefs[y], self.alive[y]
        dropped = [p[i] for i in range(self.rank[y][x] + 1, self.tail[y] + 1) if alive[i]]
        proposers = [z for z in dropped if self.first(z) == y]
        for z in dropped:
            self.delete(y, z)
        return proposers


def stable_roommates(prefs: Mapping[str, Sequence[str]]) -> Matching | None:
    """A stable matching for strict lists, or None when none exists.

    ``prefs`` must be consistent: y appears in x's list iff x appears in y's.
    """
    t = _Table(prefs)
    # phase 1: x proposes to its first choice y, which then drops everyone
    # it ranks below x; a dropped agent that was proposing to y moves on
    free = deque(sorted(prefs))
    while free:
        x = free.popleft()
        y = t.first(x)
        if y is not None:
            free.extend(t.truncate_after(y, x))
    matched = sorted(x for x in prefs if t.size[x] > 0)
    # phase 2: eliminate exposed rotations until every list is a singleton
    while True:
        start = next((x for x in matched if t.size[x] > 1), None)
        if start is None:
            break
        seq: list[str] = []
        seen: dict[str, int] = {}
        p: str | None = start
        while p not in seen:
            seen[p] = len(seq)
            seq.append(p)
            q = t.second(p)
            p = t.last(q) if q is not None else None
            if p is None:
                return None
        moves = [(t.second(x), x) for x in seq[seen[p] :]]
        for q, x in moves:
            t.truncate_after(q, x)
        if any(t.size[x] == 0 for x in matched):
            return None
    partner = {x: x for x in prefs}
    for x in matched:
        partner[x] = t.first(x)
    try:
        return Matching(partner)
    except ValueError:
        return None


def refine(lists: Mapping[str, RankedList], forbidden=frozenset(), rng: random.Random | None = None) -> dict[str, list[str]]:
    """Strict, mutually consistent lists: ties ordered by id (or shuffled by
    ``rng``), entries without reciprocation or forbidden dropped."""
    ok = mutual_pairs(lists) - set(forbidden)
    out = {}
    for x, lst in lists.items():
        row = []
        for tier in lst.tiers:
            members = sorted(y for y in tier if (min(x, y), max(x, y)) in ok)
            if rng is not None:
                rng.shuffle(members)
            row.extend(members)
        out[x] = row
    return out
