"""Criteria-based inferred preference lists from habit profiles and weights."""
from __future__ import annotations

from itertools import groupby

from .core import Instance, RankedList, RoommatesError

# One level of a sorted profile: {(choice index, criterion name), ...}
Level = frozenset[tuple[int, str]]


class MissingProfileError(RoommatesError, LookupError):
    pass


def _profile(inst: Instance, x: str) -> tuple[int, ...] | None:
    if inst.profiles is None:
        return None
    return inst.profiles.get(x)


def _weights(inst: Instance, x: str) -> tuple[int, ...] | None:
    if inst.weights is None:
        return None
    return inst.weights.get(x)


def sorted_profile(x: str, inst: Instance) -> tuple[Level, ...]:
    """Group x's weighted choices into levels of equal positive weight,
    heaviest first; zero-weight criteria are dropped."""
    inst.require(x)
    prof, ws = _profile(inst, x), _weights(inst, x)
    if prof is None or ws is None or inst.catalog is None:
        raise MissingProfileError(f"agent {x} has no profile/weights")
    names = [c.name for c in inst.catalog]
    items = sorted(((w, prof[i], names[i]) for i, w in enumerate(ws) if w > 0), key=lambda t: -t[0])
    return tuple(frozenset((c, n) for _, c, n in grp) for _, grp in groupby(items, key=lambda t: t[0]))


def _weighted_indices(inst: Instance, x: str) -> list[int]:
    ws = _weights(inst, x) or ()
    return [i for i, w in enumerate(ws) if w > 0]


def choice_acceptable(x: str, y: str, inst: Instance) -> bool:
    """y is choice-acceptable to x: unlisted, not unwanted, and shares x's
    choice on some positively weighted criterion."""
    if y == x or y in inst.stated[x] or y in inst.unwanted[x]:
        return False
    px, py = _profile(inst, x), _profile(inst, y)
    if px is None or py is None:
        return False
    return any(px[i] == py[i] for i in _weighted_indices(inst, x))


def _level_key(levels: tuple[Level, ...], names: dict[str, int], py: tuple[int, ...]) -> tuple[int, ...]:
    # match counts per level, cut after the first level not matched in full:
    # past that point the two candidates can no longer be choice-equal
    key = []
    for level in levels:
        hits = sum(1 for c, n in level if py[names[n]] == c)
        key.append(hits)
        if hits < len(level):
            break
    return tuple(key)


def infer_list(x: str, inst: Instance) -> RankedList:
    """The criteria-based list over all agents choice-acceptable to x."""
    inst.require(x)
    if _profile(inst, x) is None or _weights(inst, x) is None or inst.catalog is None:
        return RankedList()
    levels = sorted_profile(x, inst)
    names = {c.name: i for i, c in enumerate(inst.catalog)}
    keyed: dict[tuple[int, ...], set[str]] = {}
    for y in inst.agents:
        if choice_acceptable(x, y, inst):
            keyed.setdefault(_level_key(levels, names, inst.profiles[y]), set()).add(y)
    return RankedList(tuple(frozenset(keyed[k]) for k in sorted(keyed, reverse=True)))


def extend_list(stated: RankedList, inferred: RankedList) -> RankedList:
    """Stated tiers followed by inferred tiers."""
    overlap = stated.agents() & inferred.agents()
    if overlap:
        raise RoommatesError(f"inferred list overlaps stated list: {sorted(overlap)}")
    return stated + inferred


def extended_lists(inst: Instance) -> dict[str, RankedList]:
    return {x: extend_list(inst.stated[x], infer_list(x, inst)) for x in inst.agents}
