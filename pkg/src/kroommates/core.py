"""Instance model, tiered preference lists and SRTI stability primitives."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

Pair = tuple[str, str]


class RoommatesError(Exception):
    """Base class for errors raised by this package."""


class UnknownAgentError(RoommatesError, KeyError):
    pass


class InvalidMatchingError(RoommatesError, ValueError):
    pass


class InvalidInstanceError(RoommatesError, ValueError):
    pass


def pair(x: str, y: str) -> Pair:
    """Canonical unordered pair (lexicographic)."""
    return (x, y) if x <= y else (y, x)


@dataclass(frozen=True)
class RankedList:
    """A total preorder over agents, stored as an ordered sequence of tiers.

    Agents in the same tier are tied; every listed agent is preferred to
    being single.
    """

    tiers: tuple[frozenset[str], ...] = ()

    def __post_init__(self) -> None:
        tiers = tuple(frozenset(t) for t in self.tiers)
        seen: set[str] = set()
        for t in tiers:
            if not t:
                raise ValueError("empty tier")
            if seen & t:
                raise ValueError(f"agents listed twice: {sorted(seen & t)}")
            seen |= t
        object.__setattr__(self, "tiers", tiers)

    @classmethod
    def of(cls, *entries: str | Iterable[str]) -> "RankedList":
        """Build from entries; a string is a strict entry, an iterable is a tie.

        >>> RankedList.of("b", {"a", "e"}).to_lists()
        [['b'], ['a', 'e']]
        """
        tiers = []
        for e in entries:
            tiers.append(frozenset([e]) if isinstance(e, str) else frozenset(e))
        return cls(tuple(tiers))

    @classmethod
    def from_lists(cls, tiers: Iterable[Iterable[str]]) -> "RankedList":
        return cls(tuple(frozenset(t) for t in tiers))

    def to_lists(self) -> list[list[str]]:
        return [sorted(t) for t in self.tiers]

    def agents(self) -> frozenset[str]:
        return frozenset().union(*self.tiers) if self.tiers else frozenset()

    def __len__(self) -> int:
        return sum(len(t) for t in self.tiers)

    def __iter__(self) -> Iterator[str]:
        for t in self.tiers:
            yield from sorted(t)

    def __contains__(self, agent: object) -> bool:
        return any(agent in t for t in self.tiers)

    def rank_map(self) -> dict[str, int]:
        return {a: i for i, t in enumerate(self.tiers) for a in t}

    def rank(self, agent: str) -> int | None:
        for i, t in enumerate(self.tiers):
            if agent in t:
                return i
        return None

    def prefers(self, y: str, z: str) -> bool:
        """True iff y sits in a strictly higher tier than z (z may be unlisted)."""
        ry = self.rank(y)
        if ry is None:
            return False
        rz = self.rank(z)
        return rz is None or ry < rz

    def __add__(self, other: "RankedList") -> "RankedList":
        return RankedList(self.tiers + other.tiers)

    def __str__(self) -> str:
        parts = [t_[0] if len(t_) == 1 else "{" + ",".join(t_) + "}" for t_ in self.to_lists()]
        return "<" + ", ".join(parts) + ">"


EMPTY = RankedList()


@dataclass(frozen=True)
class Criterion:
    name: str
    choices: tuple[str, ...]


@dataclass(frozen=True)
class Instance:
    """Agents with stated lists, unwanted sets and optional habit profiles.

    ``profiles`` maps agents to 1-based choice indices, one per criterion of
    ``catalog``; ``weights`` maps agents to non-negative importances.
    Agents missing from ``profiles`` are treated as non-respondents.
    """

    agents: tuple[str, ...]
    stated: Mapping[str, RankedList] = field(default_factory=dict)
    unwanted: Mapping[str, frozenset[str]] = field(default_factory=dict)
    catalog: tuple[Criterion, ...] | None = None
    profiles: Mapping[str, tuple[int, ...]] | None = None
    weights: Mapping[str, tuple[int, ...]] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", tuple(sorted(self.agents)))
        stated = {a: self.stated.get(a, EMPTY) for a in self.agents}
        stated.update({a: l for a, l in self.stated.items() if a not in stated})
        object.__setattr__(self, "stated", stated)
        unwanted = {a: frozenset(self.unwanted.get(a, ())) for a in self.agents}
        unwanted.update({a: frozenset(u) for a, u in self.unwanted.items() if a not in unwanted})
        object.__setattr__(self, "unwanted", unwanted)
        if self.profiles is not None:
            object.__setattr__(self, "profiles", {a: tuple(p) for a, p in self.profiles.items()})
        if self.weights is not None:
            object.__setattr__(self, "weights", {a: tuple(w) for a, w in self.weights.items()})

    def require(self, x: str) -> None:
        if x not in self.stated:
            raise UnknownAgentError(x)

    def forbidden_pairs(self) -> frozenset[Pair]:
        """A⁻: pairs where one side declared the other unwanted."""
        return frozenset(pair(x, y) for x, us in self.unwanted.items() for y in us if x != y)


def validate_instance(inst: Instance) -> list[str]:
    """Return every invariant violation found in ``inst`` (empty when valid)."""
    out: list[str] = []
    known = set(inst.agents)
    if len(known) != len(inst.agents):
        out.append("duplicate agent ids")
    for a in inst.agents:
        if not a:
            out.append("empty agent id")
        elif "\t" in a or "\n" in a:
            out.append(f"agent id contains tab/newline: {a!r}")
    for x in sorted(set(inst.stated) | set(inst.unwanted)):
        if x not in known:
            out.append(f"unknown agent {x}")
    for x, lst in sorted(inst.stated.items()):
        for y in sorted(lst.agents()):
            if y not in known:
                out.append(f"unknown agent {y}")
            if y == x:
                out.append(f"self-listed({x})")
        for y in sorted(lst.agents() & inst.unwanted.get(x, frozenset())):
            out.append(f"listed∧unwanted({x},{y})")
    for x, us in sorted(inst.unwanted.items()):
        for y in sorted(us):
            if y not in known:
                out.append(f"unknown agent {y}")
            if y == x:
                out.append(f"self-unwanted({x})")
    out.extend(_validate_profiles(inst))
    # keep first occurrence order, drop duplicate messages
    return list(dict.fromkeys(out))


def _validate_profiles(inst: Instance) -> list[str]:
    out = []
    has = inst.profiles is not None or inst.weights is not None
    if not has:
        return out
    if inst.catalog is None:
        return ["profiles or weights given without criteria"]
    names = [c.name for c in inst.catalog]
    if len(set(names)) != len(names):
        out.append("duplicate criterion names")
    for c in inst.catalog:
        if not c.choices:
            out.append(f"criterion {c.name} has no choices")
    m = len(inst.catalog)
    known = set(inst.agents)
    for x, prof in sorted((inst.profiles or {}).items()):
        if x not in known:
            out.append(f"unknown agent {x}")
        if len(prof) != m:
            out.append(f"profile length({x}): {len(prof)} != {m}")
            continue
        for c, j in zip(inst.catalog, prof):
            if not 1 <= j <= len(c.choices):
                out.append(f"profile choice out of range({x},{c.name}): {j}")
    for x, ws in sorted((inst.weights or {}).items()):
        if x not in known:
            out.append(f"unknown agent {x}")
        if len(ws) != m:
            out.append(f"weight length({x}): {len(ws)} != {m}")
        if any(w < 0 for w in ws):
            out.append(f"negative weight({x})")
    return out


def acceptable_set(lists: Mapping[str, RankedList] | Instance, x: str) -> frozenset[str]:
    """A_x: the union of the tiers of x's list."""
    if isinstance(lists, Instance):
        lists.require(x)
        lists = lists.stated
    if x not in lists:
        raise UnknownAgentError(x)
    return lists[x].agents()


def mutual_pairs(lists: Mapping[str, RankedList]) -> frozenset[Pair]:
    out = set()
    for x, lst in lists.items():
        for y in lst.agents():
            other = lists.get(y)
            if other is not None and x in other:
                out.add(pair(x, y))
    return frozenset(out)


class Matching:
    """Involutive partner map; an agent mapped to itself is single."""

    __slots__ = ("_partner",)

    def __init__(self, partner: Mapping[str, str]):
        partner = dict(partner)
        for x, y in partner.items():
            if partner.get(y) != x:
                raise InvalidMatchingError(f"not involutive at {x} -> {y}")
        self._partner = partner

    @classmethod
    def from_pairs(cls, agents: Iterable[str], pairs: Iterable[Iterable[str]]) -> "Matching":
        partner = {a: a for a in agents}
        for p in pairs:
            x, y = tuple(p)
            for a in (x, y):
                if a not in partner:
                    raise InvalidMatchingError(f"unknown agent {a}")
                if partner[a] != a:
                    raise InvalidMatchingError(f"agent {a} matched twice")
            if x == y:
                raise InvalidMatchingError(f"agent {x} paired with itself")
            partner[x], partner[y] = y, x
        return cls(partner)

    @property
    def partner(self) -> Mapping[str, str]:
        return self._partner

    def __getitem__(self, x: str) -> str:
        return self._partner[x]

    def agents(self) -> list[str]:
        return sorted(self._partner)

    def is_single(self, x: str) -> bool:
        return self._partner[x] == x

    def pairs(self) -> tuple[Pair, ...]:
        return tuple(sorted({pair(x, y) for x, y in self._partner.items() if x != y}))

    def singles(self) -> tuple[str, ...]:
        return tuple(sorted(x for x, y in self._partner.items() if x == y))

    def sort_key(self) -> tuple:
        return (self.pairs(), self.singles())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Matching) and self._partner == other._partner

    def __hash__(self) -> int:
        return hash(frozenset(self._partner.items()))

    def __repr__(self) -> str:
        parts = ["".join(p) if all(len(a) == 1 for a in p) else "-".join(p) for p in self.pairs()]
        return "Matching{" + ", ".join(list(parts) + list(self.singles())) + "}"


def _check_matching(lists: Mapping[str, RankedList], m: Matching) -> None:
    for x in lists:
        if x not in m.partner:
            raise InvalidMatchingError(f"matching does not cover agent {x}")


def blocking_pairs(lists: Mapping[str, RankedList], m: Matching) -> frozenset[Pair]:
    """All mutually acceptable pairs whose members both strictly prefer each
    other to their assignment in ``m`` (any listed agent beats being single)."""
    _check_matching(lists, m)
    out = set()
    for x, y in mutual_pairs(lists):
        mx, my = m[x], m[y]
        if mx == y:
            continue
        x_wants = mx == x or lists[x].prefers(y, mx)
        y_wants = my == y or lists[y].prefers(x, my)
        if x_wants and y_wants:
            out.add((x, y))
    return frozenset(out)


def is_stable(lists: Mapping[str, RankedList], m: Matching) -> bool:
    return not blocking_pairs(lists, m)
