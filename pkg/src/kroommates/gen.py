"""Random SRTI instances (Erdős–Rényi acceptability) and instance metrics.

Draw order, for reproducibility: with ``random.Random(seed)``, one uniform
draw per unordered pair (i, j), i < j, in lexicographic id order decides
the edge; then each agent in id order shuffles its sorted neighbour list.
Profiles use a separate ``random.Random(profile_seed)``: respondents are
sampled first, then for each respondent in id order its choices (one per
criterion) followed by its weights.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Mapping

from .core import Criterion, Instance, RankedList, RoommatesError, mutual_pairs

HMA = "HMA"
LMA = "LMA"
HMA_THRESHOLD = 0.75
DEFAULT_CHOICES = 3

# completeness degrees used for the high-m.a.p. benchmark family; all equal 3/n
HMA_EDGE_PROB = {40: 0.075, 60: 0.05, 80: 0.0375, 100: 0.03, 150: 0.02, 200: 0.015}
LMA_EDGE_PROB = 0.25
PRESET_TRUNCATE = 5


@dataclass(frozen=True)
class GenSpec:
    n: int
    p: float
    seed: int = 0
    truncate: int | None = None
    criteria_count: int = 0
    response_rate: float = 0.0
    profile_seed: int = 0
    choices_per_criterion: int = DEFAULT_CHOICES
    unwanted_pairs: int = 0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.truncate is not None and self.truncate < 1:
            raise ValueError("truncate must be >= 1")
        if self.criteria_count < 0:
            raise ValueError("criteria_count must be >= 0")
        if not 0.0 <= self.response_rate <= 1.0:
            raise ValueError("response_rate must lie in [0, 1]")
        if self.choices_per_criterion < 1:
            raise ValueError("choices_per_criterion must be >= 1")


def preset(name: str, n: int, seed: int = 0, **extra) -> GenSpec:
    """Named benchmark recipes: ``hma`` (c.d. about 3/n) and ``lma`` (c.d. 0.25).

    Both truncate lists to the first 5 entries.
    """
    name = name.lower()
    if name == "hma":
        p = HMA_EDGE_PROB.get(n, min(1.0, 3.0 / n))
    elif name == "lma":
        p = LMA_EDGE_PROB
    else:
        raise ValueError(f"unknown preset {name!r}")
    return GenSpec(n=n, p=p, seed=seed, truncate=PRESET_TRUNCATE, **extra)


def agent_ids(n: int) -> list[str]:
    w = len(str(n))
    return [f"a{i:0{w}d}" for i in range(1, n + 1)]


def gen_er_sri(spec: GenSpec) -> Instance:
    rng = random.Random(spec.seed)
    ids = agent_ids(spec.n)
    nbrs: dict[str, list[str]] = {a: [] for a in ids}
    for i, x in enumerate(ids):
        for y in ids[i + 1 :]:
            if rng.random() < spec.p:
                nbrs[x].append(y)
                nbrs[y].append(x)
    stated = {}
    for x in ids:
        order = sorted(nbrs[x])
        rng.shuffle(order)
        stated[x] = RankedList(tuple(frozenset([y]) for y in order))
    return Instance(tuple(ids), stated)


def truncate_lists(inst: Instance, length: int) -> Instance:
    if length < 1:
        raise ValueError("length must be >= 1")
    stated = {}
    for x, lst in inst.stated.items():
        if any(len(t) > 1 for t in lst.tiers):
            raise RoommatesError(f"cannot truncate list of {x}: it contains ties")
        stated[x] = RankedList(lst.tiers[:length])
    return replace(inst, stated=stated)


def populate_profiles(
    inst: Instance,
    criteria_count: int,
    response_rate: float,
    profile_seed: int,
    choices_per_criterion: int = DEFAULT_CHOICES,
) -> Instance:
    """Give a random ⌊rate·n⌋ subset of agents uniform random choices and
    weights in {0, …, criteria_count}."""
    if criteria_count == 0:
        return inst
    rng = random.Random(profile_seed)
    ids = sorted(inst.agents)
    respondents = sorted(rng.sample(ids, math.floor(response_rate * len(ids))))
    if not respondents:
        return inst
    catalog = tuple(
        Criterion(f"criterion{i + 1}", tuple(f"choice{j + 1}" for j in range(choices_per_criterion)))
        for i in range(criteria_count)
    )
    profiles, weights = {}, {}
    for x in respondents:
        profiles[x] = tuple(rng.randint(1, choices_per_criterion) for _ in range(criteria_count))
        weights[x] = tuple(rng.randint(0, criteria_count) for _ in range(criteria_count))
    return replace(inst, catalog=catalog, profiles=profiles, weights=weights)


def inject_unwanted(inst: Instance, count: int, seed: int) -> Instance:
    """Mark ``count`` random (agent, unlisted agent) pairs as unwanted."""
    rng = random.Random(seed)
    unwanted = {x: set(u) for x, u in inst.unwanted.items()}
    options = [
        (x, y)
        for x in inst.agents
        for y in inst.agents
        if x != y and y not in inst.stated[x] and y not in unwanted[x]
    ]
    for x, y in rng.sample(options, min(count, len(options))):
        unwanted[x].add(y)
    return replace(inst, unwanted={x: frozenset(u) for x, u in unwanted.items()})


def generate(spec: GenSpec) -> Instance:
    inst = gen_er_sri(spec)
    if spec.truncate is not None:
        inst = truncate_lists(inst, spec.truncate)
    inst = populate_profiles(
        inst, spec.criteria_count, spec.response_rate, spec.profile_seed, spec.choices_per_criterion
    )
    if spec.unwanted_pairs:
        inst = inject_unwanted(inst, spec.unwanted_pairs, spec.seed ^ 0x5EED)
    return inst


def batch_seed(seed: int, i: int) -> int:
    """Seed of the i-th instance of a batch."""
    return seed ^ i


def list_completeness(lists: Mapping[str, RankedList]) -> float:
    n = len(lists)
    if n < 2:
        raise ValueError("completeness needs at least 2 agents")
    return sum(len(l) for l in lists.values()) / (n * (n - 1))


def completeness_degree(inst: Instance) -> float:
    """Stated list entries divided by n(n-1)."""
    return list_completeness(inst.stated)


def mutual_acceptability_rate(lists: Mapping[str, RankedList]) -> float:
    """Reciprocated directed list entries over all directed list entries."""
    total = sum(len(l) for l in lists.values())
    if total == 0:
        raise ValueError("m.a.p. undefined: no list entries")
    return 2 * len(mutual_pairs(lists)) / total


def classify(map_rate: float) -> str:
    if not 0.0 <= map_rate <= 1.0:
        raise ValueError("rate must lie in [0, 1]")
    return HMA if map_rate >= HMA_THRESHOLD else LMA
