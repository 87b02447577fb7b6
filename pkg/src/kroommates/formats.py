"""JSON instance files, TSV matching files and atomic writes."""
from __future__ import annotations

import json
import os
import tempfile
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

from .core import (
    Criterion,
    Instance,
    InvalidInstanceError,
    InvalidMatchingError,
    Matching,
    RankedList,
)

INSTANCE_KEYS = {"agents", "preferences", "unwanted", "criteria", "profiles", "weights", "provenance"}
FIXTURES = ("table1", "table2", "table3", "table4")


def _str_list(v: Any, what: str) -> list[str]:
    if not isinstance(v, list) or not all(isinstance(a, str) for a in v):
        raise InvalidInstanceError(f"{what}: expected a list of strings")
    return v


def _int_list(v: Any, what: str) -> list[int]:
    if not isinstance(v, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in v):
        raise InvalidInstanceError(f"{what}: expected a list of integers")
    return v


def _obj(v: Any, what: str) -> dict:
    if not isinstance(v, dict):
        raise InvalidInstanceError(f"{what}: expected an object")
    return v


def instance_from_dict(doc: Mapping[str, Any]) -> Instance:
    doc = _obj(doc, "instance")
    unknown = set(doc) - INSTANCE_KEYS
    if unknown:
        raise InvalidInstanceError(f"unknown keys: {sorted(unknown)}")
    if "agents" not in doc:
        raise InvalidInstanceError("missing key: agents")
    agents = _str_list(doc["agents"], "agents")
    stated = {}
    for x, tiers in _obj(doc.get("preferences", {}), "preferences").items():
        if not isinstance(tiers, list):
            raise InvalidInstanceError(f"preferences[{x}]: expected a list of tiers")
        try:
            stated[x] = RankedList.from_lists(_str_list(t, f"preferences[{x}] tier") for t in tiers)
        except ValueError as e:
            if isinstance(e, InvalidInstanceError):
                raise
            raise InvalidInstanceError(f"preferences[{x}]: {e}") from None
    unwanted = {x: frozenset(_str_list(v, f"unwanted[{x}]")) for x, v in _obj(doc.get("unwanted", {}), "unwanted").items()}
    catalog = None
    if "criteria" in doc:
        if not isinstance(doc["criteria"], list):
            raise InvalidInstanceError("criteria: expected a list")
        catalog = []
        for c in doc["criteria"]:
            c = _obj(c, "criteria entry")
            if set(c) != {"name", "choices"} or not isinstance(c["name"], str):
                raise InvalidInstanceError("criteria entry: expected {name, choices}")
            catalog.append(Criterion(c["name"], tuple(_str_list(c["choices"], "choices"))))
        catalog = tuple(catalog)
    profiles = weights = None
    if "profiles" in doc:
        profiles = {x: tuple(_int_list(v, f"profiles[{x}]")) for x, v in _obj(doc["profiles"], "profiles").items()}
    if "weights" in doc:
        weights = {x: tuple(_int_list(v, f"weights[{x}]")) for x, v in _obj(doc["weights"], "weights").items()}
    return Instance(tuple(agents), stated, unwanted, catalog, profiles, weights)


def instance_to_dict(
    inst: Instance,
    provenance: Mapping[tuple[str, str], str] | None = None,
) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "agents": list(inst.agents),
        "preferences": {x: inst.stated[x].to_lists() for x in inst.agents},
    }
    unwanted = {x: sorted(u) for x, u in inst.unwanted.items() if u}
    if unwanted:
        doc["unwanted"] = dict(sorted(unwanted.items()))
    if inst.catalog is not None:
        doc["criteria"] = [{"name": c.name, "choices": list(c.choices)} for c in inst.catalog]
    if inst.profiles is not None:
        doc["profiles"] = {x: list(p) for x, p in sorted(inst.profiles.items())}
    if inst.weights is not None:
        doc["weights"] = {x: list(w) for x, w in sorted(inst.weights.items())}
    if provenance is not None:
        doc["provenance"] = {
            x: {y: provenance[(x, y)] for y in inst.stated[x] if (x, y) in provenance}
            for x in inst.agents
        }
    return doc


def loads_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInstanceError(f"malformed JSON: {e}") from None
    return instance_from_dict(doc)


def dumps_instance(inst: Instance, provenance=None) -> str:
    return json.dumps(instance_to_dict(inst, provenance), indent=2, ensure_ascii=False) + "\n"


def read_instance(path: str | os.PathLike) -> Instance:
    return loads_instance(Path(path).read_text(encoding="utf-8"))


def write_text_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_instance(path: str | os.PathLike, inst: Instance, provenance=None) -> None:
    write_text_atomic(path, dumps_instance(inst, provenance))


def fixture_text(name: str) -> str:
    return resources.files("kroommates").joinpath("fixtures").joinpath(f"{name}.json").read_text(encoding="utf-8")


def load_fixture(name: str) -> Instance:
    """One of the bundled worked examples: table1 .. table4."""
    if name not in FIXTURES:
        raise KeyError(name)
    return loads_instance(fixture_text(name))


def dumps_matching(m: Matching) -> str:
    return "".join(f"{x}\t{'-' if m.is_single(x) else m[x]}\n" for x in m.agents())


def dumps_matchings(ms: Iterable[Matching]) -> str:
    return "\n".join(dumps_matching(m) for m in ms)


def loads_matching(text: str, agents: Iterable[str] | None = None) -> Matching:
    partner: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.rstrip("\r").split("\t")
        if len(parts) != 2 or not parts[0]:
            raise InvalidMatchingError(f"line {lineno}: expected '<id>\\t<partner-id or ->'")
        x, y = parts
        if x in partner:
            raise InvalidMatchingError(f"line {lineno}: duplicate agent {x}")
        partner[x] = x if y == "-" else y
    if agents is not None:
        known = set(agents)
        for a in set(partner) | set(partner.values()):
            if a not in known:
                raise InvalidMatchingError(f"unknown agent {a}")
        missing = known - set(partner)
        if missing:
            raise InvalidMatchingError(f"no line for agents {sorted(missing)}")
    for x, y in partner.items():
        if y not in partner:
            raise InvalidMatchingError(f"partner {y} of {x} has no line")
    return Matching(partner)


def read_matching(path: str | os.PathLike, agents: Iterable[str] | None = None) -> Matching:
    return loads_matching(Path(path).read_text(encoding="utf-8"), agents)
