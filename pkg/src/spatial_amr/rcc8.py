"""RCC8 relation algebra and algebraic closure over topological QT constraints.

Relation sets are 8-bit masks. The composition table is read from
``data/rcc8_composition.json``; the test suite checks it against a brute-force
grid-region model instead of trusting it.

Algebraic closure (path consistency) is sound for detecting inconsistency but
not complete: a network it accepts may still have no model.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .model import IMPLICIT, SentenceAnnotation

__all__ = [
    "Rcc8",
    "RelationSet",
    "UNIVERSAL",
    "EMPTY",
    "CompositionTable",
    "TableNotLoaded",
    "MalformedTable",
    "UnknownFMeaning",
    "QtConstraintNetwork",
    "ClosureResult",
    "Refinement",
    "load_table",
    "default_table",
    "converse",
    "compose",
    "network_from_annotation",
    "algebraic_closure",
]


class Rcc8(Enum):
    DC = 0
    EC = 1
    PO = 2
    TPP = 3
    NTPP = 4
    TPPi = 5
    NTPPi = 6
    EQ = 7

    @property
    def bit(self) -> int:
        return 1 << self.value


_CONVERSE = {
    Rcc8.DC: Rcc8.DC, Rcc8.EC: Rcc8.EC, Rcc8.PO: Rcc8.PO, Rcc8.EQ: Rcc8.EQ,
    Rcc8.TPP: Rcc8.TPPi, Rcc8.TPPi: Rcc8.TPP, Rcc8.NTPP: Rcc8.NTPPi, Rcc8.NTPPi: Rcc8.NTPP,
}


@dataclass(frozen=True, order=True)
class RelationSet:
    """A disjunction of base relations; empty means contradiction, all eight means no information."""

    bits: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.bits <= 0xFF:
            raise ValueError(f"relation mask out of range: {self.bits}")

    @classmethod
    def of(cls, *relations: Rcc8 | str) -> "RelationSet":
        bits = 0
        for r in relations:
            bits |= (r if isinstance(r, Rcc8) else Rcc8[r]).bit
        return cls(bits)

    def __iter__(self) -> Iterator[Rcc8]:
        return (r for r in Rcc8 if self.bits & r.bit)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __contains__(self, r: object) -> bool:
        return isinstance(r, Rcc8) and bool(self.bits & r.bit)

    def __and__(self, other: "RelationSet") -> "RelationSet":
        return RelationSet(self.bits & other.bits)

    def __or__(self, other: "RelationSet") -> "RelationSet":
        return RelationSet(self.bits | other.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def issubset(self, other: "RelationSet") -> bool:
        return self.bits & ~other.bits == 0

    @property
    def names(self) -> list[str]:
        return [r.name for r in self]

    def __str__(self) -> str:
        return "{" + ", ".join(self.names) + "}"


UNIVERSAL = RelationSet(0xFF)
EMPTY = RelationSet(0)
_EQ = RelationSet.of(Rcc8.EQ)


class TableNotLoaded(RuntimeError):
    pass


class MalformedTable(ValueError):
    pass


class UnknownFMeaning(ValueError):
    pass


class CompositionTable:
    def __init__(self, cells: Mapping[tuple[Rcc8, Rcc8], RelationSet]):
        missing = [(a, b) for a in Rcc8 for b in Rcc8 if (a, b) not in cells]
        if missing:
            raise MalformedTable(f"composition table lacks {len(missing)} cells, e.g. {missing[0][0].name}∘{missing[0][1].name}")
        empty = [(a, b) for (a, b), r in cells.items() if not r]
        if empty:
            raise MalformedTable(f"empty composition cell {empty[0][0].name}∘{empty[0][1].name}")
        self._cells = dict(cells)
        # pair-of-masks cache: closure composes the same sets over and over
        self._memo: dict[tuple[int, int], RelationSet] = {}

    def cell(self, a: Rcc8, b: Rcc8) -> RelationSet:
        return self._cells[(a, b)]

    def compose(self, r1: RelationSet, r2: RelationSet) -> RelationSet:
        key = (r1.bits, r2.bits)
        hit = self._memo.get(key)
        if hit is None:
            bits = 0
            for a in r1:
                for b in r2:
                    bits |= self._cells[(a, b)].bits
                    if bits == 0xFF:
                        break
            hit = self._memo[key] = RelationSet(bits)
        return hit


_TABLE_PATH = resources.files("spatial_amr") / "data" / "rcc8_composition.json"
_default: CompositionTable | None = None


def load_table(path: str | Path | None = None) -> CompositionTable:
    source = _TABLE_PATH if path is None else Path(path)
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise TableNotLoaded(f"composition table not found at {source}") from None
    except json.JSONDecodeError as err:
        raise MalformedTable(f"{source}: {err}") from None
    try:
        rows = data["composition"]
        cells = {(Rcc8[a], Rcc8[b]): RelationSet.of(*rel)
                 for a, row in rows.items() for b, rel in row.items()}
    except (KeyError, AttributeError, TypeError) as err:
        raise MalformedTable(f"{source}: bad relation entry {err}") from None
    return CompositionTable(cells)


def default_table() -> CompositionTable:
    global _default
    if _default is None:
        _default = load_table()
    return _default


def converse(r: RelationSet) -> RelationSet:
    return RelationSet.of(*(_CONVERSE[b] for b in r))


def compose(r1: RelationSet, r2: RelationSet, table: CompositionTable | None = None) -> RelationSet:
    return (table or default_table()).compose(r1, r2)


# ---------------------------------------------------------------------------
# networks

class QtConstraintNetwork:
    """Binary constraints between entity ids; unset pairs are universal, the diagonal is EQ."""

    def __init__(self, variables: Iterable[str] = ()):
        self.variables: list[str] = []
        self._c: dict[tuple[str, str], RelationSet] = {}
        self.notices: list[str] = []
        for v in variables:
            self.add_variable(v)

    def add_variable(self, v: str) -> None:
        if v not in self.variables:
            self.variables.append(v)

    def get(self, x: str, y: str) -> RelationSet:
        if x == y:
            return self._c.get((x, y), _EQ)
        return self._c.get((x, y), UNIVERSAL)

    def set(self, x: str, y: str, r: RelationSet) -> None:
        self.add_variable(x)
        self.add_variable(y)
        if x == y:
            r = r & _EQ
        self._c[(x, y)] = r
        self._c[(y, x)] = converse(r)

    def constrain(self, x: str, y: str, r: RelationSet) -> None:
        """Intersect with whatever is already known about (x, y)."""
        self.set(x, y, self.get(x, y) & r)

    @property
    def constraints(self) -> dict[tuple[str, str], RelationSet]:
        """Non-trivial constraints with x before y in variable order."""
        order = {v: i for i, v in enumerate(self.variables)}
        return {(x, y): r for (x, y), r in self._c.items()
                if order[x] < order[y] and r != UNIVERSAL}

    def copy(self) -> "QtConstraintNetwork":
        other = QtConstraintNetwork(self.variables)
        other._c = dict(self._c)
        other.notices = list(self.notices)
        return other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QtConstraintNetwork):
            return NotImplemented
        names = set(self.variables) | set(other.variables)
        return all(self.get(x, y) == other.get(x, y) for x in names for y in names)

    def to_dict(self) -> dict:
        return {"variables": list(self.variables),
                "constraints": [{"x": x, "y": y, "rel": r.names} for (x, y), r in self.constraints.items()]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "QtConstraintNetwork":
        net = cls(data.get("variables", []))
        for c in data.get("constraints", []):
            try:
                rel = RelationSet.of(*c["rel"])
            except KeyError as err:
                raise UnknownFMeaning(f"unknown relation {err} in constraint {c}") from None
            net.constrain(c["x"], c["y"], rel)
        return net


_EXPANSIONS = {
    "PP": RelationSet.of(Rcc8.TPP, Rcc8.NTPP),
    "PPI": RelationSet.of(Rcc8.TPPi, Rcc8.NTPPi),
    "DR": RelationSet.of(Rcc8.DC, Rcc8.EC),
}


def _f_meaning(name: str) -> RelationSet:
    key = name.strip()
    if key.upper() in _EXPANSIONS:
        return _EXPANSIONS[key.upper()]
    for r in Rcc8:
        if r.name.upper() == key.upper():
            return RelationSet.of(r)
    raise UnknownFMeaning(f"topological f-meaning {name!r} is not an RCC8 relation")


def network_from_annotation(annotation: SentenceAnnotation) -> QtConstraintNetwork:
    """One constraint per (trajector, landmark) of every configuration with a topology QT."""
    net = QtConstraintNetwork(e.id for e in annotation.entities)
    for config in annotation.configurations:
        for qt in config.qts:
            if qt.g_type != "topology":
                net.notices.append(f"{config.id}: {qt.g_type}={qt.f_meaning} is not topological; kept as-is")
                continue
            rel = _f_meaning(qt.f_meaning)
            if config.trajector is None or config.trajector.entity == IMPLICIT:
                net.notices.append(f"{config.id}: no explicit trajector for {qt.f_meaning}")
                continue
            for lm in config.landmarks:
                if lm.entity == IMPLICIT:
                    continue
                net.constrain(config.trajector.entity, lm.entity, rel)
    return net


@dataclass(frozen=True)
class Refinement:
    x: str
    y: str
    via: str
    before: RelationSet
    after: RelationSet

    def __str__(self) -> str:
        return f"{self.x} {self.y} via {self.via}: {self.before} -> {self.after}"


@dataclass(frozen=True)
class ClosureResult:
    network: QtConstraintNetwork
    consistent: bool
    trace: tuple[Refinement, ...]
    witness: tuple[str, str] | None = None

    def __iter__(self):
        # allows ``net, ok, trace = algebraic_closure(n)``
        return iter((self.network, self.consistent, self.trace))


def algebraic_closure(network: QtConstraintNetwork, table: CompositionTable | None = None) -> ClosureResult:
    """Refine R(x,z) with R(x,y)∘R(y,z) until nothing changes; the input is left untouched."""
    table = table or default_table()
    net = network.copy()
    variables = net.variables
    trace: list[Refinement] = []
    for x, y in combinations(variables, 2):
        if not net.get(x, y):
            return ClosureResult(net, False, (), (x, y))
    queue = deque(combinations(variables, 2))
    queued = {frozenset(p) for p in queue}

    def revise(x: str, y: str, z: str) -> bool:
        """Tighten R(x,z) through y; True if it changed."""
        before = net.get(x, z)
        after = before & table.compose(net.get(x, y), net.get(y, z))
        if after == before:
            return False
        net.set(x, z, after)
        trace.append(Refinement(x, z, y, before, after))
        return True

    while queue:
        i, j = queue.popleft()
        queued.discard(frozenset((i, j)))
        for k in variables:
            if k in (i, j):
                continue
            for a, b in ((i, k), (k, j)):
                # R(i,j) changed: re-derive R(i,k) via j and R(k,j) via i
                x, via, z = (i, j, k) if (a, b) == (i, k) else (k, i, j)
                if revise(x, via, z):
                    if not net.get(x, z):
                        return ClosureResult(net, False, tuple(trace), (x, z))
                    if frozenset((x, z)) not in queued:
                        queue.append((x, z))
                        queued.add(frozenset((x, z)))
    return ClosureResult(net, True, tuple(trace))
