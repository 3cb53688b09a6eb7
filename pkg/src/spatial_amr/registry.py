"""Spatial roleset inventory: rolesets, aliases, function tags and extraction hints.

The inventory is data, not code. The bundled seed lives in ``data/registry.json``;
additional files may declare ``"extends": "seed"`` to be layered on top of it.
See ``docs/formats.md`` for the schema.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping

__all__ = [
    "FunctionTag",
    "RolesetKind",
    "PathRole",
    "ExtractionHints",
    "RolesetEntry",
    "FrameArg",
    "GeneralFrameEntry",
    "Registry",
    "RegistryError",
    "DuplicateName",
    "DuplicateAlias",
    "UnknownFunctionTag",
    "ConflictingTags",
    "MalformedFile",
    "load_registry",
    "seed_registry",
    "SEED_PATH",
]

G_TYPES = ("direction", "distance", "topology")
FOR_VALUES = ("intrinsic", "relative", "absolute")
PATH_PARTS = ("begin", "middle", "whole", "end")

_POS_SUFFIX = re.compile(r"-[prvjn]$")
_SENSE_SUFFIX = re.compile(r"-\d+$")


class FunctionTag(str, Enum):
    SE1 = "SE1"
    SE2 = "SE2"
    ANC = "ANC"
    AXS = "AXS"
    PRT = "PRT"
    WHL = "WHL"
    ANG = "ANG"
    ORT = "ORT"
    SCL = "SCL"


class RolesetKind(str, Enum):
    STATIC = "static-relation"
    MOTION = "motion"
    INTERNAL = "internal-relation"
    GENERAL = "general-frame"


class RegistryError(ValueError):
    @property
    def code(self) -> str:
        return type(self).__name__


class DuplicateName(RegistryError):
    pass


class DuplicateAlias(RegistryError):
    pass


class UnknownFunctionTag(RegistryError):
    pass


class ConflictingTags(RegistryError):
    pass


class MalformedFile(RegistryError):
    pass


@dataclass(frozen=True)
class PathRole:
    part: str
    span: str


@dataclass(frozen=True)
class ExtractionHints:
    span: str
    default_qt: tuple[tuple[str, str], ...] = ()
    default_for: str = "relative"
    region_collapsible: bool = False
    region_property: str = "area"
    property_role_map: Mapping[str, str] = field(default_factory=lambda: MappingProxyType({}))
    metric_args: tuple[str, ...] = ()
    gap_metric: bool = False
    path_roles: Mapping[str, PathRole] = field(default_factory=lambda: MappingProxyType({}))


@dataclass(frozen=True)
class RolesetEntry:
    name: str
    gloss: str
    aliases: tuple[str, ...]
    args: Mapping[str, FunctionTag | None]
    kind: RolesetKind
    hints: ExtractionHints

    @property
    def lemma(self) -> str:
        return _SENSE_SUFFIX.sub("", self.name)

    def roles_with(self, *tags: FunctionTag) -> list[str]:
        return [role for role, tag in self.args.items() if tag in tags]


@dataclass(frozen=True)
class FrameArg:
    role: str
    name: str
    kind: str | None = None


@dataclass(frozen=True)
class GeneralFrameEntry:
    name: str
    gloss: str
    args: tuple[FrameArg, ...]

    @property
    def kind(self) -> RolesetKind:
        return RolesetKind.GENERAL


@dataclass(frozen=True)
class Registry:
    rolesets: Mapping[str, RolesetEntry]
    general_frames: Mapping[str, GeneralFrameEntry]
    general_roles: Mapping[str, str]
    property_role_map: Mapping[str, str]
    modifier_properties: Mapping[str, str]
    property_order: tuple[str, ...]
    indicator_property_roles: Mapping[str, str]
    motion_property_roles: Mapping[str, str]
    path_property_roles: Mapping[str, str]
    anchors: Mapping[str, frozenset[str]]
    source: tuple[str, ...] = ()
    _aliases: Mapping[str, str] = field(default=MappingProxyType({}), repr=False, compare=False)
    _bare_aliases: Mapping[str, str] = field(default=MappingProxyType({}), repr=False, compare=False)

    def lookup(self, concept: str) -> RolesetEntry | None:
        """Exact roleset name, else alias (with or without its part-of-speech suffix)."""
        entry = self.rolesets.get(concept)
        if entry is not None:
            return entry
        return self.lookup_alias(concept)

    def lookup_alias(self, alias: str) -> RolesetEntry | None:
        name = self._aliases.get(alias) or self._bare_aliases.get(alias)
        return self.rolesets[name] if name else None

    def frame(self, concept: str) -> GeneralFrameEntry | None:
        return self.general_frames.get(concept)

    def resolve(self, concept: str) -> RolesetEntry | GeneralFrameEntry | None:
        return self.lookup(concept) or self.frame(concept)

    def is_spatial_trigger(self, concept: str) -> bool:
        entry = self.lookup(concept)
        if entry is not None:
            return entry.kind in (RolesetKind.STATIC, RolesetKind.MOTION, RolesetKind.INTERNAL)
        return concept in self.general_frames

    def surface_forms(self) -> dict[tuple[str, ...], str]:
        """Token sequences that signal each roleset or frame in raw text, e.g. ('in', 'line') -> 'align-02'."""
        forms: dict[tuple[str, ...], str] = {}
        for entry in self.rolesets.values():
            for text in (entry.lemma, *(_POS_SUFFIX.sub("", a) for a in entry.aliases)):
                forms.setdefault(tuple(text.lower().split("-")), entry.name)
        return forms


# ---------------------------------------------------------------------------
# loading

SEED_PATH = resources.files("spatial_amr") / "data" / "registry.json"


def _require(obj: Mapping[str, Any], key: str, kind: type, where: str) -> Any:
    if key not in obj:
        raise MalformedFile(f"{where}: missing key {key!r}")
    value = obj[key]
    if not isinstance(value, kind):
        raise MalformedFile(f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _qt_pairs(raw: Any, where: str) -> tuple[tuple[str, str], ...]:
    if not isinstance(raw, list):
        raise MalformedFile(f"{where}: default_qt must be a list")
    pairs = []
    for pair in raw:
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(p, str) for p in pair)):
            raise MalformedFile(f"{where}: default_qt entries are [g-type, f-meaning] pairs")
        if pair[0] not in G_TYPES:
            raise MalformedFile(f"{where}: g-type {pair[0]!r} not in {G_TYPES}")
        pairs.append((pair[0], pair[1]))
    return tuple(pairs)


def _hints(raw: Mapping[str, Any], name: str, default_props: Mapping[str, str]) -> ExtractionHints:
    where = f"rolesets[{name}].hints"
    default_for = raw.get("default_for", "relative")
    if default_for not in FOR_VALUES:
        raise MalformedFile(f"{where}: default_for {default_for!r} not in {FOR_VALUES}")
    path_roles = {}
    for role, spec in raw.get("path_roles", {}).items():
        if not isinstance(spec, dict) or spec.get("part") not in PATH_PARTS or not spec.get("span"):
            raise MalformedFile(f"{where}.path_roles[{role}]: need part in {PATH_PARTS} and a span")
        path_roles[role] = PathRole(spec["part"], spec["span"])
    props = dict(default_props)
    props.update(raw.get("property_role_map", {}))
    return ExtractionHints(
        span=raw.get("span") or _SENSE_SUFFIX.sub("", name),
        default_qt=_qt_pairs(raw.get("default_qt", []), where),
        default_for=default_for,
        region_collapsible=bool(raw.get("region_collapsible", False)),
        region_property=raw.get("region_property", "area"),
        property_role_map=MappingProxyType(props),
        metric_args=tuple(raw.get("metric_args", ())),
        gap_metric=bool(raw.get("gap_metric", False)),
        path_roles=MappingProxyType(path_roles),
    )


def _roleset(raw: Any, default_props: Mapping[str, str]) -> RolesetEntry:
    if not isinstance(raw, dict):
        raise MalformedFile("rolesets entries must be objects")
    name = _require(raw, "name", str, "rolesets[?]")
    where = f"rolesets[{name}]"
    args: dict[str, FunctionTag | None] = {}
    for role, tag in _require(raw, "args", dict, where).items():
        if not role.startswith(":"):
            raise MalformedFile(f"{where}: argument role {role!r} must start with ':'")
        if tag is None:
            args[role] = None
            continue
        try:
            args[role] = FunctionTag(tag)
        except ValueError:
            raise UnknownFunctionTag(f"{where}: {role} carries unknown function tag {tag!r}") from None
    tags = set(args.values())
    if tags & {FunctionTag.SE1, FunctionTag.SE2} and tags & {FunctionTag.PRT, FunctionTag.WHL}:
        raise ConflictingTags(f"{where}: SE1/SE2 may not co-occur with PRT/WHL")
    try:
        kind = RolesetKind(_require(raw, "kind", str, where))
    except ValueError:
        raise MalformedFile(f"{where}: unknown kind {raw['kind']!r}") from None
    if kind is RolesetKind.GENERAL:
        raise MalformedFile(f"{where}: general frames belong under 'general_frames'")
    internal = bool(tags & {FunctionTag.PRT, FunctionTag.WHL})
    if internal != (kind is RolesetKind.INTERNAL):
        raise MalformedFile(f"{where}: kind internal-relation is required exactly when PRT/WHL tags occur")
    aliases = _require(raw, "aliases", list, where) if "aliases" in raw else []
    return RolesetEntry(
        name=name,
        gloss=raw.get("gloss", ""),
        aliases=tuple(aliases),
        args=MappingProxyType(args),
        kind=kind,
        hints=_hints(raw.get("hints", {}), name, default_props),
    )


def _frame(raw: Any) -> GeneralFrameEntry:
    if not isinstance(raw, dict):
        raise MalformedFile("general_frames entries must be objects")
    name = _require(raw, "name", str, "general_frames[?]")
    args = tuple(FrameArg(a["role"], a.get("name", ""), a.get("kind"))
                 for a in _require(raw, "args", list, f"general_frames[{name}]"))
    if name == "cartesian-framework-91":
        kinds = [a.kind for a in args]
        if kinds.count("axis") > 3 or kinds.count("origin") > 1 or kinds.count("housing") > 1:
            raise MalformedFile("cartesian-framework-91 takes at most 3 axes, one origin and one housing entity")
    return GeneralFrameEntry(name, raw.get("gloss", ""), args)


def _read(path: Path | Any) -> dict[str, Any]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise MalformedFile(f"{path}: not valid JSON ({err})") from None
    if not isinstance(data, dict):
        raise MalformedFile(f"{path}: top level must be an object")
    for key in ("rolesets", "general_frames"):
        if key in data and not isinstance(data[key], list):
            raise MalformedFile(f"{path}: {key!r} must be an array")
    return data


def _build(layers: list[tuple[str, dict[str, Any]]]) -> Registry:
    rolesets: dict[str, RolesetEntry] = {}
    frames: dict[str, GeneralFrameEntry] = {}
    aliases: dict[str, str] = {}
    merged: dict[str, Any] = {
        "general_roles": {}, "property_role_map": {}, "modifier_properties": {},
        "indicator_property_roles": {}, "motion_property_roles": {}, "path_property_roles": {},
        "anchors": {}, "property_order": [],
    }
    for _, data in layers:
        for key in ("property_role_map", "modifier_properties", "indicator_property_roles",
                    "motion_property_roles", "path_property_roles"):
            value = data.get(key, {})
            if not isinstance(value, dict):
                raise MalformedFile(f"{key!r} must be an object")
            merged[key].update(value)
        for role in data.get("general_roles", []):
            merged["general_roles"][role["role"]] = role.get("gloss", "")
        for group, words in data.get("anchors", {}).items():
            merged["anchors"].setdefault(group, set()).update(words)
        for name in data.get("property_order", []):
            if name not in merged["property_order"]:
                merged["property_order"].append(name)

        for raw in data.get("rolesets", []):
            entry = _roleset(raw, merged["property_role_map"])
            if entry.name in rolesets or entry.name in frames:
                raise DuplicateName(f"roleset {entry.name!r} defined twice")
            for alias in entry.aliases:
                if alias in aliases:
                    raise DuplicateAlias(f"alias {alias!r} of {entry.name!r} already belongs to {aliases[alias]!r}")
                aliases[alias] = entry.name
            rolesets[entry.name] = entry
        for raw in data.get("general_frames", []):
            frame = _frame(raw)
            if frame.name in frames or frame.name in rolesets:
                raise DuplicateName(f"general frame {frame.name!r} defined twice")
            frames[frame.name] = frame

    bare: dict[str, set[str]] = {}
    for alias, name in aliases.items():
        bare.setdefault(_POS_SUFFIX.sub("", alias), set()).add(name)
    bare_unique = {k: next(iter(v)) for k, v in bare.items() if len(v) == 1}

    return Registry(
        rolesets=MappingProxyType(rolesets),
        general_frames=MappingProxyType(frames),
        general_roles=MappingProxyType(merged["general_roles"]),
        property_role_map=MappingProxyType(merged["property_role_map"]),
        modifier_properties=MappingProxyType(merged["modifier_properties"]),
        property_order=tuple(merged["property_order"]),
        indicator_property_roles=MappingProxyType(merged["indicator_property_roles"]),
        motion_property_roles=MappingProxyType(merged["motion_property_roles"]),
        path_property_roles=MappingProxyType(merged["path_property_roles"]),
        anchors=MappingProxyType({k: frozenset(v) for k, v in merged["anchors"].items()}),
        source=tuple(src for src, _ in layers),
        _aliases=MappingProxyType(aliases),
        _bare_aliases=MappingProxyType(bare_unique),
    )


def load_registry(path: str | Path | None = None) -> Registry:
    """Load a registry file; ``None`` loads the bundled seed.

    A file whose top level carries ``"extends": "seed"`` is layered on top of
    the seed; name and alias clashes with the seed are errors.
    """
    if path is None:
        return seed_registry()
    path = Path(path)
    data = _read(path)
    layers = [(str(path), data)]
    if data.get("extends") == "seed":
        layers.insert(0, ("seed", _read(SEED_PATH)))
    elif "extends" in data:
        raise MalformedFile(f"{path}: unsupported extends value {data['extends']!r}")
    return _build(layers)


@lru_cache(maxsize=1)
def seed_registry() -> Registry:
    return _build([("seed", _read(SEED_PATH))])
