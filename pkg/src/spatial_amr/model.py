"""Spatial configuration schema: entities, configurations and their checks.

A sentence is a set of spatial entities plus a set of configurations; each
configuration binds one trajector to landmarks (or a path), spatial/motion
indicators, per-landmark frames of reference, a viewer and one or more
qualitative types.

The value types are deliberately permissive so that malformed annotations can
be represented and reported: :func:`validate` is the single place where the
invariants are enforced.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from typing import Any, Iterable

import jsonschema

__all__ = [
    "IMPLICIT",
    "FOR_VALUES",
    "PATH_PARTS",
    "G_TYPES",
    "VIEWERS",
    "Property",
    "SpatialEntity",
    "RoleBinding",
    "Indicator",
    "PathSegment",
    "Path",
    "ForAssignment",
    "QtPair",
    "SpatialConfiguration",
    "SentenceAnnotation",
    "Violation",
    "SchemaError",
    "InvalidAnnotation",
    "normalize_g_type",
    "validate",
    "render_table",
    "serialize_annotation",
    "deserialize_annotation",
    "dump_annotations",
    "load_annotations",
    "annotation_to_dict",
    "annotation_from_dict",
    "align_offsets",
]

IMPLICIT = "IMPLICIT"
FOR_VALUES = ("intrinsic", "relative", "absolute")
PATH_PARTS = ("begin", "middle", "whole", "end")
G_TYPES = ("direction", "distance", "topology")
VIEWERS = ("first-person", "second-person", "third-person")

_G_TYPE_SPELLINGS = {
    "direction": "direction", "directional": "direction",
    "distance": "distance", "distal": "distance",
    "topology": "topology", "topological": "topology",
}
_G_TYPE_LABELS = {"direction": "directional", "distance": "distal", "topology": "topological"}


def normalize_g_type(g_type: str) -> str:
    """Map table spellings (``distal``, ``topological``...) onto direction/distance/topology."""
    return _G_TYPE_SPELLINGS.get(g_type.strip().lower(), g_type)


@dataclass(frozen=True)
class Property:
    name: str
    span: str
    offset: tuple[int, int] | None = None


@dataclass(frozen=True)
class SpatialEntity:
    id: str
    head: str
    props: tuple[Property, ...] = ()
    implicit: bool = False


@dataclass(frozen=True)
class RoleBinding:
    role_id: str
    entity: str


@dataclass(frozen=True)
class Indicator:
    id: str
    span: str
    props: tuple[Property, ...] = ()


@dataclass(frozen=True)
class PathSegment:
    landmark: str
    indicator: str | None
    part: str


@dataclass(frozen=True)
class Path:
    segments: tuple[PathSegment, ...]
    props: tuple[Property, ...] = ()


@dataclass(frozen=True)
class ForAssignment:
    landmark: str
    value: str


@dataclass(frozen=True)
class QtPair:
    g_type: str
    f_meaning: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "g_type", normalize_g_type(self.g_type))


@dataclass(frozen=True)
class SpatialConfiguration:
    id: str
    trajector: RoleBinding | None
    landmarks: tuple[RoleBinding, ...] = ()
    indicators: tuple[Indicator, ...] = ()
    # more than one motion indicator is representable so that it can be reported
    motions: tuple[Indicator, ...] = ()
    path: Path | None = None
    fors: tuple[ForAssignment, ...] = ()
    viewer: str | None = "first-person"
    qts: tuple[QtPair, ...] = ()

    @property
    def motion(self) -> Indicator | None:
        return self.motions[0] if self.motions else None


@dataclass(frozen=True)
class SentenceAnnotation:
    sentence_id: str
    text: str = ""
    entities: tuple[SpatialEntity, ...] = ()
    configurations: tuple[SpatialConfiguration, ...] = ()

    def entity(self, entity_id: str) -> SpatialEntity | None:
        return next((e for e in self.entities if e.id == entity_id), None)


@dataclass(frozen=True)
class Violation:
    code: str
    ref: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} [{self.ref}] {self.message}"


class SchemaError(ValueError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class InvalidAnnotation(ValueError):
    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


# ---------------------------------------------------------------------------
# validation

def _check_props(props: Iterable[Property], owner: str, out: list[Violation]) -> None:
    for p in props:
        if not p.name or not p.span:
            out.append(Violation("PROPERTY_EMPTY", owner, f"property {p.name!r}={p.span!r} needs a name and a span"))


def _check_configuration(c: SpatialConfiguration, entity_ids: set[str], out: list[Violation]) -> None:
    role_ids = Counter()

    def bind(binding: RoleBinding, prefix: str, what: str) -> None:
        role_ids[binding.role_id] += 1
        if not (binding.role_id.startswith(prefix) and len(binding.role_id) > 1):
            out.append(Violation("ROLE_ID_PREFIX", binding.role_id, f"{what} id must start with {prefix!r}"))
        if binding.entity != IMPLICIT and binding.entity not in entity_ids:
            out.append(Violation("ENTITY_UNDECLARED", binding.role_id,
                                 f"{what} {binding.role_id} refers to undeclared entity {binding.entity!r}"))

    def indicator(ind: Indicator, prefix: str, what: str) -> None:
        role_ids[ind.id] += 1
        if not (ind.id.startswith(prefix) and len(ind.id) > 1):
            out.append(Violation("ROLE_ID_PREFIX", ind.id, f"{what} id must start with {prefix!r}"))
        if not ind.span:
            out.append(Violation("INDICATOR_SPAN_EMPTY", ind.id, f"{what} has no span"))
        _check_props(ind.props, ind.id, out)

    if c.trajector is None:
        out.append(Violation("TRAJECTOR_MISSING", c.id, "a configuration needs exactly one trajector"))
    else:
        bind(c.trajector, "t", "trajector")
    for lm in c.landmarks:
        bind(lm, "l", "landmark")
    for ind in c.indicators:
        indicator(ind, "s", "spatial indicator")
    for m in c.motions:
        indicator(m, "m", "motion indicator")
    if len(c.motions) > 1:
        out.append(Violation("MOTION_CARDINALITY", c.id,
                             f"{len(c.motions)} motion indicators; at most one is allowed"))
    for role_id, n in role_ids.items():
        if n > 1:
            out.append(Violation("ROLE_ID_DUPLICATE", role_id, f"role id used {n} times in {c.id}"))

    landmark_ids = {lm.role_id for lm in c.landmarks}
    indicator_ids = {ind.id for ind in c.indicators}
    if c.path is None:
        if len(c.indicators) != 1:
            out.append(Violation("ONE_SP_PER_CONFIG", c.id,
                                 f"{len(c.indicators)} spatial indicators without a path; exactly one expected"))
    else:
        if not c.path.segments:
            out.append(Violation("PATH_EMPTY", c.id, "path has no segments"))
        parts = Counter(s.part for s in c.path.segments)
        for seg in c.path.segments:
            if seg.part not in PATH_PARTS:
                out.append(Violation("PATH_PART_INVALID", c.id, f"path part {seg.part!r} not in {PATH_PARTS}"))
            if seg.landmark != IMPLICIT and seg.landmark not in landmark_ids:
                out.append(Violation("PATH_LANDMARK_UNDECLARED", c.id,
                                     f"path segment landmark {seg.landmark!r} is not declared"))
            if seg.indicator is None:
                if seg.landmark != IMPLICIT:
                    out.append(Violation("PATH_INDICATOR_MISSING", c.id,
                                         f"segment on {seg.landmark} has no spatial indicator"))
            elif seg.indicator not in indicator_ids:
                out.append(Violation("PATH_INDICATOR_UNDECLARED", c.id,
                                     f"path segment indicator {seg.indicator!r} is not declared"))
        for part in ("begin", "end"):
            if parts[part] > 1:
                out.append(Violation("PATH_PART_CARDINALITY", c.id, f"{parts[part]} {part} segments; at most one"))
        _check_props(c.path.props, c.id, out)

    for f in c.fors:
        if f.landmark not in landmark_ids:
            out.append(Violation("FOR_LANDMARK_UNDECLARED", c.id,
                                 f"frame of reference names undeclared landmark {f.landmark!r}"))
        if f.value not in FOR_VALUES:
            out.append(Violation("FOR_VALUE_INVALID", c.id, f"FoR value {f.value!r} not in {FOR_VALUES}"))

    if c.viewer is None:
        out.append(Violation("VIEWER_MISSING", c.id, "configuration has no viewer"))
    elif c.viewer not in VIEWERS:
        out.append(Violation("VIEWER_INVALID", c.id, f"viewer {c.viewer!r} not in {VIEWERS}"))

    if not c.qts:
        out.append(Violation("QT_EMPTY", c.id, "at least one qualitative type is required"))
    for qt in c.qts:
        if qt.g_type not in G_TYPES:
            out.append(Violation("QT_GTYPE_INVALID", c.id, f"g-type {qt.g_type!r} not in {G_TYPES}"))
        if not qt.f_meaning:
            out.append(Violation("QT_FMEANING_EMPTY", c.id, "qualitative type has no formal meaning"))


def validate(annotation: SentenceAnnotation) -> list[Violation]:
    """Every broken invariant as a :class:`Violation`; empty means valid."""
    out: list[Violation] = []
    ids = Counter(e.id for e in annotation.entities)
    for eid, n in ids.items():
        if n > 1:
            out.append(Violation("ENTITY_ID_DUPLICATE", eid, f"entity id used {n} times"))
    for e in annotation.entities:
        if not e.implicit and not e.head:
            out.append(Violation("ENTITY_HEAD_EMPTY", e.id, "non-implicit entity needs a head"))
        _check_props(e.props, e.id, out)
    config_ids = Counter(c.id for c in annotation.configurations)
    for cid, n in config_ids.items():
        if n > 1:
            out.append(Violation("CONFIG_ID_DUPLICATE", cid, f"configuration id used {n} times"))
    entity_ids = set(ids)
    for c in annotation.configurations:
        _check_configuration(c, entity_ids, out)
    return out


# ---------------------------------------------------------------------------
# rendering

def _props(props: Iterable[Property]) -> str:
    return "{" + ", ".join(f"{p.name}={p.span}" for p in props) + "}"


def _indicator_cell(ind: Indicator) -> str:
    if ind.props:
        return f"⟨{ind.id}, {ind.span}, {_props(ind.props)}⟩"
    return f"⟨{ind.id}, {ind.span}⟩"


def _path_cell(path: Path) -> str:
    parts = []
    for seg in path.segments:
        if seg.landmark == IMPLICIT and seg.indicator is None:
            parts.append(f"⟨implicit, {seg.part}⟩")
        else:
            landmark = "implicit" if seg.landmark == IMPLICIT else seg.landmark
            parts.append(f"⟨{landmark}, {seg.indicator or 'NULL'}, {seg.part}⟩")
    if path.props:
        parts.append(_props(path.props))
    return ", ".join(parts)


def _binding(b: RoleBinding | None) -> str:
    if b is None:
        return "NULL"
    return f"⟨{b.role_id}, {'implicit' if b.entity == IMPLICIT else b.entity}⟩"


def _grid(rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    rule = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
    lines = [rule]
    for n, row in enumerate(rows):
        lines.append("| " + " | ".join(cell.ljust(w) for cell, w in zip(row, widths)) + " |")
        if n == 0:
            lines.append(rule)
    lines.append(rule)
    return lines


def render_table(annotation: SentenceAnnotation) -> str:
    """Plain-text entity table plus one column per configuration; NULL marks empty slots."""
    violations = validate(annotation)
    if violations:
        raise InvalidAnnotation(violations)
    lines = [f"{annotation.sentence_id}: {annotation.text}", "Spatial Entities"]
    entity_rows = [["id", "head", "properties {name=span}"]]
    for e in annotation.entities:
        head = f"{e.head} (implicit)" if e.implicit else e.head
        entity_rows.append([e.id, head, _props(e.props)])
    lines += _grid(entity_rows)
    if annotation.configurations:
        header = [""] + [f"Configuration {i} [{c.id}]" for i, c in enumerate(annotation.configurations, 1)]
        rows = {name: [name] for name in ("tr", "lm", "sp", "m", "path", "FoR", "v", "QT")}
        for c in annotation.configurations:
            rows["tr"].append(_binding(c.trajector))
            rows["lm"].append(", ".join(_binding(lm) for lm in c.landmarks) or "NULL")
            rows["sp"].append(", ".join(_indicator_cell(i) for i in c.indicators) or "NULL")
            rows["m"].append(_indicator_cell(c.motion) if c.motion else "NULL")
            rows["path"].append(_path_cell(c.path) if c.path else "NULL")
            rows["FoR"].append(", ".join(f"⟨{f.landmark}, {f.value}⟩" for f in c.fors) or "NULL")
            rows["v"].append(c.viewer or "NULL")
            rows["QT"].append(", ".join(f"⟨{_G_TYPE_LABELS.get(q.g_type, q.g_type)}, {q.f_meaning}⟩"
                                        for q in c.qts))
        lines.append("Configurations")
        lines += _grid([header, *rows.values()])
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# serialization

@lru_cache(maxsize=1)
def _validator() -> jsonschema.protocols.Validator:
    schema = json.loads((resources.files("spatial_amr") / "data" / "annotation.schema.json").read_text("utf-8"))
    return jsonschema.Draft202012Validator(schema)


def _json_path(parts: Iterable[Any]) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _prop_dict(p: Property) -> dict[str, Any]:
    d: dict[str, Any] = {"name": p.name, "span": p.span}
    if p.offset is not None:
        d["offset"] = list(p.offset)
    return d


def _indicator_dict(i: Indicator) -> dict[str, Any]:
    return {"id": i.id, "span": i.span, "props": [_prop_dict(p) for p in i.props]}


def annotation_to_dict(a: SentenceAnnotation) -> dict[str, Any]:
    configs = []
    for c in a.configurations:
        if not c.motions:
            motion: Any = None
        elif len(c.motions) == 1:
            motion = _indicator_dict(c.motions[0])
        else:
            motion = [_indicator_dict(m) for m in c.motions]
        configs.append({
            "id": c.id,
            "trajector": None if c.trajector is None else {"id": c.trajector.role_id, "entity": c.trajector.entity},
            "landmarks": [{"id": lm.role_id, "entity": lm.entity} for lm in c.landmarks],
            "indicators": [_indicator_dict(i) for i in c.indicators],
            "motion": motion,
            "path": None if c.path is None else {
                "segments": [{"landmark": s.landmark, "indicator": s.indicator, "part": s.part}
                             for s in c.path.segments],
                "props": [_prop_dict(p) for p in c.path.props],
            },
            "fors": [{"landmark": f.landmark, "value": f.value} for f in c.fors],
            "viewer": c.viewer,
            "qts": [{"g_type": q.g_type, "f_meaning": q.f_meaning} for q in c.qts],
        })
    return {
        "sentence_id": a.sentence_id,
        "text": a.text,
        "entities": [{"id": e.id, "head": e.head, "props": [_prop_dict(p) for p in e.props],
                      "implicit": e.implicit} for e in a.entities],
        "configurations": configs,
    }


def _props_from(raw: list[dict[str, Any]] | None) -> tuple[Property, ...]:
    return tuple(Property(p["name"], p["span"], tuple(p["offset"]) if "offset" in p else None)
                 for p in raw or ())


def _indicator_from(raw: dict[str, Any]) -> Indicator:
    return Indicator(raw["id"], raw["span"], _props_from(raw.get("props")))


def annotation_from_dict(data: Any, where: str = "$") -> SentenceAnnotation:
    errors = sorted(_validator().iter_errors(data), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        path = _json_path(err.absolute_path)
        raise SchemaError(err.message, where + path[1:])
    configs = []
    for c in data["configurations"]:
        raw_motion = c.get("motion")
        if raw_motion is None:
            motions: tuple[Indicator, ...] = ()
        elif isinstance(raw_motion, list):
            motions = tuple(_indicator_from(m) for m in raw_motion)
        else:
            motions = (_indicator_from(raw_motion),)
        raw_path = c.get("path")
        path = None if raw_path is None else Path(
            tuple(PathSegment(s["landmark"], s.get("indicator"), s["part"]) for s in raw_path["segments"]),
            _props_from(raw_path.get("props")),
        )
        tr = c["trajector"]
        configs.append(SpatialConfiguration(
            id=c["id"],
            trajector=None if tr is None else RoleBinding(tr["id"], tr["entity"]),
            landmarks=tuple(RoleBinding(lm["id"], lm["entity"]) for lm in c["landmarks"]),
            indicators=tuple(_indicator_from(i) for i in c["indicators"]),
            motions=motions,
            path=path,
            fors=tuple(ForAssignment(f["landmark"], f["value"]) for f in c.get("fors", ())),
            viewer=c["viewer"],
            qts=tuple(QtPair(q["g_type"], q["f_meaning"]) for q in c["qts"]),
        ))
    return SentenceAnnotation(
        sentence_id=data["sentence_id"],
        text=data["text"],
        entities=tuple(SpatialEntity(e["id"], e["head"], _props_from(e.get("props")), e.get("implicit", False))
                       for e in data["entities"]),
        configurations=tuple(configs),
    )


def serialize_annotation(annotation: SentenceAnnotation) -> str:
    return json.dumps(annotation_to_dict(annotation), ensure_ascii=False, indent=2)


def deserialize_annotation(text: str) -> SentenceAnnotation:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"not valid JSON: {err.msg}") from None
    return annotation_from_dict(data)


def dump_annotations(annotations: Iterable[SentenceAnnotation]) -> str:
    """A JSON array of annotations, one object per sentence."""
    return json.dumps([annotation_to_dict(a) for a in annotations], ensure_ascii=False, indent=2) + "\n"


def load_annotations(text: str) -> list[SentenceAnnotation]:
    """Read an annotation file: a JSON array of sentence objects, or a single object."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"not valid JSON: {err.msg}") from None
    if isinstance(data, list):
        return [annotation_from_dict(item, f"$[{i}]") for i, item in enumerate(data)]
    return [annotation_from_dict(data)]


def align_offsets(annotation: SentenceAnnotation) -> SentenceAnnotation:
    """Attach character offsets to entity properties whose span occurs exactly once in the text."""
    text = annotation.text

    def locate(p: Property) -> Property:
        if p.offset is not None or not p.span or text.count(p.span) != 1:
            return p
        start = text.index(p.span)
        return replace(p, offset=(start, start + len(p.span)))

    entities = tuple(replace(e, props=tuple(locate(p) for p in e.props)) for e in annotation.entities)
    return replace(annotation, entities=entities)
