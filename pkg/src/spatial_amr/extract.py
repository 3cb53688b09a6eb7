"""Turn a spatial AMR graph into spatial entities and configurations.

The pipeline, in order:

1. entities are the concept nodes filling a trajector/landmark/path slot of a
   spatial trigger; ids ``e1, e2, ...`` follow the graph's pre-order;
2. each motion trigger yields one configuration with a path (source -> begin,
   destination -> end, path -> middle); a missing begin is made implicit;
3. every other trigger yields one configuration of its own;
4. a trigger reached through an inverse role from another trigger's landmark
   shifts focus: that landmark becomes the new trajector;
5. frames of reference come from an anchor binding, else the roleset default;
6. the viewer follows the anchor (addressee -> second, third party -> third);
7. qualitative types are the roleset defaults plus metric-derived ones;
8. candidates that fail validation are dropped with a warning.

Region predicates such as ``top-06`` or ``right-04`` that only wrap a landmark
(no trajector of their own) are folded into an ``area``/``part-of`` property of
the wrapped entity instead of producing a configuration.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from .model import (
    IMPLICIT,
    ForAssignment,
    Indicator,
    Path,
    PathSegment,
    Property,
    QtPair,
    RoleBinding,
    SentenceAnnotation,
    SpatialConfiguration,
    SpatialEntity,
    validate,
)
from .penman import AmrDocumentEntry, AmrGraph, is_inverse_role, invert_role
from .registry import FunctionTag, GeneralFrameEntry, Registry, RolesetEntry, RolesetKind

__all__ = [
    "Trigger",
    "ExtractionWarning",
    "ExtractionResult",
    "collect_entities",
    "detect_triggers",
    "extract",
    "extract_entry",
]

_ARG_ROLE = re.compile(r"^:ARG\d+$")
_OP_ROLE = re.compile(r"^:op(\d+)$")
_SENSE = re.compile(r"-\d+$")
_PART_RANK = {"begin": 0, "middle": 1, "whole": 2, "end": 3}
_TRAJECTOR_TAGS = (FunctionTag.SE1, FunctionTag.PRT)
_LANDMARK_TAGS = (FunctionTag.SE2, FunctionTag.WHL)
_GENERAL_ROLE_TAGS = {":anchor": FunctionTag.ANC, ":axis": FunctionTag.AXS}
_COORDINATE_FRAME = "cartesian-coordinate-entity"


@dataclass(frozen=True)
class Trigger:
    node: str
    entry: RolesetEntry | GeneralFrameEntry
    arg_bindings: Mapping[FunctionTag, str]
    under_landmark_of: str | None = None


@dataclass(frozen=True)
class ExtractionWarning:
    id: str
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} [{self.id}] {self.message}"


@dataclass(frozen=True)
class ExtractionResult:
    annotation: SentenceAnnotation
    warnings: tuple[ExtractionWarning, ...]
    triggers: tuple[Trigger, ...]
    # trigger node -> "configuration:<cid>" | "collapsed:<entity>" | "path:<cid>" | "entity:<eid>" | "warning"
    fates: Mapping[str, str]


def _plural(word: str) -> str:
    if word.endswith(("s", "x", "z", "ch", "sh")):
        return word + "es"
    if len(word) > 1 and word.endswith("y") and word[-2] not in "aeiou":
        return word[:-1] + "ies"
    return word + "s"


def _unquote(value: str) -> str:
    if len(value) >= 2 and value[0] == value[-1] == '"':
        return value[1:-1]
    return value


def _number(value: str | None) -> float | None:
    try:
        return float(_unquote(value)) if value is not None else None
    except ValueError:
        return None


class _View:
    """Predicate-to-argument view of a graph: every ``:R-of`` edge flipped to ``:R``."""

    def __init__(self, graph: AmrGraph):
        self.graph = graph
        self.order = {var: i for i, var in enumerate(graph.preorder())}
        self.out: dict[str, list[tuple[str, str, bool]]] = {v: [] for v in graph.variables}
        self.inverse_sources: dict[str, list[str]] = {v: [] for v in graph.variables}
        for e in graph.edges:
            if is_inverse_role(e.role) and not e.constant:
                # written "x :R-of t": t is the predicate, x was the node it hangs from
                self.out[e.target].append((invert_role(e.role), e.source, False))
                self.inverse_sources[e.target].append(e.source)
            else:
                self.out[e.source].append((e.role, e.target, e.constant))

    def concept(self, var: str) -> str:
        return self.graph.concept(var)

    def first(self, var: str, role: str) -> tuple[str, bool] | None:
        for r, target, constant in self.out[var]:
            if r == role:
                return target, constant
        return None

    def ops(self, var: str) -> list[str]:
        ops = [(int(m.group(1)), t) for r, t, c in self.out[var] if not c and (m := _OP_ROLE.match(r))]
        return [t for _, t in sorted(ops)]

    def word(self, target: str, constant: bool) -> str:
        return _unquote(target) if constant else _SENSE.sub("", self.concept(target))


# ---------------------------------------------------------------------------
# triggers

def _detect(view: _View, registry: Registry, warnings: list[ExtractionWarning]) -> list[Trigger]:
    found: list[tuple[str, RolesetEntry | GeneralFrameEntry, dict[FunctionTag, str]]] = []
    for var in sorted(view.order, key=view.order.get):
        concept = view.concept(var)
        if not registry.is_spatial_trigger(concept):
            continue
        entry = registry.resolve(concept)
        if isinstance(entry, GeneralFrameEntry):
            found.append((var, entry, {}))
            continue
        bindings: dict[FunctionTag, str] = {}
        has_path_role = False
        for role, target, constant in view.out[var]:
            if role in entry.hints.path_roles:
                has_path_role = True
            if _ARG_ROLE.match(role):
                if role not in entry.args:
                    warnings.append(ExtractionWarning(var, "UnknownArg",
                                                      f"{entry.name} has no argument {role} in the registry"))
                    continue
                tag = entry.args[role]
                # a constant is never a spatial entity; metric constants are read elsewhere
                if tag is not None and not constant:
                    bindings.setdefault(tag, target)
            elif role in _GENERAL_ROLE_TAGS and not constant:
                bindings.setdefault(_GENERAL_ROLE_TAGS[role], target)
        if not bindings and not has_path_role:
            warnings.append(ExtractionWarning(var, "EmptyTrigger", f"{entry.name} has no spatial arguments"))
            continue
        found.append((var, entry, bindings))

    trigger_nodes = {var for var, _, _ in found}
    landmark_sets = {}
    for var, entry, bindings in found:
        if isinstance(entry, GeneralFrameEntry):
            continue
        fillers = [bindings[t] for t in _LANDMARK_TAGS if t in bindings]
        fillers += [target for role, target, c in view.out[var] if not c and role in entry.hints.path_roles]
        landmark_sets[var] = set(_expand(view, fillers, trigger_nodes, registry))

    triggers = []
    for var, entry, bindings in found:
        parent = None
        for source in view.inverse_sources[var]:
            parent = next((p for p, lms in landmark_sets.items() if p != var and source in lms), None)
            if parent:
                break
        triggers.append(Trigger(var, entry, bindings, parent))
    return triggers


def _expand(view: _View, fillers: list[str], trigger_nodes: set[str], registry: Registry) -> list[str]:
    """Follow conjunctions and landmark-only region wrappers down to entity nodes."""
    out: list[str] = []
    for var in fillers:
        if not view.graph.has_variable(var):
            continue
        if view.ops(var) and view.concept(var) in ("and", "or"):
            out += _expand(view, view.ops(var), trigger_nodes, registry)
            continue
        out.append(var)
        if var in trigger_nodes:
            entry = registry.lookup(view.concept(var))
            if entry is not None and entry.hints.region_collapsible:
                whole = [t for role, t, c in view.out[var] if not c and entry.args.get(role) in _LANDMARK_TAGS]
                out += _expand(view, whole, trigger_nodes, registry)
    return out


def detect_triggers(graph: AmrGraph, registry: Registry) -> list[Trigger]:
    """One :class:`Trigger` per node whose concept is a spatial roleset or general frame."""
    return _detect(_View(graph), registry, [])


# ---------------------------------------------------------------------------
# assembly

@dataclass
class _Segment:
    landmarks: list[str]
    part: str
    span: str | None
    source: Trigger | None = None  # wrapper or consumed trigger that carries the landmark


@dataclass
class _Candidate:
    trigger: Trigger
    trajector: str | None
    landmarks: list[tuple[str, Trigger | None]] = field(default_factory=list)
    sp_props: list[Property] = field(default_factory=list)
    segments: list[_Segment] | None = None
    motion_props: list[Property] = field(default_factory=list)
    path_props: list[Property] = field(default_factory=list)
    extra_qts: list[tuple[str, str]] = field(default_factory=list)
    consumed: list[Trigger] = field(default_factory=list)


class _Extractor:
    def __init__(self, graph: AmrGraph, registry: Registry):
        self.view = _View(graph)
        self.registry = registry
        self.warnings: list[ExtractionWarning] = []
        self.triggers = _detect(self.view, registry, self.warnings)
        self.by_node = {t.node: t for t in self.triggers}
        self.fates: dict[str, str] = {}
        self.collapsed: dict[str, Trigger] = {}
        self.path_consumed: dict[str, Trigger] = {}
        self._plan()

    # -- slot bookkeeping -------------------------------------------------

    def _roleset(self, t: Trigger) -> RolesetEntry | None:
        return t.entry if isinstance(t.entry, RolesetEntry) else None

    def _slot_fillers(self, t: Trigger) -> list[str]:
        entry = self._roleset(t)
        if entry is None:
            return []
        tags = _TRAJECTOR_TAGS + _LANDMARK_TAGS
        fillers = [v for tag, v in t.arg_bindings.items() if tag in tags]
        fillers += [target for role, target, c in self.view.out[t.node] if not c and role in entry.hints.path_roles]
        return [v for v in fillers if self.view.graph.has_variable(v)]

    def _plan(self) -> None:
        filled_by: dict[str, Trigger] = {}
        for t in self.triggers:
            for var in self._slot_fillers(t):
                for leaf in self._conjuncts(var):
                    filled_by.setdefault(leaf, t)
        for t in self.triggers:
            entry = self._roleset(t)
            if entry is None or t.node not in filled_by:
                continue
            owns_trajector = any(tag in t.arg_bindings for tag in _TRAJECTOR_TAGS)
            if entry.hints.region_collapsible and not owns_trajector:
                self.collapsed[t.node] = t
            elif (filled_by[t.node].entry.kind is RolesetKind.MOTION and entry.kind is not RolesetKind.MOTION
                  and not owns_trajector and t.node in self._path_fillers(filled_by[t.node])):
                self.path_consumed[t.node] = t

    def _path_fillers(self, t: Trigger) -> set[str]:
        entry = self._roleset(t)
        out = set()
        for role, target, c in self.view.out[t.node]:
            if not c and role in entry.hints.path_roles:
                out.update(self._conjuncts(target))
        return out

    def _conjuncts(self, var: str) -> list[str]:
        if self.view.concept(var) in ("and", "or") and self.view.ops(var):
            return [leaf for op in self.view.ops(var) for leaf in self._conjuncts(op)]
        return [var]

    def resolve(self, var: str) -> list[tuple[str, Trigger | None]]:
        """Entity nodes behind a slot filler, each with the region wrapper it came through."""
        out = []
        for leaf in self._conjuncts(var):
            wrapper = self.collapsed.get(leaf) or self.path_consumed.get(leaf)
            if wrapper is None:
                if leaf not in self.by_node or isinstance(self.by_node[leaf].entry, GeneralFrameEntry):
                    out.append((leaf, None))
                continue
            inner = [v for tag, v in wrapper.arg_bindings.items() if tag in _LANDMARK_TAGS]
            for v in inner:
                out += [(e, w or wrapper) for e, w in self.resolve(v)]
        return out

    # -- entities ----------------------------------------------------------

    def entity_nodes(self) -> list[str]:
        nodes = set()
        for t in self.triggers:
            if t.node in self.collapsed or t.node in self.path_consumed:
                continue
            for var in self._slot_fillers(t):
                nodes.update(e for e, _ in self.resolve(var) if self.view.graph.has_variable(e))
        return sorted(nodes, key=self.view.order.get)

    def _value_span(self, target: str, constant: bool, role: str) -> str:
        view = self.view
        if constant:
            return _unquote(target)
        if role == ":name":
            return " ".join(_unquote(view.first(target, r)[0]) for r in
                            (f":op{i}" for i in range(1, 20)) if view.first(target, r))
        if role == ":ord":
            value = view.first(target, ":value")
            if value:
                return _unquote(value[0])
        return view.word(target, constant)

    def entity_props(self, var: str) -> tuple[str, list[Property]]:
        view, reg = self.view, self.registry
        props: list[Property] = []
        plural = False
        quantity = None
        for role, target, constant in view.out[var]:
            if role in reg.property_role_map:
                span = self._value_span(target, constant, role)
                if span:
                    props.append(Property(reg.property_role_map[role], span))
                if role == ":quant":
                    quantity = _number(target) if constant else None
            elif role == ":mod":
                word = view.word(target, constant)
                if word in reg.modifier_properties:
                    props.append(Property(reg.modifier_properties[word], word))
            elif role == ":pl" and constant and target == "+":
                plural = True
        if view.concept(var) == _COORDINATE_FRAME:
            for axis in (":x", ":y", ":z"):
                hit = view.first(var, axis)
                if hit:
                    props.append(Property(axis[1:], self._value_span(*hit, axis)))
        for wrapper in self.collapsed.values():
            inner = [v for tag, v in wrapper.arg_bindings.items() if tag in _LANDMARK_TAGS]
            if any(var == e for v in inner for e, _ in self.resolve(v)):
                props.append(Property(wrapper.entry.hints.region_property, wrapper.entry.lemma))
        order = {name: i for i, name in enumerate(reg.property_order)}
        props.sort(key=lambda p: order.get(p.name, len(order)))
        head = _SENSE.sub("", view.concept(var))
        if plural or (quantity is not None and quantity != 1):
            head = _plural(head)
        return head, props

    # -- indicator details -----------------------------------------------------

    def _metric(self, var: str, constant: bool) -> tuple[str, float | None]:
        if constant:
            return _unquote(var), _number(var)
        view = self.view
        quant = view.first(var, ":quant")
        unit = view.first(var, ":unit")
        noun = view.word(*unit) if unit else view.word(var, False)
        if quant is None:
            return noun, None
        amount = _number(quant[0])
        if noun.endswith("-quantity"):
            return _unquote(quant[0]), amount
        return f"{_unquote(quant[0])} {noun if amount == 1 else _plural(noun)}", amount

    def _role_props(self, node: str, roles: Mapping[str, str], nodes_for: tuple[str, ...] | None) -> list[Property]:
        props = []
        for role, target, constant in self.view.out[node]:
            if role not in roles:
                continue
            if not constant:
                if nodes_for is not None and role not in nodes_for:
                    continue
                if self.registry.is_spatial_trigger(self.view.concept(target)):
                    continue
            props.append(Property(roles[role], self.view.word(target, constant)))
        return props

    # -- candidates ----------------------------------------------------------

    def _trajector(self, t: Trigger) -> str | None:
        filler = next((t.arg_bindings[tag] for tag in _TRAJECTOR_TAGS if tag in t.arg_bindings), None)
        if filler is None:
            if t.under_landmark_of is not None:
                return next((s for s in self.view.inverse_sources[t.node]), None)
            return None
        if not self.view.graph.has_variable(filler):
            return None
        resolved = self.resolve(filler)
        if len(resolved) > 1:
            self.warnings.append(ExtractionWarning(t.node, "ComplexTrajector",
                                                   "several trajector entities; the first is used"))
        return resolved[0][0] if resolved else None

    def motion_candidate(self, t: Trigger) -> _Candidate:
        entry = t.entry
        cand = _Candidate(t, self._trajector(t))
        segments = []
        for role, target, constant in self.view.out[t.node]:
            spec = entry.hints.path_roles.get(role)
            if spec is None or constant:
                continue
            for leaf in self._conjuncts(target):
                consumed = self.path_consumed.get(leaf)
                if consumed is not None:
                    lms = [e for v in (consumed.arg_bindings[tag] for tag in _LANDMARK_TAGS
                                       if tag in consumed.arg_bindings) for e, _ in self.resolve(v)]
                    segments.append(_Segment(lms, spec.part, consumed.entry.hints.span, consumed))
                    cand.consumed.append(consumed)
                    cand.extra_qts += list(consumed.entry.hints.default_qt)
                    continue
                for entity, wrapper in self.resolve(leaf):
                    segments.append(_Segment([entity], spec.part, spec.span, wrapper))
        if not any(s.part == "begin" for s in segments):
            segments.insert(0, _Segment([IMPLICIT], "begin", None))
        segments.sort(key=lambda s: _PART_RANK[s.part])
        cand.segments = segments
        cand.landmarks = [(lm, s.source) for s in segments for lm in s.landmarks if lm != IMPLICIT]
        cand.motion_props = self._role_props(t.node, self.registry.motion_property_roles, None)
        cand.path_props = self._role_props(t.node, self.registry.path_property_roles, (":orientation",))
        return cand

    def static_candidate(self, t: Trigger) -> _Candidate:
        entry = t.entry
        cand = _Candidate(t, self._trajector(t))
        for tag in _LANDMARK_TAGS:
            if tag in t.arg_bindings and self.view.graph.has_variable(t.arg_bindings[tag]):
                cand.landmarks += self.resolve(t.arg_bindings[tag])
        for role in entry.hints.metric_args:
            hit = self.view.first(t.node, role)
            if hit is None:
                continue
            span, amount = self._metric(*hit)
            cand.sp_props.append(Property("metric", span))
            if entry.hints.gap_metric and amount:
                cand.extra_qts.append(("topology", "DC"))
        cand.sp_props += self._role_props(t.node, self.registry.indicator_property_roles, None)
        return cand

    # -- frames of reference and viewer ------------------------------------

    def _anchor_kind(self, anchor: str, landmark: str | None) -> str:
        if landmark is not None and anchor == landmark:
            return "landmark"
        if not self.view.graph.has_variable(anchor):
            return "other"
        concept = self.view.concept(anchor)
        for group in ("speaker", "addressee", "absolute"):
            if concept in self.registry.anchors.get(group, ()):
                return group
        return "third-party"

    def _anchors(self, t: Trigger | None) -> list[str]:
        if t is None:
            return []
        anchors = [t.arg_bindings[FunctionTag.ANC]] if FunctionTag.ANC in t.arg_bindings else []
        poss = self.view.first(t.node, ":poss")
        if poss and not poss[1]:
            anchors.append(poss[0])
        return anchors

    def frame_of_reference(self, cand: _Candidate, landmark: str, wrapper: Trigger | None) -> str:
        if self.view.graph.has_variable(landmark) and self.view.concept(landmark) == _COORDINATE_FRAME:
            return "absolute"
        for source in (wrapper, cand.trigger):
            for anchor in self._anchors(source):
                kind = self._anchor_kind(anchor, landmark)
                if kind == "landmark":
                    return "intrinsic"
                if kind == "absolute":
                    return "absolute"
                return "relative"
        return cand.trigger.entry.hints.default_for

    def viewer(self, cand: _Candidate, wrappers: list[Trigger | None]) -> str:
        kinds = set()
        landmark_nodes = {lm for lm, _ in cand.landmarks}
        for source in [cand.trigger, *wrappers]:
            for anchor in self._anchors(source):
                kind = self._anchor_kind(anchor, None)
                if anchor in landmark_nodes:
                    kind = "landmark"
                kinds.add(kind)
        if "addressee" in kinds:
            return "second-person"
        if "third-party" in kinds:
            return "third-person"
        return "first-person"

    # -- driver ------------------------------------------------------------

    def run(self, sentence_id: str, text: str) -> ExtractionResult:
        candidates: list[_Candidate] = []
        for t in self.triggers:
            if t.node in self.collapsed:
                continue
            if t.node in self.path_consumed:
                continue
            if isinstance(t.entry, GeneralFrameEntry):
                continue
            if t.entry.kind is RolesetKind.MOTION:
                candidates.append(self.motion_candidate(t))
            else:
                candidates.append(self.static_candidate(t))

        entity_vars = self.entity_nodes()
        eid = {var: f"e{i}" for i, var in enumerate(entity_vars, 1)}
        entities = []
        for var in entity_vars:
            head, props = self.entity_props(var)
            entities.append(SpatialEntity(eid[var], head, tuple(props)))
        for t in self.triggers:
            if isinstance(t.entry, GeneralFrameEntry):
                if t.entry.name == _COORDINATE_FRAME and t.node in eid:
                    self.fates[t.node] = f"entity:{eid[t.node]}"
                else:
                    self.warnings.append(ExtractionWarning(t.node, "UnhandledGeneralFrame",
                                                           f"{t.entry.name} yields no configuration"))
                    self.fates[t.node] = "warning"
        for node, wrapper in self.collapsed.items():
            inner = [e for tag, v in wrapper.arg_bindings.items() if tag in _LANDMARK_TAGS
                     for e, _ in self.resolve(v)]
            self.fates[node] = "collapsed:" + ",".join(eid.get(v, v) for v in inner)

        counters = {"c": 0, "t": 0, "l": 0, "s": 0, "m": 0}

        def fresh(prefix: str) -> str:
            counters[prefix] += 1
            return f"{prefix}{counters[prefix]}"

        configurations = []
        for cand in candidates:
            t = cand.trigger
            if cand.trajector is None:
                self.warnings.append(ExtractionWarning(t.node, "DroppedConfiguration",
                                                       f"{t.entry.name} has no trajector"))
                self.fates[t.node] = "warning"
                for c in cand.consumed:
                    self.fates[c.node] = "warning"
                continue
            config = self._assemble(cand, fresh, eid)
            problems = validate(SentenceAnnotation(sentence_id, text, tuple(entities), (config,)))
            if problems:
                self.warnings.append(ExtractionWarning(
                    t.node, "DroppedConfiguration",
                    f"{t.entry.name} candidate is invalid: " + "; ".join(str(p) for p in problems)))
                self.fates[t.node] = "warning"
                continue
            configurations.append(config)
            self.fates[t.node] = f"configuration:{config.id}"
            for c in cand.consumed:
                self.fates[c.node] = f"path:{config.id}"

        annotation = SentenceAnnotation(sentence_id, text, tuple(entities), tuple(configurations))
        return ExtractionResult(annotation, tuple(self.warnings), tuple(self.triggers), dict(self.fates))

    def _assemble(self, cand: _Candidate, fresh, eid: Mapping[str, str]) -> SpatialConfiguration:
        t = cand.trigger
        entry = t.entry
        cid = fresh("c")
        trajector = RoleBinding(fresh("t"), eid.get(cand.trajector, IMPLICIT))
        landmark_ids: dict[tuple[str, int], str] = {}
        landmarks, fors, wrappers = [], [], []
        indicators: list[Indicator] = []
        path = None
        motions: tuple[Indicator, ...] = ()

        if cand.segments is not None:
            segments = []
            for seg in cand.segments:
                if seg.landmarks == [IMPLICIT]:
                    segments.append(PathSegment(IMPLICIT, None, seg.part))
                    continue
                sid = fresh("s")
                indicators.append(Indicator(sid, seg.span))
                for lm in seg.landmarks:
                    lid = fresh("l")
                    landmarks.append(RoleBinding(lid, eid.get(lm, IMPLICIT)))
                    fors.append(ForAssignment(lid, self.frame_of_reference(cand, lm, seg.source)))
                    wrappers.append(seg.source)
                    segments.append(PathSegment(lid, sid, seg.part))
            path = Path(tuple(segments), tuple(cand.path_props))
            motions = (Indicator(fresh("m"), entry.hints.span, tuple(cand.motion_props)),)
        else:
            for n, (lm, wrapper) in enumerate(cand.landmarks):
                lid = fresh("l")
                landmark_ids[(lm, n)] = lid
                landmarks.append(RoleBinding(lid, eid.get(lm, IMPLICIT)))
                fors.append(ForAssignment(lid, self.frame_of_reference(cand, lm, wrapper)))
                wrappers.append(wrapper)
            indicators.append(Indicator(fresh("s"), entry.hints.span, tuple(cand.sp_props)))

        qts: list[tuple[str, str]] = list(entry.hints.default_qt) + cand.extra_qts
        if any(p.name == "metric" for i in indicators for p in i.props):
            qts.insert(len(entry.hints.default_qt), ("distance", "quantitative"))
        unique_qts = tuple(QtPair(g, f) for g, f in dict.fromkeys(qts))

        return SpatialConfiguration(
            id=cid,
            trajector=trajector,
            landmarks=tuple(landmarks),
            indicators=tuple(indicators),
            motions=motions,
            path=path,
            fors=tuple(fors),
            viewer=self.viewer(cand, wrappers),
            qts=unique_qts,
        )


def collect_entities(graph: AmrGraph, registry: Registry) -> list[SpatialEntity]:
    """Spatial entities of a graph, numbered in pre-order, with harvested properties."""
    ex = _Extractor(graph, registry)
    entities = []
    for i, var in enumerate(ex.entity_nodes(), 1):
        head, props = ex.entity_props(var)
        entities.append(SpatialEntity(f"e{i}", head, tuple(props)))
    return entities


def extract(graph: AmrGraph, registry: Registry, sentence_id: str = "", text: str = "") -> ExtractionResult:
    """Run the full pipeline; raises ``ValueError`` only when the graph itself is malformed."""
    return _Extractor(graph, registry).run(sentence_id, text)


def extract_entry(entry: AmrDocumentEntry, registry: Registry) -> ExtractionResult:
    return extract(entry.graph, registry, entry.id or "", entry.metadata.get("snt", ""))
