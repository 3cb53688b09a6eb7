"""Triple-matching precision/recall/F1 between two sentence annotations.

Both annotations are flattened into triples. Local identifiers (entity,
configuration and landmark-role ids) are then aligned by the one-to-one,
type-preserving mapping that maximizes the number of shared triples.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Mapping, Sequence

from .model import IMPLICIT, InvalidAnnotation, SentenceAnnotation, validate

__all__ = [
    "Triple",
    "ScoreReport",
    "CorpusReport",
    "EXHAUSTIVE_LIMIT",
    "to_triples",
    "identifiers",
    "matched_count",
    "score",
    "score_corpus",
]

EXHAUSTIVE_LIMIT = 8
_WS = re.compile(r"\s+")


@dataclass(frozen=True, order=True)
class Triple:
    subject: str
    relation: str
    object: str

    def __str__(self) -> str:
        return f"({self.subject}, {self.relation}, {self.object})"


def _norm(text: str) -> str:
    return _WS.sub(" ", text.strip()).lower()


def to_triples(annotation: SentenceAnnotation) -> frozenset[Triple]:
    """Flatten an annotation; raises InvalidAnnotation if it does not validate."""
    problems = validate(annotation)
    if problems:
        raise InvalidAnnotation(problems)
    out: set[Triple] = set()
    for e in annotation.entities:
        out.add(Triple(e.id, "instance", "entity"))
        out.add(Triple(e.id, "head", _norm(e.head)))
        for p in e.props:
            out.add(Triple(e.id, f"prop:{p.name}", _norm(p.span)))
    for c in annotation.configurations:
        if c.trajector is not None:
            out.add(Triple(c.id, "tr", c.trajector.entity))
        for lm in c.landmarks:
            out.add(Triple(c.id, "lm", lm.entity))
        for ind in c.indicators:
            out.add(Triple(c.id, "sp", _norm(ind.span)))
            for p in ind.props:
                out.add(Triple(c.id, f"prop:{p.name}", _norm(p.span)))
        for m in c.motions:
            out.add(Triple(c.id, "m", _norm(m.span)))
            for p in m.props:
                out.add(Triple(c.id, f"prop:{p.name}", _norm(p.span)))
        if c.path is not None:
            for seg in c.path.segments:
                out.add(Triple(c.id, f"path-part:{seg.part}", seg.landmark))
            for p in c.path.props:
                out.add(Triple(c.id, f"prop:{p.name}", _norm(p.span)))
        for f in c.fors:
            out.add(Triple(c.id, "for", f"{f.landmark}={f.value}"))
        if c.viewer is not None:
            out.add(Triple(c.id, "viewer", c.viewer))
        for qt in c.qts:
            out.add(Triple(c.id, "qt", f"{qt.g_type}={_norm(qt.f_meaning)}"))
    return frozenset(out)


def identifiers(annotation: SentenceAnnotation) -> dict[str, list[str]]:
    """Mappable ids grouped by kind: entity, configuration, landmark role."""
    return {
        "entity": [e.id for e in annotation.entities],
        "config": [c.id for c in annotation.configurations],
        "landmark": [lm.role_id for c in annotation.configurations for lm in c.landmarks],
    }


# Relations whose object is itself a local id (entity or landmark role).
_ID_OBJECT = re.compile(r"^(tr|lm|path-part:.*)$")


def _rename(t: Triple, m: Mapping[str, str]) -> Triple:
    subject = m.get(t.subject, "\0" + t.subject)
    obj = t.object
    if _ID_OBJECT.match(t.relation):
        if obj != IMPLICIT:
            obj = m.get(obj, "\0" + obj)
    elif t.relation == "for":
        lid, _, value = obj.partition("=")
        obj = f"{m.get(lid, chr(0) + lid)}={value}"
    return Triple(subject, t.relation, obj)


def matched_count(gold: frozenset[Triple], pred: Iterable[Triple], mapping: Mapping[str, str]) -> int:
    """Pred triples that land in gold once pred ids are renamed by ``mapping`` (pred id -> gold id)."""
    return sum(1 for t in pred if _rename(t, mapping) in gold)


@dataclass(frozen=True)
class ScoreReport:
    matched: int
    gold_total: int
    pred_total: int
    precision: float
    recall: float
    f1: float
    mapping: Mapping[str, str] = field(default_factory=dict)
    method: str = "exhaustive"
    sentence_id: str = ""

    def as_dict(self) -> dict:
        return {"sentence_id": self.sentence_id, "matched": self.matched, "gold_total": self.gold_total,
                "pred_total": self.pred_total, "precision": self.precision, "recall": self.recall,
                "f1": self.f1, "method": self.method, "mapping": dict(sorted(self.mapping.items()))}


def _prf(matched: int, gold_total: int, pred_total: int) -> tuple[float, float, float]:
    if gold_total == 0 and pred_total == 0:
        return 1.0, 1.0, 1.0
    p = matched / pred_total if pred_total else 0.0
    r = matched / gold_total if gold_total else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


# ---------------------------------------------------------------------------
# mapping search

def _injections(pred_ids: Sequence[str], gold_ids: Sequence[str]) -> Iterable[dict[str, str]]:
    """All maximal one-to-one pairings between two id lists."""
    if len(pred_ids) <= len(gold_ids):
        for image in permutations(gold_ids, len(pred_ids)):
            yield dict(zip(pred_ids, image))
    else:
        for chosen in permutations(pred_ids, len(gold_ids)):
            yield dict(zip(chosen, gold_ids))


def _exhaustive(gold: frozenset[Triple], pred: frozenset[Triple],
                gids: dict[str, list[str]], pids: dict[str, list[str]]) -> tuple[int, dict[str, str]]:
    # Mapping an id can never remove a match, so maximal injections suffice.
    kinds = list(gids)
    best, best_map = -1, {}
    for parts in product(*(list(_injections(pids[k], gids[k])) for k in kinds)):
        m = {k: v for part in parts for k, v in part.items()}
        n = matched_count(gold, pred, m)
        if n > best:
            best, best_map = n, m
    return best, best_map


def _local_signature(triples: Iterable[Triple], ident: str) -> set[tuple[str, str]]:
    return {(t.relation, t.object) for t in triples if t.subject == ident and not _ID_OBJECT.match(t.relation)} | \
           {(t.relation, t.object.partition("=")[2]) for t in triples if t.relation == "for"
            and t.object.partition("=")[0] == ident}


def _greedy(gold: frozenset[Triple], pred: frozenset[Triple],
            gids: dict[str, list[str]], pids: dict[str, list[str]]) -> dict[str, str]:
    """Pair ids with the most shared constant-valued triples first (head, span, value equality)."""
    m: dict[str, str] = {}
    for kind in gids:
        gs = {g: _local_signature(gold, g) for g in gids[kind]}
        ps = {p: _local_signature(pred, p) for p in pids[kind]}
        pairs = sorted(((len(gs[g] & ps[p]), i, j, p, g)
                        for i, p in enumerate(pids[kind]) for j, g in enumerate(gids[kind])),
                       key=lambda x: (-x[0], x[1], x[2]))
        used_g: set[str] = set()
        for _, _, _, p, g in pairs:
            if p not in m and g not in used_g:
                m[p] = g
                used_g.add(g)
    return m


def _random_mapping(rng: random.Random, gids: dict[str, list[str]], pids: dict[str, list[str]]) -> dict[str, str]:
    m: dict[str, str] = {}
    for kind in gids:
        gs = list(gids[kind])
        rng.shuffle(gs)
        m.update(zip(pids[kind], gs))
    return m


def _climb(gold: frozenset[Triple], pred: frozenset[Triple], m: dict[str, str],
           gids: dict[str, list[str]], pids: dict[str, list[str]]) -> tuple[int, dict[str, str]]:
    kind_of = {p: k for k, ids in pids.items() for p in ids}
    current = matched_count(gold, pred, m)
    improved = True
    while improved:
        improved = False
        best_gain, best_move = 0, None
        for p, kind in kind_of.items():
            used = {m[q] for q in pids[kind] if q in m}
            # reassign p to a free gold id
            for g in gids[kind]:
                if g in used:
                    continue
                trial = dict(m)
                trial[p] = g
                gain = matched_count(gold, pred, trial) - current
                if gain > best_gain:
                    best_gain, best_move = gain, trial
            # swap targets with another pred id of the same kind
            for q in pids[kind]:
                if q <= p or (p not in m and q not in m):
                    continue
                trial = dict(m)
                a, b = m.get(p), m.get(q)
                for key, val in ((p, b), (q, a)):
                    if val is None:
                        trial.pop(key, None)
                    else:
                        trial[key] = val
                gain = matched_count(gold, pred, trial) - current
                if gain > best_gain:
                    best_gain, best_move = gain, trial
        if best_move is not None:
            m, current, improved = best_move, current + best_gain, True
    return current, m


def _hill_climb(gold: frozenset[Triple], pred: frozenset[Triple],
                gids: dict[str, list[str]], pids: dict[str, list[str]],
                restarts: int, seed: int) -> tuple[int, dict[str, str]]:
    rng = random.Random(seed)
    best, best_map = _climb(gold, pred, _greedy(gold, pred, gids, pids), gids, pids)
    for _ in range(restarts):
        n, m = _climb(gold, pred, _random_mapping(rng, gids, pids), gids, pids)
        if n > best:
            best, best_map = n, m
    return best, best_map


def score(gold: SentenceAnnotation, pred: SentenceAnnotation, restarts: int = 4, seed: int = 0,
          method: str = "auto") -> ScoreReport:
    """Best-mapping triple F1; ``method`` is ``auto``, ``exhaustive`` or ``hill-climb``.

    ``auto`` searches exhaustively when each side has at most EXHAUSTIVE_LIMIT ids.
    """
    gt, pt = to_triples(gold), to_triples(pred)
    gids, pids = identifiers(gold), identifiers(pred)
    if method == "auto":
        small = all(sum(len(v) for v in ids.values()) <= EXHAUSTIVE_LIMIT for ids in (gids, pids))
        method = "exhaustive" if small else "hill-climb"
    if method == "exhaustive":
        matched, mapping = _exhaustive(gt, pt, gids, pids)
    elif method == "hill-climb":
        matched, mapping = _hill_climb(gt, pt, gids, pids, restarts, seed)
    else:
        raise ValueError(f"unknown search method {method!r}")
    matched = max(matched, 0)
    p, r, f = _prf(matched, len(gt), len(pt))
    return ScoreReport(matched, len(gt), len(pt), p, r, f, mapping, method, gold.sentence_id)


@dataclass(frozen=True)
class CorpusReport:
    sentences: tuple[ScoreReport, ...]
    micro: tuple[float, float, float]
    macro: tuple[float, float, float]
    average: str = "micro"

    @property
    def f1(self) -> float:
        return (self.micro if self.average == "micro" else self.macro)[2]

    def as_dict(self) -> dict:
        return {"average": self.average,
                "micro": dict(zip(("precision", "recall", "f1"), self.micro)),
                "macro": dict(zip(("precision", "recall", "f1"), self.macro)),
                "sentences": [s.as_dict() for s in self.sentences]}


def score_corpus(golds: Sequence[SentenceAnnotation], preds: Sequence[SentenceAnnotation],
                 restarts: int = 4, seed: int = 0, average: str = "micro") -> CorpusReport:
    """Pair sentences by id; a sentence missing on one side scores zero matches."""
    if average not in ("micro", "macro"):
        raise ValueError("average must be 'micro' or 'macro'")
    pred_by_id = {p.sentence_id: p for p in preds}
    gold_ids = {g.sentence_id for g in golds}
    reports = []
    for g in golds:
        p = pred_by_id.get(g.sentence_id)
        if p is None:
            n = len(to_triples(g))
            reports.append(ScoreReport(0, n, 0, *_prf(0, n, 0), {}, "missing", g.sentence_id))
        else:
            reports.append(score(g, p, restarts, seed))
    for p in preds:
        if p.sentence_id not in gold_ids:
            n = len(to_triples(p))
            reports.append(ScoreReport(0, 0, n, *_prf(0, 0, n), {}, "unmatched", p.sentence_id))
    matched = sum(r.matched for r in reports)
    micro = _prf(matched, sum(r.gold_total for r in reports), sum(r.pred_total for r in reports))
    if reports:
        macro = tuple(sum(getattr(r, k) for r in reports) / len(reports) for k in ("precision", "recall", "f1"))
    else:
        macro = (1.0, 1.0, 1.0)
    return CorpusReport(tuple(reports), micro, macro, average)
