import random
from dataclasses import replace
from itertools import product

import pytest

from spatial_amr.model import InvalidAnnotation, Property, RoleBinding, SentenceAnnotation
from spatial_amr.scorer import Triple, identifiers, matched_count, score, score_corpus, to_triples

from .conftest import ALL_CASES, load_gold
from .degrade import degraded_pairs, id_count

PAIRS = degraded_pairs()


def T(s, r, o):
    return Triple(s, r, o)


def test_nlvr_triples_by_hand():
    assert to_triples(load_gold("nlvr")) == {
        T("e1", "instance", "entity"), T("e1", "head", "square"), T("e1", "prop:col", "blue"),
        T("e2", "instance", "entity"), T("e2", "head", "box"), T("e2", "prop:part-of", "bottom"),
        T("c1", "tr", "e1"), T("c1", "lm", "e2"), T("c1", "sp", "touching"), T("c1", "prop:degree", "closely"),
        T("c1", "for", "l1=intrinsic"), T("c1", "viewer", "first-person"), T("c1", "qt", "topology=ec"),  # spans and meanings are case-folded
    }


def test_tower_path_triples():
    triples = to_triples(load_gold("tower"))
    assert {t for t in triples if t.relation.startswith("path-part")} == {
        T("c1", "path-part:begin", "l1"), T("c1", "path-part:end", "l2")}
    assert T("c1", "prop:orientation", "diagonally") in triples
    assert T("c1", "m", "move") in triples
    assert T("c2", "prop:metric", "5 spaces") in triples


def test_invalid_annotation_is_rejected():
    gold = load_gold("nlvr")
    bad = replace(gold, configurations=(replace(gold.configurations[0], viewer=None),))
    with pytest.raises(InvalidAnnotation):
        to_triples(bad)


def test_empty_against_empty():
    empty = SentenceAnnotation("x")
    report = score(empty, empty)
    assert (report.matched, report.precision, report.recall, report.f1) == (0, 1.0, 1.0, 1.0)


def test_empty_prediction():
    report = score(load_gold("nlvr"), SentenceAnnotation("nlvr"))
    assert (report.matched, report.gold_total, report.pred_total, report.f1) == (0, 13, 0, 0.0)


@pytest.mark.parametrize("name", ALL_CASES)
def test_self_score(name):
    gold = load_gold(name)
    report = score(gold, gold)
    assert report.f1 == 1.0 and report.matched == len(to_triples(gold))


def rename(a, seed):
    """Consistently rename every local id, shuffling which new name each one gets."""
    rng = random.Random(seed)

    def fresh(ids, prefix):
        targets = [f"{prefix}{i + 50}" for i in range(len(ids))]
        rng.shuffle(targets)
        return dict(zip(ids, targets))

    ids = identifiers(a)
    em, cm, lm = fresh(ids["entity"], "x"), fresh(ids["config"], "k"), fresh(ids["landmark"], "l")
    ent = lambda e: em.get(e, e)
    configs = []
    for c in a.configurations:
        path = c.path and replace(c.path, segments=tuple(replace(s, landmark=lm.get(s.landmark, s.landmark))
                                                          for s in c.path.segments))
        configs.append(replace(
            c, id=cm[c.id],
            trajector=RoleBinding(c.trajector.role_id, ent(c.trajector.entity)),
            landmarks=tuple(RoleBinding(lm[b.role_id], ent(b.entity)) for b in c.landmarks),
            path=path, fors=tuple(replace(f, landmark=lm[f.landmark]) for f in c.fors)))
    entities = [replace(e, id=em[e.id]) for e in a.entities]
    rng.shuffle(entities)
    return replace(a, entities=tuple(entities), configurations=tuple(configs))


@pytest.mark.parametrize("name", ALL_CASES)
def test_renaming_invariance(name):
    gold = load_gold(name)
    for seed in range(3):
        assert score(gold, rename(gold, seed)).f1 == 1.0


def test_renaming_invariance_on_degraded_pairs():
    for label, gold, pred in PAIRS[::5]:
        assert score(gold, rename(pred, 1)).matched == score(gold, pred).matched, label


def partial_injections(pred_ids, gold_ids):
    """Every injective partial map, not only the maximal ones."""
    for image in product([None, *gold_ids], repeat=len(pred_ids)):
        used = [g for g in image if g is not None]
        if len(used) == len(set(used)):
            yield {p: g for p, g in zip(pred_ids, image) if g is not None}


def brute_force(gold, pred):
    gt, pt = to_triples(gold), to_triples(pred)
    gids, pids = identifiers(gold), identifiers(pred)
    best = 0
    for parts in product(*(list(partial_injections(pids[k], gids[k])) for k in gids)):
        m = {k: v for part in parts for k, v in part.items()}
        best = max(best, matched_count(gt, pt, m))
    return best


@pytest.mark.parametrize("label, gold, pred", [p for p in PAIRS if p[0].startswith(("tower-c2", "nlvr"))],
                         ids=lambda x: x if isinstance(x, str) else "")
def test_exhaustive_matches_brute_force(label, gold, pred):
    assert score(gold, pred, method="exhaustive").matched == brute_force(gold, pred)


def test_tower_without_second_configuration():
    gold = load_gold("tower")
    pred = replace(gold, configurations=gold.configurations[:1])
    report = score(gold, pred)
    # c2 contributes tr, lm, sp, metric, for, viewer and two qts
    assert (report.gold_total, report.pred_total, report.matched) == (36, 28, 28)
    assert report.recall == pytest.approx(28 / 36)


def test_hill_climb_equals_exhaustive_on_degraded_pairs():
    assert len(PAIRS) > 300
    for label, gold, pred in PAIRS:
        ex = score(gold, pred, method="exhaustive").matched
        hc = score(gold, pred, method="hill-climb", seed=0).matched
        assert hc == ex, label


def test_auto_method_choice():
    small = load_gold("nlvr")
    big = load_gold("tower")
    assert score(small, small).method == "exhaustive"
    assert id_count(big) > 8 and score(big, big).method == "hill-climb"


def test_symmetry():
    for label, gold, pred in PAIRS[::3]:
        ab, ba = score(gold, pred), score(pred, gold)
        assert ab.matched == ba.matched, label
        assert ab.f1 == pytest.approx(ba.f1)
        assert (ab.precision, ab.recall) == pytest.approx((ba.recall, ba.precision))


def test_extra_prediction_never_loses_matches():
    for label, gold, pred in PAIRS[::4]:
        richer = replace(pred, entities=pred.entities[:1] + (
            replace(pred.entities[0], id="zz", props=(Property("col", "green"),)),) + pred.entities[1:]) \
            if pred.entities else pred
        if id_count(richer) <= 8:
            assert score(gold, richer).matched >= score(gold, pred).matched, label


def test_seeded_runs_are_reproducible():
    gold = load_gold("bell")
    pred = rename(gold, 4)
    a, b = score(gold, pred, seed=9), score(gold, pred, seed=9)
    assert a == b


def test_corpus_micro_and_macro():
    golds = [load_gold(n) for n in ("nlvr", "blocks")]
    nlvr_half = replace(golds[0], configurations=())
    report = score_corpus(golds, [nlvr_half, golds[1]])
    # nlvr: 6 of 13 gold matched, 6 predicted; blocks: 16 of 16
    assert report.micro == pytest.approx((22 / 22, 22 / 29, 2 * 22 / 29 / (1 + 22 / 29)))
    nlvr_f = 2 * 6 / 13 / (1 + 6 / 13)
    assert report.macro == pytest.approx((1.0, (6 / 13 + 1) / 2, (nlvr_f + 1) / 2))
    assert report.f1 == report.micro[2]
    assert score_corpus(golds, [nlvr_half, golds[1]], average="macro").f1 == report.macro[2]


def test_corpus_missing_and_unmatched_sentences():
    golds = [load_gold("nlvr")]
    report = score_corpus(golds, [load_gold("blocks")])
    assert [r.method for r in report.sentences] == ["missing", "unmatched"]
    assert report.micro == (0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        score_corpus(golds, golds, average="median")


def test_unknown_method():
    gold = load_gold("nlvr")
    with pytest.raises(ValueError):
        score(gold, gold, method="annealing")
