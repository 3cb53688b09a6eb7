import json
import random
from itertools import product

import pytest

from spatial_amr.model import QtPair, load_annotations
from spatial_amr.rcc8 import (
    EMPTY,
    UNIVERSAL,
    MalformedTable,
    QtConstraintNetwork,
    Rcc8,
    RelationSet,
    TableNotLoaded,
    UnknownFMeaning,
    algebraic_closure,
    compose,
    converse,
    default_table,
    load_table,
    network_from_annotation,
)

from .conftest import FIXTURES, load_gold
from .oracles import grid_rcc8

BASE = list(Rcc8)
EQ = RelationSet.of(Rcc8.EQ)


@pytest.fixture(scope="module")
def realized():
    return grid_rcc8.realized_compositions()


@pytest.mark.parametrize("r1, r2", list(product(grid_rcc8.NAMES, repeat=2)))
def test_composition_cell_matches_grid_model(realized, r1, r2):
    assert set(compose(RelationSet.of(r1), RelationSet.of(r2)).names) == realized[(r1, r2)]


def test_oracle_relation_is_converse_consistent():
    pool = grid_rcc8.region_pool(extra=40)
    flip = {"TPP": "TPPi", "TPPi": "TPP", "NTPP": "NTPPi", "NTPPi": "NTPP"}
    for a, b in product(pool[::7], repeat=2):
        assert grid_rcc8.relation(b, a) == flip.get(grid_rcc8.relation(a, b), grid_rcc8.relation(a, b))


@pytest.mark.parametrize("r", BASE)
def test_converse_is_an_involution(r):
    single = RelationSet.of(r)
    assert converse(converse(single)) == single
    assert len(converse(single)) == 1


@pytest.mark.parametrize("r", BASE)
def test_eq_is_the_identity(r):
    single = RelationSet.of(r)
    assert compose(EQ, single) == single
    assert compose(single, EQ) == single


@pytest.mark.parametrize("r1, r2", list(product(BASE, repeat=2)))
def test_converse_of_composition(r1, r2):
    a, b = RelationSet.of(r1), RelationSet.of(r2)
    assert converse(compose(a, b)) == compose(converse(b), converse(a))


def test_composition_distributes_over_union():
    rng = random.Random(3)
    for _ in range(200):
        a, b, c = (RelationSet(rng.randrange(1, 256)) for _ in range(3))
        assert compose(a | b, c) == compose(a, c) | compose(b, c)


def test_relation_set_basics():
    s = RelationSet.of("DC", Rcc8.EC)
    assert str(s) == "{DC, EC}" and len(s) == 2 and Rcc8.DC in s and Rcc8.PO not in s
    assert s.issubset(UNIVERSAL) and not UNIVERSAL.issubset(s)
    assert not EMPTY and len(UNIVERSAL) == 8
    with pytest.raises(ValueError):
        RelationSet(256)


def net_of(constraints, variables=None):
    names = variables or sorted({v for x, y, _ in constraints for v in (x, y)})
    net = QtConstraintNetwork(names)
    for x, y, rels in constraints:
        net.constrain(x, y, RelationSet.of(*rels))
    return net


def test_inconsistent_triangle():
    net = net_of([("x", "z", ["EQ"]), ("y", "z", ["NTPP"]), ("x", "y", ["DC"])])
    result = algebraic_closure(net)
    assert not result.consistent
    assert result.witness is not None
    closed, ok, trace = result
    assert not ok and trace


def test_inconsistent_fixture_network():
    data = json.loads((FIXTURES / "networks" / "inconsistent.json").read_text())
    assert not algebraic_closure(QtConstraintNetwork.from_dict(data)).consistent


def test_closure_refines():
    # x NTPP y, y NTPP z forces x NTPP z
    net = net_of([("x", "y", ["NTPP"]), ("y", "z", ["NTPP"])])
    result = algebraic_closure(net)
    assert result.consistent
    assert result.network.get("x", "z") == RelationSet.of("NTPP")
    assert result.network.get("z", "x") == RelationSet.of("NTPPi")
    assert [(s.x, s.y, s.via) for s in result.trace] == [("x", "z", "y")]
    # the input is untouched
    assert net.get("x", "z") == UNIVERSAL


def test_empty_constraint_is_inconsistent_at_once():
    net = QtConstraintNetwork(["a", "b"])
    net.set("a", "b", EMPTY)
    result = algebraic_closure(net)
    assert not result.consistent and result.witness == ("a", "b") and result.trace == ()


def random_network(rng, n=5, density=0.6):
    names = [f"v{i}" for i in range(n)]
    net = QtConstraintNetwork(names)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                net.set(names[i], names[j], RelationSet(rng.randrange(1, 256)))
    return net


def random_networks(count, seed, **kw):
    rng = random.Random(seed)
    return [random_network(rng, **kw) for _ in range(count)]


def test_closure_idempotent_on_random_networks():
    for net in random_networks(200, seed=11):
        first = algebraic_closure(net)
        if not first.consistent:
            continue
        second = algebraic_closure(first.network)
        assert second.consistent and second.network == first.network and second.trace == ()


def test_closure_never_loosens():
    for net in random_networks(100, seed=12):
        result = algebraic_closure(net)
        if result.consistent:
            for x, y in product(net.variables, repeat=2):
                assert result.network.get(x, y).issubset(net.get(x, y))


def test_closure_monotone():
    rng = random.Random(13)
    for net in random_networks(100, seed=13):
        tighter = net.copy()
        x, y = rng.sample(net.variables, 2)
        tighter.constrain(x, y, RelationSet(rng.randrange(1, 256)))
        loose, tight = algebraic_closure(net), algebraic_closure(tighter)
        if tight.consistent:
            assert loose.consistent
            for a, b in product(net.variables, repeat=2):
                assert tight.network.get(a, b).issubset(loose.network.get(a, b))


def test_closure_independent_of_variable_order():
    rng = random.Random(14)
    for net in random_networks(100, seed=14):
        order = net.variables[:]
        rng.shuffle(order)
        shuffled = QtConstraintNetwork(order)
        for (x, y), rel in net.constraints.items():
            shuffled.set(x, y, rel)
        a, b = algebraic_closure(net), algebraic_closure(shuffled)
        assert a.consistent == b.consistent
        if a.consistent:
            assert a.network == b.network


def test_closure_is_sound_against_grid_models():
    # a network with a grid model must never be rejected
    pool = grid_rcc8.rectangles()[::3]
    rng = random.Random(15)
    checked = 0
    for _ in range(40):
        net = random_network(rng, n=3, density=1.0)
        constraints = {(x, y): set(r.names) for (x, y), r in net.constraints.items()}
        if grid_rcc8.has_model(constraints, net.variables, pool):
            checked += 1
            assert algebraic_closure(net).consistent
    assert checked > 5


def test_network_from_nlvr():
    net = network_from_annotation(load_gold("nlvr"))
    assert net.constraints == {("e1", "e2"): RelationSet.of("EC")}
    assert algebraic_closure(net).consistent


def test_network_from_heart_notes_non_topological():
    net = network_from_annotation(load_gold("heart"))
    assert net.get("e3", "e2") == RelationSet.of("EC") and net.get("e3", "e1") == RelationSet.of("EC")
    assert any("direction" in n for n in net.notices)


def test_f_meaning_expansions():
    from dataclasses import replace
    gold = load_gold("nlvr")
    for name, expected in (("PP", {"TPP", "NTPP"}), ("dr", {"DC", "EC"}), ("PPi", {"TPPi", "NTPPi"}),
                           ("ntppi", {"NTPPi"})):
        config = replace(gold.configurations[0], qts=(QtPair("topology", name),))
        net = network_from_annotation(replace(gold, configurations=(config,)))
        assert set(net.get("e1", "e2").names) == expected
    config = replace(gold.configurations[0], qts=(QtPair("topology", "touching"),))
    with pytest.raises(UnknownFMeaning):
        network_from_annotation(replace(gold, configurations=(config,)))


def test_network_dict_round_trip():
    net = net_of([("x", "y", ["DC", "EC"]), ("y", "z", ["NTPP"])])
    assert QtConstraintNetwork.from_dict(json.loads(json.dumps(net.to_dict()))) == net
    with pytest.raises(UnknownFMeaning):
        QtConstraintNetwork.from_dict({"variables": ["a", "b"], "constraints": [{"x": "a", "y": "b", "rel": ["XX"]}]})


def test_table_loading_errors(tmp_path):
    with pytest.raises(TableNotLoaded):
        load_table(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"composition": {"DC": {"DC": ["DC"]}}}))
    with pytest.raises(MalformedTable):
        load_table(bad)
    assert default_table() is default_table()


def test_annotations_reason_end_to_end():
    golds = load_annotations((FIXTURES / "gold" / "tower.json").read_text())
    net = network_from_annotation(golds[0])
    assert net.get("e3", "e4") == RelationSet.of("DC")
