from __future__ import annotations

import json
import random
from pathlib import Path
from typing import Any, Callable

import pytest
from hypothesis import strategies as st

from spatial_amr.model import deserialize_annotation
from spatial_amr.penman import AmrEdge, AmrGraph, AmrNode, parse_document
from spatial_amr.registry import seed_registry

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
TABLE_CASES = ("tower", "heart", "nlvr", "blocks")
ALL_CASES = TABLE_CASES + ("bell",)


@pytest.fixture(scope="session")
def registry():
    return seed_registry()


def load_entry(name: str):
    return parse_document((FIXTURES / f"{name}.amr").read_text(encoding="utf-8"))[0]


def load_gold(name: str):
    return deserialize_annotation((FIXTURES / "gold" / f"{name}.json").read_text(encoding="utf-8"))


def load_gold_dict(name: str) -> dict:
    return json.loads((FIXTURES / "gold" / f"{name}.json").read_text(encoding="utf-8"))


# -- random graphs ---------------------------------------------------------------

CONCEPTS = ["block", "move-01", "top-06", "and", "name", "you", "column", "space",
            "have-configuration-91", "cartesian-coordinate-entity", "right-04", "bell"]
ROLES = [":ARG0", ":ARG1", ":ARG2", ":mod", ":op1", ":op2", ":location", ":source", ":color"]
CONSTANTS = ["+", "-", "imperative", "diagonally", "5", "2.5", '"Mercedes"', '"New York"', "closely"]


def build_graph(integer: Callable[[int, int], int], choice: Callable[[list], Any], coin: Callable[[], bool],
                max_nodes: int) -> AmrGraph:
    """A connected graph: a spanning tree, extra reentrant edges, then constants."""
    n = integer(1, max_nodes)
    variables = [f"v{i}" for i in range(n)]
    nodes = tuple(AmrNode(v, choice(CONCEPTS)) for v in variables)
    edges: list[AmrEdge] = []
    seen: set[tuple[str, str, str]] = set()

    def add(src: str, role: str, tgt: str, inverse: bool) -> None:
        key = (src, role, tgt)
        if key in seen or src == tgt:
            return
        seen.add(key)
        edges.append(AmrEdge(tgt, role + "-of", src) if inverse else AmrEdge(src, role, tgt))

    for i in range(1, n):
        add(variables[integer(0, i - 1)], choice(ROLES), variables[i], coin())
    for _ in range(integer(0, n // 3)):
        add(choice(variables), choice(ROLES), choice(variables), coin())
    for _ in range(integer(0, n // 2 + 1)):
        edges.append(AmrEdge(choice(variables), choice(ROLES), choice(CONSTANTS), constant=True))
    return AmrGraph(variables[0], nodes, tuple(edges))


@st.composite
def amr_graphs(draw, max_nodes: int = 40) -> AmrGraph:
    """Every choice is a Hypothesis draw, so failures shrink well."""
    return build_graph(lambda lo, hi: draw(st.integers(lo, hi)), lambda xs: draw(st.sampled_from(xs)),
                       lambda: draw(st.booleans()), max_nodes)


def seeded_amr_graphs(max_nodes: int = 40) -> st.SearchStrategy[AmrGraph]:
    """One draw per graph; about twenty times faster to generate, but shrinks only the seed."""
    def make(rng: random.Random) -> AmrGraph:
        return build_graph(rng.randint, rng.choice, lambda: rng.random() < 0.5, max_nodes)
    return st.builds(make, st.randoms(use_true_random=True))
