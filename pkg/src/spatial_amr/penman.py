"""Penman notation reader and writer for AMR graphs.

Graphs are immutable. Constants (numbers, quoted strings, ``+``/``-`` and bare
symbols such as ``imperative``) are stored on edges as leaf values and never
become nodes. Edges keep their textual order and their textual orientation, so
``:ARG1-of`` edges are stored exactly as written; use :func:`normalized_triples`
for the predicate-to-argument view.

Example::

    >>> g = parse_graph("(a / alpha :arg0 (b / beta) :arg1 b)")
    >>> [e.target for e in g.edges]
    ['b', 'b']
    >>> print(print_graph(g))
    (a / alpha
        :arg0 (b / beta)
        :arg1 b)
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

import networkx as nx
from networkx.algorithms.isomorphism import categorical_multiedge_match

__all__ = [
    "AmrNode",
    "AmrEdge",
    "AmrGraph",
    "AmrDocumentEntry",
    "PenmanError",
    "PenmanSyntaxError",
    "UnbalancedParens",
    "DuplicateVariableDefinition",
    "DanglingReference",
    "EmptyConcept",
    "MissingGraph",
    "DuplicateMetadataKey",
    "parse_graph",
    "print_graph",
    "parse_document",
    "invert_role",
    "is_inverse_role",
    "normalized_triples",
    "isomorphic",
]


class PenmanError(ValueError):
    """Base class for Penman reading errors; carries a 1-based line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 entry_id: str | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.entry_id = entry_id

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where = f"line {self.line}, column {self.column}: "
        prefix = f"[{self.entry_id}] " if self.entry_id else ""
        return f"{prefix}{where}{self.message}"

    @property
    def code(self) -> str:
        return type(self).__name__


class PenmanSyntaxError(PenmanError):
    pass


class UnbalancedParens(PenmanError):
    pass


class DuplicateVariableDefinition(PenmanError):
    pass


class DanglingReference(PenmanError):
    pass


class EmptyConcept(PenmanError):
    pass


class MissingGraph(PenmanError):
    pass


class DuplicateMetadataKey(PenmanError):
    pass


@dataclass(frozen=True)
class AmrNode:
    variable: str
    concept: str


@dataclass(frozen=True)
class AmrEdge:
    source: str
    role: str
    target: str
    constant: bool = False

    def inverted(self) -> AmrEdge:
        """The same relation written from the other end (``:R`` <-> ``:R-of``)."""
        if self.constant:
            raise ValueError(f"cannot invert edge to constant {self.target!r}")
        return AmrEdge(self.target, invert_role(self.role), self.source)


def invert_role(role: str) -> str:
    if role.endswith("-of"):
        return role[:-3]
    return role + "-of"


def is_inverse_role(role: str) -> bool:
    return role.endswith("-of")


@dataclass(frozen=True)
class AmrGraph:
    root: str
    nodes: tuple[AmrNode, ...]
    edges: tuple[AmrEdge, ...]
    _concepts: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_concepts", {n.variable: n.concept for n in self.nodes})

    def concept(self, variable: str) -> str:
        return self._concepts[variable]

    def has_variable(self, variable: str) -> bool:
        return variable in self._concepts

    @property
    def variables(self) -> list[str]:
        return [n.variable for n in self.nodes]

    def triples(self) -> list[tuple[str, str, str]]:
        return [(e.source, e.role, e.target) for e in self.edges]

    def preorder(self) -> list[str]:
        """Variables in depth-first pre-order from the root (textual order for parsed graphs)."""
        return [var for var, _ in _layout(self)[1]]


@dataclass(frozen=True)
class AmrDocumentEntry:
    metadata: dict[str, str]
    graph: AmrGraph
    source_span: tuple[int, int]

    @property
    def id(self) -> str | None:
        return self.metadata.get("id")


# ---------------------------------------------------------------------------
# reading

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<slash>/)
  | (?P<role>:[^\s()/:"~]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<symbol>[^\s()/:"]+)
  | (?P<bad>")
    """,
    re.VERBOSE,
)

# a bare symbol shaped like this is treated as a variable reference
_VARIABLE_SHAPE = re.compile(r"^[a-z]{1,3}\d*$")


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str, line_offset: int) -> list[_Tok]:
    tokens = []
    line, line_start = 1, 0
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        start = m.start()
        if kind == "ws":
            chunk = m.group()
            newlines = chunk.count("\n")
            if newlines:
                line += newlines
                line_start = start + chunk.rfind("\n") + 1
            continue
        if kind == "bad":
            raise PenmanSyntaxError("unterminated string", line + line_offset, start - line_start + 1)
        tokens.append(_Tok(kind, m.group(), line + line_offset, start - line_start + 1))
    return tokens


class _Reader:
    def __init__(self, tokens: list[_Tok], end: tuple[int, int]):
        self.tokens = tokens
        self.pos = 0
        self.end = end
        self.nodes: list[AmrNode] = []
        self.defined: dict[str, _Tok] = {}
        self.edges: list[tuple[AmrEdge, _Tok] | None] = []

    def peek(self) -> _Tok | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise UnbalancedParens("unexpected end of input; missing ')'", *self.end)
        self.pos += 1
        return tok

    def node(self) -> str:
        open_tok = self.take()
        if open_tok.kind != "lparen":
            raise PenmanSyntaxError(f"expected '(' but found {open_tok.text!r}",
                                    open_tok.line, open_tok.column)
        var_tok = self.take()
        if var_tok.kind != "symbol":
            raise PenmanSyntaxError(f"expected a variable but found {var_tok.text!r}",
                                    var_tok.line, var_tok.column)
        variable = var_tok.text
        slash = self.take()
        if slash.kind != "slash":
            raise PenmanSyntaxError(f"expected '/' after variable {variable!r}",
                                    slash.line, slash.column)
        concept_tok = self.peek()
        if concept_tok is None or concept_tok.kind not in ("symbol", "string"):
            at = concept_tok or _Tok("eof", "", *self.end)
            raise EmptyConcept(f"node {variable!r} has no concept", at.line, at.column)
        self.pos += 1
        if variable in self.defined:
            raise DuplicateVariableDefinition(
                f"variable {variable!r} already defined at line {self.defined[variable].line}",
                var_tok.line, var_tok.column)
        self.defined[variable] = var_tok
        self.nodes.append(AmrNode(variable, concept_tok.text))

        while True:
            tok = self.peek()
            if tok is None:
                raise UnbalancedParens(f"node {variable!r} opened at line {open_tok.line}, "
                                       f"column {open_tok.column} is never closed", *self.end)
            if tok.kind == "rparen":
                self.pos += 1
                return variable
            if tok.kind != "role":
                raise PenmanSyntaxError(f"expected a role or ')' but found {tok.text!r}",
                                        tok.line, tok.column)
            if tok.text == ":":
                raise PenmanSyntaxError("empty role name", tok.line, tok.column)
            self.pos += 1
            target = self.peek()
            if target is None:
                raise UnbalancedParens(f"role {tok.text} has no target", *self.end)
            if target.kind == "lparen":
                # reserve the slot first so the edge keeps its textual position
                slot = len(self.edges)
                self.edges.append(None)
                child = self.node()
                self.edges[slot] = (AmrEdge(variable, tok.text, child), tok)
            elif target.kind in ("symbol", "string"):
                self.pos += 1
                # resolved to reference vs constant once every definition is known
                self.edges.append((AmrEdge(variable, tok.text, target.text, constant=True), target))
            else:
                raise PenmanSyntaxError(f"role {tok.text} has no target", target.line, target.column)


def _parse(text: str, line_offset: int = 0) -> AmrGraph:
    tokens = _tokenize(text, line_offset)
    lines = text.split("\n")
    end = (len(lines) + line_offset, len(lines[-1]) + 1)
    if not tokens:
        raise MissingGraph("no graph found", line_offset + 1, 1)
    if tokens[0].kind == "rparen":
        raise UnbalancedParens("unexpected ')'", tokens[0].line, tokens[0].column)
    reader = _Reader(tokens, end)
    root = reader.node()
    extra = reader.peek()
    if extra is not None:
        cls = UnbalancedParens if extra.kind == "rparen" else PenmanSyntaxError
        raise cls(f"unexpected {extra.text!r} after the end of the graph", extra.line, extra.column)

    edges = []
    for edge, tok in reader.edges:
        if edge.constant and tok.kind == "symbol":
            if edge.target in reader.defined:
                edge = AmrEdge(edge.source, edge.role, edge.target)
            elif _VARIABLE_SHAPE.match(edge.target):
                raise DanglingReference(f"variable {edge.target!r} is never defined",
                                        tok.line, tok.column)
        edges.append(edge)
    return AmrGraph(root, tuple(reader.nodes), tuple(edges))


def parse_graph(text: str) -> AmrGraph:
    """Parse a single parenthesized Penman expression."""
    return _parse(text)


_META_RE = re.compile(r"::(\S+)")


def _parse_metadata(line: str) -> list[tuple[str, str]]:
    body = line.lstrip("#").strip()
    parts = _META_RE.split(body)
    # parts = [prefix, key1, value1, key2, value2, ...]
    return [(parts[i], parts[i + 1].strip()) for i in range(1, len(parts) - 1, 2)]


def parse_document(text: str) -> list[AmrDocumentEntry]:
    """Parse a corpus file of blank-line separated ``# ::key value`` + graph blocks."""
    entries = []
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        start = i
        while i < len(lines) and lines[i].strip():
            i += 1
        block = lines[start:i]
        metadata: dict[str, str] = {}
        graph_lines = []
        first_graph_line = None
        for offset, line in enumerate(block):
            stripped = line.lstrip()
            if stripped.startswith("#"):
                if first_graph_line is None and "::" in stripped:
                    for key, value in _parse_metadata(stripped):
                        if key in metadata:
                            raise DuplicateMetadataKey(f"metadata key {key!r} repeated",
                                                       start + offset + 1, 1, metadata.get("id"))
                        metadata[key] = value
                if first_graph_line is not None:
                    graph_lines.append("")
                continue
            if first_graph_line is None:
                first_graph_line = start + offset
            graph_lines.append(line)
        entry_id = metadata.get("id")
        if first_graph_line is None:
            raise MissingGraph("header block has no graph", start + 1, 1, entry_id)
        try:
            graph = _parse("\n".join(graph_lines), line_offset=first_graph_line)
        except PenmanError as err:
            err.entry_id = entry_id
            raise
        entries.append(AmrDocumentEntry(metadata, graph, (start + 1, i)))
    return entries


# ---------------------------------------------------------------------------
# writing

def _layout(graph: AmrGraph) -> tuple[dict[str, list[tuple[str, str, bool]]], list[tuple[str, int]]]:
    """Assign every edge to the node that prints it.

    Returns per-variable lists of (role, target, defines_target) and the
    pre-order of (variable, depth). An edge is printed at its source. Only when
    that cannot reach every node is an edge whose source is not yet placed
    printed inverted at its target instead.
    """
    try:
        return _layout_pass(graph, invert=False)
    except _Unreachable:
        return _layout_pass(graph, invert=True)


class _Unreachable(ValueError):
    pass


def _layout_pass(graph: AmrGraph, invert: bool) -> tuple[dict[str, list[tuple[str, str, bool]]],
                                                         list[tuple[str, int]]]:
    placed: set[str] = set()
    emitted = [False] * len(graph.edges)
    incident: dict[str, list[int]] = {v: [] for v in graph.variables}
    for idx, e in enumerate(graph.edges):
        if e.source not in incident:
            raise ValueError(f"edge source {e.source!r} is not a node")
        incident[e.source].append(idx)
        if not e.constant:
            if e.target not in incident:
                raise ValueError(f"edge target {e.target!r} is not a node")
            if e.target != e.source:
                incident[e.target].append(idx)
    for lst in incident.values():
        lst.sort()

    children: dict[str, list[tuple[str, str, bool]]] = {v: [] for v in graph.variables}
    order: list[tuple[str, int]] = []

    def visit(var: str, depth: int) -> None:
        placed.add(var)
        order.append((var, depth))
        for idx in incident[var]:
            if emitted[idx]:
                continue
            e = graph.edges[idx]
            if e.source == var:
                role, other = e.role, e.target
            elif invert and e.source not in placed:
                role, other = invert_role(e.role), e.source
            else:
                continue
            emitted[idx] = True
            if e.constant:
                children[var].append((role, other, False))
            elif other in placed:
                children[var].append((role, other, False))
            else:
                children[var].append((role, other, True))
                visit(other, depth + 1)

    if graph.root not in incident:
        raise ValueError(f"root {graph.root!r} is not a node")
    visit(graph.root, 0)
    missing = [v for v in graph.variables if v not in placed]
    if missing:
        raise (ValueError if invert else _Unreachable)(f"nodes not reachable from the root: {missing}")
    return children, order


def print_graph(graph: AmrGraph, indent: int = 4) -> str:
    """Serialize with one role per line; children are indented one level deeper."""
    children, _ = _layout(graph)

    def render(var: str, depth: int) -> str:
        head = f"({var} / {graph.concept(var)}"
        pad = " " * (indent * (depth + 1))
        parts = [head]
        for role, target, defines in children[var]:
            value = render(target, depth + 1) if defines else target
            parts.append(f"\n{pad}{role} {value}")
        return "".join(parts) + ")"

    return render(graph.root, 0)


# ---------------------------------------------------------------------------
# comparison

def normalized_triples(graph: AmrGraph) -> Iterator[tuple[str, str, str, bool]]:
    """Yield (source, role, target, constant) with every ``:R-of`` variable edge flipped to ``:R``."""
    for e in graph.edges:
        if is_inverse_role(e.role) and not e.constant:
            e = e.inverted()
        yield e.source, e.role, e.target, e.constant


def _as_nx(graph: AmrGraph) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    for n in graph.nodes:
        g.add_node(n.variable, label=("node", n.concept, n.variable == graph.root))
    for i, (src, role, tgt, constant) in enumerate(normalized_triples(graph)):
        if constant:
            leaf = ("const", i)
            g.add_node(leaf, label=("const", tgt, False))
            tgt = leaf
        g.add_edge(src, tgt, role=role)
    return g


def _labelled(g: AmrGraph) -> tuple:
    return g.root, Counter((n.variable, n.concept) for n in g.nodes), Counter(normalized_triples(g))


def _shape(g: AmrGraph) -> tuple:
    """Renaming-invariant summary used to reject non-isomorphic pairs cheaply."""
    concepts = {n.variable: n.concept for n in g.nodes}
    edges = Counter((concepts[s], r, concepts[t] if not c else t, c) for s, r, t, c in normalized_triples(g))
    return concepts[g.root], Counter(concepts.values()), edges


def isomorphic(a: AmrGraph, b: AmrGraph) -> bool:
    """True when the graphs have the same labelled triples up to variable renaming."""
    if len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return False
    if _labelled(a) == _labelled(b):
        return True  # identity mapping already works (typical after a round trip)
    if _shape(a) != _shape(b):
        return False
    return nx.is_isomorphic(
        _as_nx(a), _as_nx(b),
        node_match=lambda x, y: x["label"] == y["label"],
        edge_match=categorical_multiedge_match("role", None),
    )
