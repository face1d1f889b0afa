"""Undirected multigraphs, volumes, cuts, induced subgraphs and degree reduction."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence, TextIO, Union


class GraphFormatError(ValueError):
    """Raised when an edge list cannot be parsed."""


class SelfLoopError(GraphFormatError):
    """Raised when an edge joins a vertex to itself."""


class Graph:
    """Immutable undirected multigraph on vertices ``0..n-1``.

    Parallel edges are allowed, self-loops are not. Every edge has an id equal
    to its position in ``edges``; ``edges[e] = (a, b)`` also fixes the
    orientation used for signed flow values.

    ``adjacency[v]`` lists ``(neighbor, edge_id)`` pairs sorted by neighbor
    and then edge id, which is the iteration order all algorithms rely on
    for deterministic tie-breaking.
    """

    __slots__ = ("n", "edges", "adjacency", "deg", "labels")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]],
                 labels: Optional[Sequence[str]] = None):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        edge_list = []
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for eid, (a, b) in enumerate(edges):
            a, b = int(a), int(b)
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge {eid} = ({a}, {b}) out of range for n={n}")
            if a == b:
                raise SelfLoopError(f"self-loop at vertex {a}")
            edge_list.append((a, b))
            adj[a].append((b, eid))
            adj[b].append((a, eid))
        for lst in adj:
            lst.sort()
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(edge_list)
        self.adjacency: tuple[tuple[tuple[int, int], ...], ...] = tuple(tuple(x) for x in adj)
        self.deg: tuple[int, ...] = tuple(len(x) for x in adj)
        if labels is not None and len(labels) != n:
            raise ValueError("labels must have one entry per vertex")
        self.labels: Optional[tuple[str, ...]] = tuple(labels) if labels is not None else None

    @property
    def m(self) -> int:
        return len(self.edges)

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def other(self, e: int, v: int) -> int:
        a, b = self.edges[e]
        return b if v == a else a

    def max_degree(self) -> int:
        return max(self.deg, default=0)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))


@dataclass(frozen=True)
class VertexSet:
    """A subset of the vertices of ``graph`` with cached size and volume."""

    graph: Graph = field(repr=False, compare=False)
    members: frozenset[int]
    volume: int = field(init=False, compare=False)

    def __post_init__(self):
        for v in self.members:
            if not 0 <= v < self.graph.n:
                raise ValueError(f"vertex {v} not in graph")
        deg = self.graph.deg
        object.__setattr__(self, "volume", sum(deg[v] for v in self.members))

    @classmethod
    def of(cls, graph: Graph, vertices: Iterable[int]) -> "VertexSet":
        return cls(graph, frozenset(vertices))

    @classmethod
    def all(cls, graph: Graph) -> "VertexSet":
        return cls(graph, frozenset(range(graph.n)))

    @classmethod
    def empty(cls, graph: Graph) -> "VertexSet":
        return cls(graph, frozenset())

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def flags(self) -> list[bool]:
        return [v in self.members for v in range(self.graph.n)]

    def complement(self) -> "VertexSet":
        return VertexSet(self.graph, frozenset(range(self.graph.n)) - self.members)

    def sorted(self) -> list[int]:
        return sorted(self.members)

    def __contains__(self, v: object) -> bool:
        return v in self.members

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)


SetLike = Union[VertexSet, Iterable[int]]


def _members(S: SetLike) -> frozenset[int]:
    if isinstance(S, VertexSet):
        return S.members
    return frozenset(S)


def load_edge_list(text: Union[str, TextIO]) -> Graph:
    """Parse a whitespace-separated edge list.

    Lines starting with ``#`` and blank lines are skipped. Vertex labels are
    arbitrary tokens, numbered in order of first appearance. A repeated line
    yields a parallel edge.
    """
    lines = text.splitlines() if isinstance(text, str) else text.read().splitlines()
    index: dict[str, int] = {}
    labels: list[str] = []
    edges = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected two vertex tokens, got {len(parts)}")
        a, b = parts
        if a == b:
            raise SelfLoopError(f"line {lineno}: self-loop at vertex {a}")
        ids = []
        for tok in (a, b):
            if tok not in index:
                index[tok] = len(labels)
                labels.append(tok)
            ids.append(index[tok])
        edges.append((ids[0], ids[1]))
    return Graph(len(labels), edges, labels)


def dump_edge_list(G: Graph) -> str:
    return "".join(f"{G.label(a)} {G.label(b)}\n" for a, b in G.edges)


def volume(G: Graph, S: SetLike) -> int:
    """Sum of degrees over ``S``."""
    if isinstance(S, VertexSet):
        return S.volume
    return sum(G.deg[v] for v in set(S))


def cut_edges(G: Graph, S: SetLike) -> int:
    """Number of edges with exactly one endpoint in ``S`` (with multiplicity)."""
    mem = _members(S)
    return sum(1 for a, b in G.edges if (a in mem) != (b in mem))


class Subgraph(NamedTuple):
    """An induced subgraph with maps from its ids back to the parent's ids."""

    graph: Graph
    vertices: tuple[int, ...]  # local vertex -> parent vertex
    edges: tuple[int, ...]  # local edge -> parent edge

    def lift(self, local: Iterable[int]) -> frozenset[int]:
        return frozenset(self.vertices[v] for v in local)


def induced_subgraph(G: Graph, A: SetLike, allow_empty: bool = False) -> Subgraph:
    """Return ``G[A]``; local vertex ids follow the parent's order."""
    verts = sorted(_members(A))
    if not verts and not allow_empty:
        raise ValueError("induced subgraph of an empty vertex set")
    local = {v: i for i, v in enumerate(verts)}
    sub_edges = []
    emap = []
    for e, (a, b) in enumerate(G.edges):
        if a in local and b in local:
            sub_edges.append((local[a], local[b]))
            emap.append(e)
    labels = [G.label(v) for v in verts] if G.labels is not None else None
    return Subgraph(Graph(len(verts), sub_edges, labels), tuple(verts), tuple(emap))


def connected_components(G: Graph) -> list[list[int]]:
    """Connected components as sorted vertex lists, ordered by smallest vertex."""
    seen = [False] * G.n
    comps = []
    for s in range(G.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w, _ in G.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class DegreeReduction:
    """A bounded-degree graph together with the copy maps to the original.

    ``edge_of[e]`` is the original edge carried by reduced edge ``e`` or -1
    for the cycle edges joining copies of one vertex.
    """

    original: Graph = field(repr=False)
    reduced: Graph
    fwd: tuple[tuple[int, ...], ...]
    back: tuple[int, ...]
    edge_of: tuple[int, ...] = field(repr=False)

    def lift_set(self, S: SetLike) -> frozenset[int]:
        """All copies of the original vertices in ``S``."""
        return frozenset(c for v in _members(S) for c in self.fwd[v])

    def project_set(self, S: SetLike) -> frozenset[int]:
        """Original vertices with at least half of their copies in ``S``."""
        mem = _members(S)
        out = []
        for v, copies in enumerate(self.fwd):
            inside = sum(1 for c in copies if c in mem)
            if copies and 2 * inside >= len(copies) and inside > 0:
                out.append(v)
        return frozenset(out)


def degree_reduce(G: Graph, max_degree: int = 16, cycle_multiplicity: int = 1) -> DegreeReduction:
    """Replace every vertex of degree above ``max_degree`` by a cycle of copies.

    Each copy keeps exactly one original incident edge, so copies have degree
    at most ``1 + 2 * cycle_multiplicity``. Every cycle edge is repeated
    ``cycle_multiplicity`` times. A vertex of degree 2 split this way becomes
    two copies joined by ``2 * cycle_multiplicity`` parallel edges.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    if cycle_multiplicity < 1:
        raise ValueError("cycle_multiplicity must be at least 1")
    fwd: list[tuple[int, ...]] = []
    back: list[int] = []
    # slot[(v, edge)] -> copy that carries edge at v
    slot: dict[tuple[int, int], int] = {}
    cycle_edges = []
    for v in range(G.n):
        incident = [e for _, e in G.adjacency[v]]
        if G.deg[v] <= max_degree:
            c = len(back)
            back.append(v)
            fwd.append((c,))
            for e in incident:
                slot[(v, e)] = c
            continue
        copies = tuple(range(len(back), len(back) + len(incident)))
        back.extend([v] * len(incident))
        fwd.append(copies)
        # edges are listed twice at v only for parallel edges to the same
        # neighbour; each occurrence (v, e) is unique since e is unique
        for c, e in zip(copies, incident):
            slot[(v, e)] = c
        k = len(copies)
        for i in range(k):
            cycle_edges.extend([(copies[i], copies[(i + 1) % k])] * cycle_multiplicity)
    red_edges = []
    edge_of = []
    for e, (a, b) in enumerate(G.edges):
        red_edges.append((slot[(a, e)], slot[(b, e)]))
        edge_of.append(e)
    red_edges.extend(cycle_edges)
    edge_of.extend([-1] * len(cycle_edges))
    reduced = Graph(len(back), red_edges)
    return DegreeReduction(G, reduced, tuple(fwd), tuple(back), tuple(edge_of))
