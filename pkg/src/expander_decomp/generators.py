"""Deterministic graph families used by the CLI, benchmarks and tests."""

from __future__ import annotations

import random
from typing import Optional

import networkx as nx

from .graph_core import Graph


def _clique_edges(size: int, offset: int) -> list[tuple[int, int]]:
    return [(offset + i, offset + j) for i in range(size) for j in range(i + 1, size)]


def ring_of_cliques(k: int, s: int) -> Graph:
    """``k`` copies of ``K_s``; clique ``t`` links its vertex 0 to vertex 1 of clique ``t + 1``.

    ``m = k * s(s-1)/2 + k`` for ``k >= 2`` (one ring edge per clique);
    a single clique has no ring edge.
    """
    if k < 1 or s < 2:
        raise ValueError("ring_of_cliques needs k >= 1 and s >= 2")
    edges = []
    for t in range(k):
        edges += _clique_edges(s, t * s)
    if k >= 2:
        for t in range(k):
            edges.append((t * s, ((t + 1) % k) * s + 1))
    return Graph(k * s, edges)


def dumbbell(s: int) -> Graph:
    """Two copies of ``K_s`` joined by the edge ``(0, s)``."""
    if s < 1:
        raise ValueError("dumbbell needs s >= 1")
    return Graph(2 * s, _clique_edges(s, 0) + _clique_edges(s, s) + [(0, s)])


def path_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def random_regular(d: int, n: int, seed: Optional[int] = 0) -> Graph:
    """Uniform-ish random ``d``-regular simple graph (networkx pairing model)."""
    if n * d % 2 or not 0 <= d < n:
        raise ValueError("random_regular needs 0 <= d < n and n*d even")
    g = nx.random_regular_graph(d, n, seed=seed)
    return Graph(n, sorted(tuple(sorted(e)) for e in g.edges()))


def core_with_fringe(core: int, fringe: int, seed: Optional[int] = 0,
                     kind: str = "clique", degree: int = 8) -> tuple[Graph, list[int]]:
    """A dense core plus ``fringe`` pendant-ish vertices.

    The core is ``K_core`` (``kind="clique"``) or a random ``degree``-regular
    graph. Each fringe vertex attaches to one or two core vertices and,
    with some probability, to the previous fringe vertex. Returns the graph
    and the core vertex list (ids ``0..core-1``).
    """
    rng = random.Random(seed)
    if kind == "clique":
        edges = _clique_edges(core, 0)
    elif kind == "regular":
        edges = list(random_regular(degree, core, seed=rng.randrange(2**31)).edges)
    else:
        raise ValueError(f"unknown core kind {kind!r}")
    for i in range(fringe):
        v = core + i
        for u in rng.sample(range(core), rng.choice((1, 1, 2))):
            edges.append((u, v))
        if i and rng.random() < 0.5:
            edges.append((v - 1, v))
    return Graph(core + fringe, edges), list(range(core))


def erdos_renyi(n: int, p: float, seed: Optional[int] = 0) -> Graph:
    rng = random.Random(seed)
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])


def trimming_instance(core: int, inside: int, outside: int, seed: Optional[int] = 0,
                      kind: str = "clique", degree: int = 12) -> tuple[Graph, list[int]]:
    """A core with dangling fringe, for trimming experiments.

    Vertices ``0..core-1`` form ``K_core`` or a random ``degree``-regular
    graph. ``inside`` fringe vertices hang off the core by one edge each;
    ``outside`` further vertices form a path whose first vertex attaches to
    the core, and every inside fringe vertex also links to one or two path
    vertices. Returns the graph and ``A`` = core plus the inside fringe.
    """
    rng = random.Random(seed)
    if kind == "clique":
        edges = _clique_edges(core, 0)
    elif kind == "regular":
        edges = list(random_regular(degree, core, seed=rng.randrange(2**31)).edges)
    else:
        raise ValueError(f"unknown core kind {kind!r}")
    fringe = list(range(core, core + inside))
    far = list(range(core + inside, core + inside + outside))
    for v in fringe:
        edges.append((rng.randrange(core), v))
    if far:
        edges.append((rng.randrange(core), far[0]))
        edges += [(far[i], far[i + 1]) for i in range(len(far) - 1)]
        for v in fringe:
            for w in rng.sample(far, min(len(far), rng.choice((1, 2)))):
                edges.append((v, w))
    return Graph(core + inside + outside, edges), list(range(core + inside))
