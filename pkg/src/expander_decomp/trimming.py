"""Expander trimming with slowly growing sinks.

Given ``A`` whose induced graph is a phi-nearly expander in ``G``, repeatedly
route the boundary-induced source mass inside ``G[A_i]`` with bounded-height
unit flow, and cut away a high-level ball whenever mass is left over. The
surviving set carries a flow certificate of phi/6 expansion.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .graph_core import Graph, SetLike, Subgraph, VertexSet, _members, induced_subgraph
from .unit_flow import (FlowContractError, FlowInstance, LevelState, UnitFlowEngine,
                        excess, log2_ceil, run_staged)

log = logging.getLogger(__name__)

PhiLike = Union[float, Fraction, str]


class LevelCutError(RuntimeError):
    """The ball-growing loop failed to find a sparse level cut below height h."""


def as_phi(phi: PhiLike) -> Fraction:
    """Exact conductance parameter in the open interval (0, 1)."""
    if isinstance(phi, float):
        q = Fraction(repr(phi))
    else:
        q = Fraction(phi)
    if not 0 < q < 1:
        raise ValueError(f"phi must lie in (0, 1), got {phi}")
    return q


def edge_capacity(phi: Fraction) -> int:
    """``ceil(2 / phi)``."""
    return math.ceil(2 / phi)


def trim_height(phi: Fraction, n: int, m: int) -> int:
    """``ceil(5120 / phi * log2_ceil(n)^2 * ln(max(m, 2)))``."""
    L = log2_ceil(n)
    return math.ceil(5120 / float(phi) * L * L * math.log(max(m, 2)))


@dataclass
class LevelCut:
    vertices: VertexSet
    j: int
    residual_edges: int


def level_cut(G_A: Graph, inst: FlowInstance, lvl: LevelState, h: int,
              coeff: Optional[float] = None,
              degrees: Optional[Sequence[int]] = None) -> LevelCut:
    """Grow ``S_j = {v : level(v) >= h - j}`` until its residual boundary is sparse.

    Returns the first ``j < h`` with ``|E_f(S_j, V \\ S_j)| < coeff * deg(S_j)``,
    where ``E_f`` counts edges with spare capacity leaving ``S_j``. ``coeff``
    defaults to ``5 ln(max(m, 2)) / h`` and ``degrees`` (the volume weights)
    to the degrees of ``G_A``; trimming passes the degrees in the parent graph.
    """
    if degrees is None:
        degrees = G_A.deg
    if coeff is None:
        coeff = 5 * math.log(max(G_A.m, 2)) / h
    lev = lvl.level
    if not any(x >= h for x in lev):
        raise LevelCutError("no vertex at level h; nothing to cut")
    by_level: dict[int, list[int]] = {}
    for v, x in enumerate(lev):
        by_level.setdefault(min(x, h), []).append(v)
    members: set[int] = set()
    vol = 0
    # S_j only changes at occupied levels, so test once per occupied level
    for t in sorted(by_level, reverse=True):
        if h - t >= h:
            break
        for v in by_level[t]:
            members.add(v)
            vol += degrees[v]
        crossing = 0
        for v in members:
            for w, e in G_A.adjacency[v]:
                if w not in members and inst.residual(v, e) > 0:
                    crossing += 1
        if crossing < coeff * vol:
            return LevelCut(VertexSet(G_A, frozenset(members)), h - t, crossing)
    raise LevelCutError(f"level cut reached j = h = {h}")


@dataclass
class TrimResult:
    A_prime: VertexSet
    certificate: FlowInstance
    subgraph: Subgraph = field(repr=False)
    iterations: int
    pruned_history: list[frozenset[int]]
    excess_history: list[int] = field(default_factory=list)
    sweeps: int = 0
    diagnostics: list[str] = field(default_factory=list)
    h: int = 0


def _boundary_source(G: Graph, sub: Subgraph, c: int) -> list[int]:
    return [c * (G.deg[v] - sub.graph.deg[i]) for i, v in enumerate(sub.vertices)]


def trim(G: Graph, A: SetLike, phi: PhiLike, h: Optional[int] = None) -> TrimResult:
    """Shrink ``A`` to ``A'`` such that ``G[A']`` is a phi/6-expander.

    Requires (unchecked) that ``G[A]`` is a phi-nearly expander with at most
    ``phi * m`` boundary edges. The height defaults to :func:`trim_height`.
    Breaches of the round bound or an empty output are recorded in
    ``diagnostics`` rather than raised.
    """
    q = as_phi(phi)
    c = edge_capacity(q)
    L = log2_ceil(G.n)
    if h is None:
        h = trim_height(q, G.n, G.m)
    coeff = 5 * math.log(max(G.m, 2)) / h
    current = set(_members(A))
    # state keyed by parent ids
    flow_on: dict[int, int] = {}
    absorbed: dict[int, int] = {v: 0 for v in current}
    sink_prev: dict[int, int] = {v: 0 for v in current}
    result_diag: list[str] = []
    pruned: list[frozenset[int]] = []
    excess_hist: list[int] = []
    sweeps = 0
    i = 0
    while True:
        if not current:
            result_diag.append("all of A was pruned")
            log.warning("trim pruned every vertex of A")
            empty = induced_subgraph(G, (), allow_empty=True)
            cert = FlowInstance.zero(empty.graph, [], [], [])
            return TrimResult(VertexSet.empty(G), cert, empty, i, pruned, excess_hist,
                              sweeps, result_diag, h)
        i += 1
        if i > L:
            result_diag.append(f"round {i} exceeds log2 bound {L}")
        sub = induced_subgraph(G, current)
        g = sub.graph
        parent = sub.vertices
        sink_now = [min(G.deg[v], (i * G.deg[v]) // L) for v in parent]
        inst = FlowInstance(
            g,
            [c] * g.m,
            [flow_on.get(pe, 0) for pe in sub.edges],
            _boundary_source(G, sub, c),
            sink_now,
            [absorbed[v] for v in parent],
        )
        lvl = LevelState.zeros(g.n, h)
        engine = UnitFlowEngine(inst, lvl)
        excess_hist.append(engine.total_excess())
        stats = run_staged(engine, [sink_prev[v] for v in parent], sink_now, 8 * L)
        sweeps += stats.sweeps
        for li, pe in enumerate(sub.edges):
            flow_on[pe] = inst.flow[li]
        for li, v in enumerate(parent):
            absorbed[v] = inst.absorbed[li]
            sink_prev[v] = sink_now[li]
        left = engine.total_excess()
        if left == 0:
            excess_hist.append(0)
            if i > L:
                log.warning("trim needed %d rounds, bound is %d", i, L)
            return TrimResult(VertexSet.of(G, current), inst, sub, i, pruned, excess_hist,
                              sweeps, result_diag, h)
        cut = level_cut(g, inst, lvl, h, coeff=coeff, degrees=[G.deg[v] for v in parent])
        S = {parent[v] for v in cut.vertices.members}
        pruned.append(frozenset(S))
        current -= S
        for v in S:
            del absorbed[v]
            del sink_prev[v]
        # flow on edges that left G[A_i] is dropped; the new boundary edges
        # add fresh source at their surviving endpoint
        for pe in list(flow_on):
            a, b = G.edges[pe]
            if a not in current or b not in current:
                del flow_on[pe]


def certify_expander(G: Graph, A: SetLike, inst: FlowInstance, phi: PhiLike) -> bool:
    """Mechanically check the flow-certificate hypothesis for ``G[A]``.

    ``inst`` must live on ``G[A]`` (local ids in parent order), use capacity
    ``ceil(2/phi)`` on every edge, have source
    ``ceil(2/phi) * (deg_G(v) - deg_G[A](v))``, sinks at most ``deg_G(v)``
    and zero excess.
    """
    try:
        q = as_phi(phi)
    except ValueError:
        return False
    c = edge_capacity(q)
    mem = _members(A)
    if not mem:
        return inst.graph.n == 0
    sub = induced_subgraph(G, mem)
    if inst.graph != sub.graph:
        return False
    if any(x != c for x in inst.cap):
        return False
    if list(inst.source) != _boundary_source(G, sub, c):
        return False
    for i, v in enumerate(sub.vertices):
        if inst.sink_total[i] > G.deg[v]:
            return False
    try:
        ex = excess(inst)
    except FlowContractError:
        return False
    return all(x == 0 for x in ex)
