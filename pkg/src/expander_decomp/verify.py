"""Exhaustive oracles for expansion, nearly-expansion and flow feasibility.

Verdicts use exact integer/rational comparisons only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .graph_core import Graph, SetLike, VertexSet, _members
from .trimming import PhiLike
from .unit_flow import FlowInstance

MAX_BRUTE_FORCE = 24


class TooLargeError(ValueError):
    """The exhaustive check was asked to enumerate too many subsets."""


@dataclass(frozen=True)
class ExpansionReport:
    """``phi_star`` is ``None`` when no cut has positive smaller-side volume."""

    is_expander: bool
    phi_star: Optional[Fraction]
    witness: Optional[VertexSet]


def _phi_exact(phi: PhiLike) -> Fraction:
    if isinstance(phi, Fraction):
        return phi
    if isinstance(phi, float):
        return Fraction(repr(phi))
    return Fraction(phi)


def _gray_walk(k: int):
    """Yield ``(i, added)`` for each step of the reflected Gray code on ``k`` bits."""
    for step in range(1, 1 << k):
        i = (step & -step).bit_length() - 1
        gray = step ^ (step >> 1)
        yield i, bool(gray >> i & 1)


def brute_force_expansion(G: Graph, phi: PhiLike) -> ExpansionReport:
    """Exact minimum of ``cut(S) / min(vol(S), vol(V \\ S))`` over all proper cuts.

    Cuts whose smaller side has volume zero satisfy the expander inequality
    trivially and are skipped.
    """
    n = G.n
    if n > MAX_BRUTE_FORCE:
        raise TooLargeError(f"refusing to enumerate 2^{n} subsets")
    q = _phi_exact(phi)
    if n <= 1:
        return ExpansionReport(True, None, None)
    # vertex n-1 stays outside S; that covers every cut once
    k = n - 1
    total = 2 * G.m
    inside = [False] * n
    vol = 0
    cut = 0
    best_num, best_den, best_mask = None, None, 0
    mask = 0
    for i, added in _gray_walk(k):
        w = 0
        for u, _ in G.adjacency[i]:
            if inside[u]:
                w += 1
        if added:
            cut += G.deg[i] - 2 * w
            vol += G.deg[i]
            inside[i] = True
            mask |= 1 << i
        else:
            cut -= G.deg[i] - 2 * w
            vol -= G.deg[i]
            inside[i] = False
            mask &= ~(1 << i)
        small = min(vol, total - vol)
        if small == 0:
            continue
        if best_num is None or cut * best_den < best_num * small:
            best_num, best_den, best_mask = cut, small, mask
    if best_num is None:
        return ExpansionReport(True, None, None)
    star = Fraction(best_num, best_den)
    witness = VertexSet.of(G, (v for v in range(k) if best_mask >> v & 1))
    return ExpansionReport(star >= q, star, witness)


def brute_force_nearly_expander(G: Graph, A: SetLike, phi: PhiLike) -> bool:
    """Check ``|E_G(S, V \\ S)| >= phi * deg_G(S)`` for every ``S`` in ``A``
    with ``deg_G(S) <= deg_G(A \\ S)``; the cut counts edges leaving to all of G.
    """
    verts = sorted(_members(A))
    if len(verts) > MAX_BRUTE_FORCE:
        raise TooLargeError(f"refusing to enumerate 2^{len(verts)} subsets")
    q = _phi_exact(phi)
    volA = sum(G.deg[v] for v in verts)
    inside = [False] * G.n
    vol = 0
    cut = 0
    for i, added in _gray_walk(len(verts)):
        v = verts[i]
        w = 0
        for u, _ in G.adjacency[v]:
            if inside[u]:
                w += 1
        step = G.deg[v] - 2 * w
        if added:
            cut += step
            vol += G.deg[v]
            inside[v] = True
        else:
            cut -= step
            vol -= G.deg[v]
            inside[v] = False
        if vol <= volA - vol and cut < q * vol:
            return False
    return True


def check_flow_feasible(inst: FlowInstance) -> bool:
    """Capacity bounds, sink caps and nonnegative per-vertex balance."""
    g = inst.graph
    if len(inst.cap) != g.m or len(inst.flow) != g.m:
        return False
    if any(len(x) != g.n for x in (inst.source, inst.sink_total, inst.absorbed)):
        return False
    for e in range(g.m):
        if inst.cap[e] < 0 or abs(inst.flow[e]) > inst.cap[e]:
            return False
    balance = list(inst.source)
    for e, (a, b) in enumerate(g.edges):
        balance[a] -= inst.flow[e]
        balance[b] += inst.flow[e]
    for v in range(g.n):
        if inst.source[v] < 0 or not 0 <= inst.absorbed[v] <= inst.sink_total[v]:
            return False
        if balance[v] - inst.absorbed[v] < 0:
            return False
    return True


def is_phi_over_six_expander(G: Graph, phi: PhiLike) -> bool:
    return brute_force_expansion(G, _phi_exact(phi) / 6).is_expander
