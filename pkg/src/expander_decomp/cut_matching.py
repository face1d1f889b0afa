"""Cut-or-match flow routine and the cut-matching game built on it.

The matching player routes unit sources on ``S`` to unit sinks on ``T`` with
the bounded-height push-relabel engine and either embeds a matching or
exposes a sparse level cut. The cut player is the usual random-projection
player: it keeps the lazy random-walk embedding implicitly as the list of
matchings played so far and bisects at the median of a random projection.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .graph_core import Graph, SetLike, VertexSet, _members, cut_edges, degree_reduce, induced_subgraph
from .trimming import PhiLike, as_phi, edge_capacity, level_cut
from .unit_flow import FlowContractError, FlowInstance, LevelState, UnitFlowEngine, excess, log2_ceil

log = logging.getLogger(__name__)

MAX_MATCHING_DEGREE = 16
# copies of one vertex are tied by 7-fold cycle edges: degree 15 <= 16
CYCLE_MULTIPLICITY = 7
# the matching player runs at MATCH_SCALE * phi
MATCH_SCALE = 4


@dataclass
class MatchResult:
    paths: list[list[int]]
    matching: list[tuple[int, int]]
    cut: VertexSet
    congestion: int
    h: int = 0
    iterations: int = 0
    level_cut_j: int = -1
    unsettled: int = 0
    dropped: int = 0


@dataclass
class CutMatchResult:
    cut: VertexSet
    sparsity_ok: bool
    balanced: bool
    rounds: int = 0
    sweeps: int = 0
    potential: float = 0.0
    cuts_found: int = 0


def matching_height(phi: Fraction, m: int) -> int:
    """``ceil(100 * log2(max(m, 2)) / phi)``."""
    return math.ceil(100 * math.log2(max(m, 2)) / float(phi))


def _walk_edges(G: Graph, path: Sequence[int], eids: Optional[Sequence[int]] = None):
    if eids is not None:
        return list(eids)
    out = []
    for a, b in zip(path, path[1:]):
        for w, e in G.adjacency[a]:
            if w == b:
                out.append(e)
                break
    return out


def path_decompose(inst: FlowInstance, drop_fraction: float = 0.0,
                   h: Optional[int] = None, with_status: bool = False,
                   keep_ends: frozenset = frozenset()):
    """Split an integral flow into source-to-sink unit paths.

    A unit leaving a source is followed along edges with remaining flow until
    it reaches a vertex that absorbed mass (a matched path) or one holding
    excess (an unmatched walk, only reported when ``with_status`` is set).
    Cycles met on the way are cancelled, so every path is simple. Because
    the flow is a net flow, no edge is used in both directions, which is the
    state tail-swapping produces.

    With ``drop_fraction > 0``, matched paths longer than
    ``ceil((h + 1) / drop_fraction)`` are discarded, longest first, but never
    more than ``floor(drop_fraction * len(paths))`` of them. Paths ending
    in ``keep_ends`` are never dropped.
    """
    g = inst.graph
    for x in inst.flow:
        if not isinstance(x, (int, np.integer)):
            raise FlowContractError("path decomposition needs an integral flow")
    ex = excess(inst)
    rem = list(inst.flow)
    # per-vertex out-edges with positive remaining flow, in adjacency order
    stay = [min(inst.source[v], ex[v]) for v in range(g.n)]
    launch = [inst.source[v] - stay[v] for v in range(g.n)]
    good = list(inst.absorbed)
    bad = [ex[v] - stay[v] for v in range(g.n)]
    tail = [a for a, _ in g.edges]
    ptr = [0] * g.n

    def out_from(v):
        adj = g.adjacency[v]
        while ptr[v] < len(adj):
            w, e = adj[ptr[v]]
            f = rem[e] if tail[e] == v else -rem[e]
            if f > 0:
                return w, e
            ptr[v] += 1
        return None

    def take(v, e, amount):
        if tail[e] == v:
            rem[e] -= amount
        else:
            rem[e] += amount

    matched: list[list[int]] = []
    unmatched: list[list[int]] = []
    for s in range(g.n):
        for _ in range(launch[s]):
            walk = [s]
            edges: list[int] = []
            pos = {s: 0}
            v = s
            while True:
                if v != s and (good[v] > 0 or bad[v] > 0):
                    break
                nxt = out_from(v)
                if nxt is None:
                    raise FlowContractError(f"flow conservation broken at vertex {v}")
                w, e = nxt
                take(v, e, 1)
                if w in pos:
                    # cancel the cycle w -> ... -> v -> w
                    k = pos[w]
                    for u in walk[k + 1:]:
                        del pos[u]
                    del walk[k + 1:]
                    del edges[k:]
                    v = w
                    continue
                walk.append(w)
                edges.append(e)
                pos[w] = len(walk) - 1
                v = w
            if good[v] > 0:
                good[v] -= 1
                matched.append(walk)
            else:
                bad[v] -= 1
                unmatched.append(walk)
    dropped = 0
    if drop_fraction > 0 and matched:
        limit = math.ceil(((h if h is not None else g.n) + 1) / drop_fraction)
        budget = math.floor(drop_fraction * len(matched))
        order = sorted(range(len(matched)), key=lambda i: (-len(matched[i]), i))
        gone = set()
        for i in order:
            if dropped >= budget or len(matched[i]) - 1 <= limit:
                break
            if matched[i][-1] in keep_ends:
                continue
            gone.add(i)
            dropped += 1
        matched = [p for i, p in enumerate(matched) if i not in gone]
    if with_status:
        return matched, unmatched, dropped
    return matched


def _loop_erase(path: list[int]) -> list[int]:
    out: list[int] = []
    pos: dict[int, int] = {}
    for v in path:
        if v in pos:
            k = pos[v]
            for u in out[k + 1:]:
                del pos[u]
            del out[k + 1:]
        else:
            pos[v] = len(out)
            out.append(v)
    return out


def untangle_paths(paths: Sequence[Sequence[int]]) -> list[list[int]]:
    """Swap tails wherever two paths cross one edge in opposite directions.

    If ``P = A, u, v, B`` and ``Q = C, v, u, D`` then they become ``A, u, D``
    and ``C, v, B`` (loops erased). Every path keeps its start; the multiset
    of end vertices is preserved, and each swap shortens the total length.
    """
    ps = [list(p) for p in paths]
    while True:
        seen: dict[tuple[int, int], tuple[int, int]] = {}
        hit = None
        for pi, p in enumerate(ps):
            for k in range(len(p) - 1):
                u, v = p[k], p[k + 1]
                other = seen.get((v, u))
                if other is not None and other[0] != pi:
                    hit = (other, (pi, k))
                    break
                seen.setdefault((u, v), (pi, k))
            if hit:
                break
        if hit is None:
            return ps
        (pi, i), (qi, k) = hit
        P, Q = ps[pi], ps[qi]
        # P goes u -> v at i, Q goes v -> u at k
        ps[pi] = _loop_erase(P[:i + 1] + Q[k + 2:])
        ps[qi] = _loop_erase(Q[:k + 1] + P[i + 2:])


def congestion_of(G: Graph, paths: Sequence[Sequence[int]]) -> int:
    use: Counter = Counter()
    for p in paths:
        for a, b in zip(p, p[1:]):
            use[(min(a, b), max(a, b))] += 1
    if not use:
        return 0
    # parallel edges share the load of their vertex pair
    mult = Counter((min(a, b), max(a, b)) for a, b in G.edges)
    return max(math.ceil(c / mult[k]) for k, c in use.items())


def parallel_matching(G: Graph, S: SetLike, T: SetLike, phi: PhiLike,
                      h: Optional[int] = None, gap_lift: bool = True,
                      early_stop: bool = True) -> MatchResult:
    """Route one unit from each vertex of ``S`` towards distinct vertices of ``T``.

    Returns the embedded paths, the induced matching and a cut ``C`` made of
    the sparse level cut and every source left unmatched. Vertices in both
    ``S`` and ``T`` match themselves with a zero-length path.

    The flow stops once ``16 * unsettled < phi * m`` and the leftover sources
    join the cut. With ``early_stop=False`` it runs until nothing is
    unsettled.
    """
    q = as_phi(phi)
    if G.max_degree() > MAX_MATCHING_DEGREE:
        raise FlowContractError(f"matching player needs max degree <= {MAX_MATCHING_DEGREE}")
    Sm, Tm = set(_members(S)), set(_members(T))
    if len(Sm) > len(Tm):
        raise FlowContractError("need |S| <= |T|")
    both = Sm & Tm
    self_paths = [[v] for v in sorted(both)]
    Sm -= both
    Tm -= both
    c = edge_capacity(q)
    if h is None:
        h = matching_height(q, G.m)
    source = [1 if v in Sm else 0 for v in range(G.n)]
    sink = [1 if v in Tm else 0 for v in range(G.n)]
    inst = FlowInstance.zero(G, [c] * G.m, source, sink)
    lvl = LevelState.zeros(G.n, h)
    eng = UnitFlowEngine(inst, lvl, gap_lift=gap_lift)
    iterations = 0
    while True:
        u = eng.unsettled()
        if u == 0 or (early_stop and 16 * u < q * G.m):
            break
        iterations += eng.step(sink)
    unsettled = eng.unsettled()
    for v in range(G.n):
        if lvl.level[v] == h + 1:
            lvl.level[v] = h
    cut: set[int] = set()
    j = -1
    if any(x == h for x in lvl.level):
        lc = level_cut(G, inst, lvl, h, coeff=float(q) / 4)
        cut = set(lc.vertices.members)
        j = lc.j
    # a dropped path ending in the level cut would leave an unmatched sink in C
    matched, _, dropped = path_decompose(inst, float(q), h, with_status=True,
                                         keep_ends=frozenset(cut))
    matched = untangle_paths(matched)
    starts = {p[0] for p in matched}
    unmatched_sources = {v for v in Sm if v not in starts}
    cut |= unmatched_sources
    paths = self_paths + matched
    matching = [(p[0], p[-1]) for p in paths]
    return MatchResult(paths, matching, VertexSet(G, frozenset(cut)), congestion_of(G, matched),
                       h, iterations, j, unsettled, dropped)


def _project(u: np.ndarray, matchings: Sequence[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    """Apply the lazy walk ``M_t ... M_1`` to ``u`` (each step averages pairs)."""
    for a, b in matchings:
        avg = (u[a] + u[b]) / 2
        u[a] = avg
        u[b] = avg
    return u


def cut_matching(G: Graph, phi: PhiLike, seed=None, rounds: Optional[int] = None,
                 match_phi: Optional[PhiLike] = None, sketch_dim: int = 24,
                 mix_tol: Optional[float] = None) -> CutMatchResult:
    """Play the cut-matching game on ``G`` and return a sparse cut ``C``.

    Every vertex of degree at least 2 is split into a cycle of copies, one
    per incident edge and joined by 7-fold parallel cycle edges, so that each unit of the matching game stands for one
    unit of volume. The matching player runs at ``match_phi`` (default
    ``min(4 * phi, 99/100)``), which gives capacity about ``1/(2 phi)``.

    The game stops early once a cut of volume above ``m/100`` is found, or
    when the walk embedding has mixed (estimated potential below
    ``mix_tol``, default ``1 / (4 n^2)`` over the split graph).
    """
    q = as_phi(phi)
    qm = as_phi(match_phi) if match_phi is not None else min(MATCH_SCALE * q, Fraction(99, 100))
    rng = np.random.default_rng(seed)
    L = log2_ceil(G.n)
    empty = VertexSet.empty(G)
    if G.n <= 1 or G.m == 0:
        return CutMatchResult(empty, True, False)
    red = degree_reduce(G, max_degree=1, cycle_multiplicity=CYCLE_MULTIPLICITY)
    H = red.reduced
    if rounds is None:
        rounds = log2_ceil(H.n) ** 2
    removed: set[int] = set()  # original vertices cut off so far
    played = 0
    sweeps = 0
    found = 0
    potential = float("nan")
    while played < rounds:
        alive_orig = [v for v in range(G.n) if v not in removed]
        if len(alive_orig) <= 1:
            break
        sub = induced_subgraph(H, red.lift_set(alive_orig))
        Hs = sub.graph
        if Hs.m == 0:
            break
        n_s = Hs.n
        tol = mix_tol if mix_tol is not None else 1.0 / (4.0 * n_s * n_s)
        R = rng.standard_normal((n_s, sketch_dim))
        col_mean = R.mean(axis=0)
        matchings: list[tuple[np.ndarray, np.ndarray]] = []
        restart = False
        while played < rounds:
            played += 1
            u = _project(rng.standard_normal(n_s), matchings)
            order = np.lexsort((np.arange(n_s), u))
            half = n_s // 2
            S = [int(x) for x in order[:half]]
            T = [int(x) for x in order[half:]]
            res = parallel_matching(Hs, S, T, qm, early_stop=False)
            sweeps += res.iterations
            if res.matching:
                a = np.array([x for x, _ in res.matching], dtype=np.intp)
                b = np.array([y for _, y in res.matching], dtype=np.intp)
                keep = a != b
                matchings.append((a[keep], b[keep]))
                R_a, R_b = R[a[keep]], R[b[keep]]
                avg = (R_a + R_b) / 2
                R[a[keep]] = avg
                R[b[keep]] = avg
            potential = float(((R - col_mean) ** 2).sum() / sketch_dim)
            if res.cut:
                cut_orig = sweep_project(G, red, sub.lift(res.cut.members), frozenset(removed))
                if cut_orig and len(cut_orig) < len(alive_orig):
                    found += 1
                    removed |= cut_orig
                    if _volume(G, removed) > G.m / 100:
                        break
                    restart = True
                    break
            if potential <= tol:
                break
        if not restart:
            break
    C = set(removed)
    if C and 2 * _volume(G, C) > 2 * G.m:
        C = set(range(G.n)) - C
    cut = VertexSet(G, frozenset(C))
    crossing = cut_edges(G, cut)
    sparsity_ok = (not C) or crossing < q * G.m / (64 * L * L)
    balanced = cut.volume > Fraction(G.m, 100)
    return CutMatchResult(cut, sparsity_ok, balanced, played, sweeps, potential, found)


def sweep_project(G: Graph, red, copies_in: frozenset[int], exclude=frozenset()) -> frozenset[int]:
    """Round a set of copies to original vertices by a threshold sweep.

    Each vertex gets the fraction of its copies inside ``copies_in``. Every
    distinct positive fraction is tried as a threshold, and the set with the
    smallest ``cut / min(vol, vol of rest)`` in ``G`` wins (ties go to the
    higher threshold). Vertices in ``exclude`` are never selected and are
    treated as already removed when measuring the cut.
    """
    frac: dict[int, Fraction] = {}
    for v, cs in enumerate(red.fwd):
        if v in exclude or not cs:
            continue
        k = sum(1 for c in cs if c in copies_in)
        if k:
            frac[v] = Fraction(k, len(cs))
    alive = [v for v in range(G.n) if v not in exclude]
    alive_set = set(alive)
    total = sum(G.deg[v] for v in alive)
    best, best_key = frozenset(), None
    for t in sorted(set(frac.values()), reverse=True):
        cand = frozenset(v for v, f in frac.items() if f >= t)
        if len(cand) >= len(alive):
            continue
        vol = _volume(G, cand)
        small = min(vol, total - vol)
        if small == 0:
            continue
        crossing = sum(1 for a, b in G.edges
                       if a in alive_set and b in alive_set and (a in cand) != (b in cand))
        key = Fraction(crossing, small)
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best


def _volume(G: Graph, S) -> int:
    return sum(G.deg[v] for v in S)
