"""Recursive expander decomposition: cut-match, branch on balance, trim, recurse."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .cut_matching import cut_matching
from .graph_core import Graph, VertexSet, connected_components, induced_subgraph
from .trimming import PhiLike, TrimResult, as_phi, certify_expander, trim
from .verify import check_flow_feasible

log = logging.getLogger(__name__)


class PartitionError(ValueError):
    """A partition does not cover the vertex set exactly once."""


@dataclass
class DecompStats:
    cut_matching_calls: int = 0
    cut_matching_rounds: int = 0
    trim_calls: int = 0
    trim_iterations: int = 0
    sweeps: int = 0
    max_depth: int = 0
    fallbacks: int = 0

    def merge(self, other: "DecompStats") -> None:
        self.cut_matching_calls += other.cut_matching_calls
        self.cut_matching_rounds += other.cut_matching_rounds
        self.trim_calls += other.trim_calls
        self.trim_iterations += other.trim_iterations
        self.sweeps += other.sweeps
        self.max_depth = max(self.max_depth, other.max_depth)
        self.fallbacks += other.fallbacks


@dataclass
class ClusterCertificate:
    """A trimming certificate together with the piece it was computed on."""

    host: Graph = field(repr=False)
    host_vertices: tuple[int, ...]  # host id -> top-level id
    trim: TrimResult = field(repr=False)

    def check(self, phi: PhiLike) -> bool:
        inv = {v: i for i, v in enumerate(self.host_vertices)}
        local = [inv[v] for v in self.trim_members()]
        return (check_flow_feasible(self.trim.certificate)
                and certify_expander(self.host, local, self.trim.certificate, phi))

    def trim_members(self) -> list[int]:
        return [self.host_vertices[v] for v in sorted(self.trim.A_prime.members)]


@dataclass
class Partition:
    cluster_of: list[int]
    clusters: list[VertexSet]
    error_edges: int
    certificates: list[Optional[ClusterCertificate]] = field(default_factory=list, repr=False)
    stats: DecompStats = field(default_factory=DecompStats)
    diagnostics: list[str] = field(default_factory=list)

    @classmethod
    def from_clusters(cls, G: Graph, groups: Sequence[Sequence[int]], **kw) -> "Partition":
        """Clusters are renumbered by smallest member."""
        groups = sorted((sorted(g) for g in groups if len(g)), key=lambda g: g[0])
        cluster_of = [-1] * G.n
        for cid, g in enumerate(groups):
            for v in g:
                if cluster_of[v] != -1:
                    raise PartitionError(f"vertex {v} is in two clusters")
                cluster_of[v] = cid
        if any(c == -1 for c in cluster_of):
            raise PartitionError("clusters do not cover every vertex")
        clusters = [VertexSet.of(G, g) for g in groups]
        p = cls(cluster_of, clusters, 0, **kw)
        p.error_edges = measure_error(G, p)
        return p


def measure_error(G: Graph, p: Union[Partition, Sequence[int]]) -> int:
    """Number of edges whose endpoints lie in different clusters."""
    cluster_of = p.cluster_of if isinstance(p, Partition) else list(p)
    if len(cluster_of) != G.n or any(c is None or c < 0 for c in cluster_of):
        raise PartitionError("partition does not cover every vertex")
    return sum(1 for a, b in G.edges if cluster_of[a] != cluster_of[b])


def depth_bound(m: int) -> int:
    """``2 * ceil(log_{100/99} m) + 1``."""
    if m <= 1:
        return 1
    return 2 * math.ceil(math.log(m) / math.log(100 / 99)) + 1


@dataclass
class _Task:
    vertices: tuple[int, ...]  # ids in the top-level graph
    depth: int
    seed: np.random.SeedSequence


def _decompose_component(G: Graph, vertices: Sequence[int], phi, seed: np.random.SeedSequence,
                         depth0: int, limit: int):
    """Worklist version of the recursion on ``G[vertices]``; returns (clusters, certs, stats, diag)."""
    clusters: list[list[int]] = []
    certs: list[Optional[ClusterCertificate]] = []
    stats = DecompStats()
    diag: list[str] = []
    work = [_Task(tuple(vertices), depth0, seed)]
    while work:
        task = work.pop()
        stats.max_depth = max(stats.max_depth, task.depth)
        if task.depth > limit:
            raise RuntimeError(f"recursion depth {task.depth} exceeds bound {limit}")
        sub = induced_subgraph(G, task.vertices)
        H = sub.graph
        lift = sub.vertices
        if H.m == 0:
            for v in lift:
                clusters.append([v])
                certs.append(None)
            continue
        comps = connected_components(H)
        if len(comps) > 1:
            for comp, child in zip(comps, task.seed.spawn(len(comps))):
                work.append(_Task(tuple(lift[v] for v in comp), task.depth, child))
            continue
        s_cut, s_left, s_right = task.seed.spawn(3)
        res = cut_matching(H, phi, seed=s_cut)
        stats.cut_matching_calls += 1
        stats.cut_matching_rounds += res.rounds
        stats.sweeps += res.sweeps
        C = set(res.cut.members)
        rest = [v for v in range(H.n) if v not in C]
        if C and res.balanced:
            work.append(_Task(tuple(lift[v] for v in sorted(C)), task.depth + 1, s_left))
            work.append(_Task(tuple(lift[v] for v in rest), task.depth + 1, s_right))
            continue
        tr = trim(H, rest, phi)
        stats.trim_calls += 1
        stats.trim_iterations += tr.iterations
        stats.sweeps += tr.sweeps
        diag.extend(tr.diagnostics)
        A = sorted(tr.A_prime.members)
        if not A:
            stats.fallbacks += 1
            msg = f"trim returned an empty set on a {H.n}-vertex piece; splitting along the cut"
            log.warning(msg)
            diag.append(msg)
            work.append(_Task(tuple(lift[v] for v in sorted(C)), task.depth + 1, s_left))
            work.append(_Task(tuple(lift[v] for v in rest), task.depth + 1, s_right))
            continue
        clusters.append([lift[v] for v in A])
        certs.append(ClusterCertificate(H, lift, tr))
        if len(A) < H.n:
            keep = set(A)
            work.append(_Task(tuple(lift[v] for v in range(H.n) if v not in keep),
                              task.depth + 1, s_right))
    return clusters, certs, stats, diag


def compute_exp_decomp(G: Graph, phi: PhiLike, seed=None, threads: int = 1) -> Partition:
    """Partition ``V`` into clusters that each induce an expander.

    Components are split off first. On each connected piece the cut-matching
    game either finds a balanced cut (recurse on both sides) or a small one,
    in which case the rest is trimmed to a certified expander that becomes a
    cluster and the remainder is decomposed again. ``threads > 1`` processes
    top-level components concurrently; the output does not depend on it.
    """
    q = as_phi(phi)
    limit = depth_bound(G.m)
    root = np.random.SeedSequence(seed)
    comps = connected_components(G)
    seeds = root.spawn(len(comps))
    jobs = list(zip(comps, seeds))

    def run(job):
        comp, s = job
        return _decompose_component(G, comp, q, s, 0, limit)

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    groups: list[list[int]] = []
    certs: list[Optional[ClusterCertificate]] = []
    stats = DecompStats()
    diag: list[str] = []
    for cl, ce, st, dg in results:
        groups.extend(cl)
        certs.extend(ce)
        stats.merge(st)
        diag.extend(dg)
    # keep certificates aligned with the renumbered clusters
    order = sorted(range(len(groups)), key=lambda i: min(groups[i]))
    groups = [groups[i] for i in order]
    certs = [certs[i] for i in order]
    return Partition.from_clusters(G, groups, certificates=certs, stats=stats, diagnostics=diag)
