"""Height-bounded integral push-relabel ("unit flow") with staged sink growth.

Flows are signed per edge relative to the orientation ``graph.edges[e] = (a, b)``:
positive values move mass from ``a`` to ``b``. Levels live in ``0..h+1``;
a vertex at level ``h + 1`` is *settled* and never pushes again.

The per-level push step only moves mass from level ``j`` to level ``j - 1``,
and each edge is touched by its upper endpoint only, so the result of a sweep
does not depend on the order in which same-level vertices are handled. The
engine therefore runs the level loop sequentially and deterministically.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .graph_core import Graph


class FlowContractError(ValueError):
    """Raised on infeasible flow instances or violated preconditions."""


def log2_ceil(n: int) -> int:
    """``ceil(log2(max(n, 2)))``; the logarithm used for every schedule."""
    return max(1, math.ceil(math.log2(max(n, 2))))


@dataclass
class FlowInstance:
    """Residual flow instance ``(G, cap, flow, source, sink_total)`` plus absorbed mass."""

    graph: Graph
    cap: list[int]
    flow: list[int]
    source: list[int]
    sink_total: list[int]
    absorbed: list[int]

    @classmethod
    def zero(cls, graph: Graph, cap: Sequence[int], source: Sequence[int],
             sink: Sequence[int]) -> "FlowInstance":
        return cls(graph, [int(c) for c in cap], [0] * graph.m,
                   [int(x) for x in source], [int(x) for x in sink], [0] * graph.n)

    def copy(self) -> "FlowInstance":
        return FlowInstance(self.graph, list(self.cap), list(self.flow), list(self.source),
                            list(self.sink_total), list(self.absorbed))

    def net_inflow(self) -> list[int]:
        inflow = [0] * self.graph.n
        for e, (a, b) in enumerate(self.graph.edges):
            f = self.flow[e]
            inflow[a] -= f
            inflow[b] += f
        return inflow

    def residual(self, u: int, e: int) -> int:
        """Remaining capacity of edge ``e`` in the direction leaving ``u``."""
        a, _ = self.graph.edges[e]
        return self.cap[e] - self.flow[e] if u == a else self.cap[e] + self.flow[e]

    def flow_from(self, u: int, e: int) -> int:
        a, _ = self.graph.edges[e]
        return self.flow[e] if u == a else -self.flow[e]


@dataclass
class LevelState:
    level: list[int]
    h: int

    @classmethod
    def zeros(cls, n: int, h: int) -> "LevelState":
        return cls([0] * n, h)

    @property
    def settled(self) -> int:
        return self.h + 1


@dataclass
class UnitFlowStats:
    """Counters collected by one unit-flow run."""

    stage_sweeps: list[int] = field(default_factory=list)
    sweeps: int = 0
    pushes: int = 0
    relabels: int = 0
    overflow_sweeps: int = 0
    gap_lifts: int = 0


def excess(inst: FlowInstance) -> list[int]:
    """Per-vertex unrouted mass: source plus net inflow minus absorbed.

    Raises FlowContractError when the flow is infeasible, when a vertex has
    absorbed more than its sink allows, or when the balance is negative.
    """
    g = inst.graph
    if len(inst.cap) != g.m or len(inst.flow) != g.m:
        raise FlowContractError("capacity/flow vectors must have one entry per edge")
    if any(len(x) != g.n for x in (inst.source, inst.sink_total, inst.absorbed)):
        raise FlowContractError("vertex vectors must have one entry per vertex")
    for e in range(g.m):
        if abs(inst.flow[e]) > inst.cap[e]:
            raise FlowContractError(f"edge {e} carries {inst.flow[e]} over capacity {inst.cap[e]}")
    inflow = inst.net_inflow()
    ex = []
    for v in range(g.n):
        if inst.absorbed[v] < 0 or inst.absorbed[v] > inst.sink_total[v]:
            raise FlowContractError(f"vertex {v} absorbed {inst.absorbed[v]} outside [0, {inst.sink_total[v]}]")
        x = inst.source[v] + inflow[v] - inst.absorbed[v]
        if x < 0:
            raise FlowContractError(f"vertex {v} has negative balance {x}")
        ex.append(x)
    return ex


class UnitFlowEngine:
    """Mutable push-relabel state over a FlowInstance and LevelState.

    The instance and level lists are updated in place.
    """

    def __init__(self, inst: FlowInstance, lvl: LevelState, gap_lift: bool = True):
        self.inst = inst
        self.use_gap_lift = gap_lift
        self.lvl = lvl
        g = inst.graph
        self.adj = g.adjacency
        self.tail = [a for a, _ in g.edges]
        self.ex = excess(inst)
        self.stats = UnitFlowStats()
        h = lvl.h
        if len(lvl.level) != g.n:
            raise FlowContractError("level vector must have one entry per vertex")
        if any(not 0 <= x <= h + 1 for x in lvl.level):
            raise FlowContractError("levels must lie in 0..h+1")
        self.active = {v for v in range(g.n) if self.ex[v] > 0 and lvl.level[v] <= h}
        self.settled = {v for v in range(g.n) if self.ex[v] > 0 and lvl.level[v] > h}

    def _res(self, u: int, e: int) -> int:
        cap = self.inst.cap[e]
        f = self.inst.flow[e]
        return cap - f if self.tail[e] == u else cap + f

    def unsettled(self) -> int:
        ex = self.ex
        return sum(ex[v] for v in self.active)

    def total_excess(self) -> int:
        return sum(self.ex)

    def absorb_settled(self, budget: Sequence[int]) -> None:
        """Let settled vertices absorb into any sink budget they still have."""
        absorbed = self.inst.absorbed
        ex = self.ex
        for v in sorted(self.settled):
            room = budget[v] - absorbed[v]
            if room > 0:
                a = min(room, ex[v])
                absorbed[v] += a
                ex[v] -= a
        self.settled = {v for v in self.settled if ex[v] > 0}

    def sweep(self, budget: Sequence[int]) -> None:
        """One PushThenRelabel round: levels ``h..1`` top-down, then relabel."""
        inst, lvl = self.inst, self.lvl
        lev, ex, absorbed, flow, cap, tail = lvl.level, self.ex, inst.absorbed, inst.flow, inst.cap, self.tail
        adj = self.adj
        self.absorb_settled(budget)
        buckets: dict[int, set[int]] = {}
        for v in self.active:
            buckets.setdefault(lev[v], set()).add(v)
        heap = [-j for j in buckets]
        heapq.heapify(heap)
        touched = set(self.active)
        pushes = 0
        while heap:
            j = -heapq.heappop(heap)
            for v in sorted(buckets.pop(j)):
                x = ex[v]
                if x == 0:
                    continue
                room = budget[v] - absorbed[v]
                if room > 0:
                    a = min(room, x)
                    absorbed[v] += a
                    x -= a
                if x == 0 or j == 0:
                    ex[v] = x
                    continue
                for w, e in adj[v]:
                    if lev[w] != j - 1:
                        continue
                    r = cap[e] - flow[e] if tail[e] == v else cap[e] + flow[e]
                    if r <= 0:
                        continue
                    d = r if r < x else x
                    if tail[e] == v:
                        flow[e] += d
                    else:
                        flow[e] -= d
                    x -= d
                    ex[w] += d
                    pushes += 1
                    touched.add(w)
                    b = buckets.get(j - 1)
                    if b is None:
                        buckets[j - 1] = {w}
                        heapq.heappush(heap, -(j - 1))
                    else:
                        b.add(w)
                    if x == 0:
                        break
                ex[v] = x
        h = lvl.h
        raise_list = []
        for v in touched:
            if ex[v] == 0 or lev[v] > h or absorbed[v] < budget[v]:
                continue
            lv = lev[v]
            stuck = True
            for w, e in adj[v]:
                if lev[w] == lv - 1 and (cap[e] - flow[e] if tail[e] == v else cap[e] + flow[e]) > 0:
                    stuck = False
                    break
            if stuck:
                raise_list.append(v)
        for v in raise_list:
            lev[v] = min(lev[v] + 1, h + 1)
        self.stats.pushes += pushes
        self.stats.relabels += len(raise_list)
        self.stats.sweeps += 1
        self.active = {v for v in touched if ex[v] > 0 and lev[v] <= h}
        self.settled |= {v for v in touched if ex[v] > 0 and lev[v] > h}

    def lift_span(self, budget: Sequence[int]) -> int:
        """Number of upcoming sweeps that would only raise every active vertex.

        Returns 0 unless the next sweep performs no absorption and no push.
        """
        if not self.active:
            return 0
        absorbed = self.inst.absorbed
        for v in self.settled:
            if absorbed[v] < budget[v]:
                return 0
        lev, h, active = self.lvl.level, self.lvl.h, self.active
        span = None
        for v in active:
            if absorbed[v] < budget[v]:
                return 0
            lv = lev[v]
            k = h + 1 - lv
            for w, e in self.adj[v]:
                if self._res(v, e) <= 0:
                    continue
                lw = lev[w]
                if lw == lv - 1:
                    return 0
                if w in active:
                    continue
                if lw >= lv and lw - lv + 1 < k:
                    k = lw - lv + 1
            if span is None or k < span:
                span = k
        return span or 0

    def gap_lift(self) -> bool:
        """Raise the highest cut-off segment of levels that holds excess.

        A segment is a maximal run of consecutive occupied levels ``>= 1``
        (among vertices at level ``<= h``) with an empty level just below it.
        Edges from the segment down past the empty level are saturated, so
        its mass can only move inside the segment; raising the whole segment
        until it touches the next occupied level above (or ``h``) keeps the
        saturation and sink-saturation invariants.
        """
        if not self.active:
            return False
        lev, h = self.lvl.level, self.lvl.h
        by_level: dict[int, list[int]] = {}
        for v, x in enumerate(lev):
            if x <= h:
                by_level.setdefault(x, []).append(v)
        levels = sorted(by_level, reverse=True)
        ceiling = h + 1  # lowest occupied level above the current segment
        i = 0
        while i < len(levels):
            top = levels[i]
            k = i
            while k + 1 < len(levels) and levels[k + 1] == levels[k] - 1:
                k += 1
            bottom = levels[k]
            if bottom == 0:
                return False
            seg = [v for t in levels[i:k + 1] for v in by_level[t]]
            if any(v in self.active for v in seg):
                shift = ceiling - 1 - top
                if shift <= 0:
                    return False
                for v in seg:
                    lev[v] += shift
                self.stats.gap_lifts += 1
                return True
            ceiling = bottom
            i = k + 1
        return False

    def step(self, budget: Sequence[int], max_sweeps: Optional[int] = None) -> int:
        """Advance by one sweep, or by a run of pure-lift sweeps at once.

        A run of ``k`` pure-lift sweeps is exactly what ``k`` consecutive
        calls of :meth:`sweep` would do; it is applied in one pass. When gap
        lifting is enabled a cut-off segment is raised first (no sweep).
        Returns the number of sweeps consumed.
        """
        if self.use_gap_lift:
            self.gap_lift()
        k = self.lift_span(budget)
        if max_sweeps is not None:
            k = min(k, max_sweeps)
        if k <= 1:
            self.sweep(budget)
            return 1
        lev, h = self.lvl.level, self.lvl.h
        for v in self.active:
            lev[v] += k
        now_settled = {v for v in self.active if lev[v] > h}
        self.active -= now_settled
        self.settled |= now_settled
        self.stats.relabels += k * len(self.active | now_settled)
        self.stats.sweeps += k
        return k


def push_then_relabel(inst: FlowInstance, lvl: LevelState, stage_sink: Sequence[int]):
    """Run a single PushThenRelabel sweep in place and return ``(inst, lvl)``."""
    for v, s in enumerate(stage_sink):
        if s > inst.sink_total[v]:
            raise FlowContractError(f"stage sink {s} at vertex {v} exceeds sink total {inst.sink_total[v]}")
    UnitFlowEngine(inst, lvl).sweep(stage_sink)
    return inst, lvl


def staged_budget(base: Sequence[int], total: Sequence[int], stage: int, stages: int) -> list[int]:
    """Cumulative sink budget ``base + ceil(stage * (total - base) / stages)``."""
    return [b + -((-stage * (t - b)) // stages) for b, t in zip(base, total)]


def run_staged(engine: UnitFlowEngine, base: Sequence[int], total: Sequence[int],
               stages: int, observer: Optional[Callable[[UnitFlowEngine], None]] = None,
               max_sweeps: Optional[int] = None) -> UnitFlowStats:
    """Stage loop of ParallelUnitFlow on an existing engine.

    Stage ``i`` grants the budget ``staged_budget(base, total, i, stages)`` and
    sweeps while the unsettled excess is at least half of its value at the
    start of the stage. If unsettled mass survives every stage (possible only
    when the size preconditions fail) the loop keeps sweeping at full budget;
    such sweeps are counted in ``overflow_sweeps``.

    ``observer(engine)`` is called after every step; with ``max_sweeps=1``
    each step is a single sweep.
    """
    stats = engine.stats
    for i in range(1, stages + 1):
        budget = staged_budget(base, total, i, stages)
        engine.absorb_settled(budget)
        x = engine.unsettled()
        sweeps = 0
        while True:
            u = engine.unsettled()
            if u == 0 or 2 * u < x:
                break
            sweeps += engine.step(budget, max_sweeps)
            if observer is not None:
                observer(engine)
        stats.stage_sweeps.append(sweeps)
        engine.absorb_settled(budget)
    budget = list(total)
    while engine.unsettled() > 0:
        stats.overflow_sweeps += engine.step(budget, max_sweeps)
        if observer is not None:
            observer(engine)
    engine.absorb_settled(budget)
    h = engine.lvl.h
    lev = engine.lvl.level
    for v in range(len(lev)):
        if lev[v] == h + 1:
            lev[v] = h
    return stats


@dataclass
class UnitFlowResult:
    inst: FlowInstance
    levels: LevelState
    stats: UnitFlowStats

    @property
    def flow(self) -> list[int]:
        return self.inst.flow

    @property
    def level(self) -> list[int]:
        return self.levels.level


def parallel_unit_flow(G: Graph, cap: Sequence[int], source: Sequence[int],
                       sink: Sequence[int], h: int, eta: Optional[int] = None,
                       gap_lift: bool = True, fast_forward: bool = True,
                       observer: Optional[Callable[[UnitFlowEngine], None]] = None) -> UnitFlowResult:
    """Staged bounded-height unit flow from zero flow and all-zero levels.

    Runs ``8 * log2_ceil(n)`` stages. On return every settled vertex is moved
    back to level ``h`` and, for vertices with nonzero sink, a positive level
    implies ``absorbed >= ceil(sink / (8 * log2_ceil(n)))``.

    ``eta`` defaults to the largest capacity; the preconditions
    ``sum(source) <= 2m``, ``source[v] <= eta * deg(v)`` and
    ``max(cap) <= eta`` are checked before any work.
    """
    if h < 1:
        raise FlowContractError("height bound must be at least 1")
    if len(cap) != G.m or len(source) != G.n or len(sink) != G.n:
        raise FlowContractError("vector lengths do not match the graph")
    if any(c < 0 for c in cap) or any(x < 0 for x in source) or any(x < 0 for x in sink):
        raise FlowContractError("capacities, sources and sinks must be nonnegative")
    if eta is None:
        eta = max(cap, default=0)
    if max(cap, default=0) > eta:
        raise FlowContractError("capacity exceeds eta")
    if sum(source) > 2 * G.m:
        raise FlowContractError("total source exceeds 2m")
    for v in range(G.n):
        if source[v] > eta * G.deg[v]:
            raise FlowContractError(f"source at vertex {v} exceeds eta * deg")
    inst = FlowInstance.zero(G, cap, source, sink)
    lvl = LevelState.zeros(G.n, h)
    engine = UnitFlowEngine(inst, lvl, gap_lift=gap_lift)
    stats = run_staged(engine, [0] * G.n, inst.sink_total, 8 * log2_ceil(G.n),
                       observer=observer, max_sweeps=None if fast_forward else 1)
    return UnitFlowResult(inst, lvl, stats)


def sweep_bound(G: Graph, sink: Sequence[int], eta: int, h: int) -> float:
    """Per-stage sweep ceiling ``64 * eta * h * log2_ceil(n) / gamma + 1``.

    ``gamma`` is the smallest sink-to-degree ratio; it is infinite-safe:
    a zero ratio yields an infinite bound.
    """
    ratios = [sink[v] / G.deg[v] for v in range(G.n) if G.deg[v] > 0]
    gamma = min(ratios, default=1.0)
    if gamma <= 0:
        return math.inf
    return 64 * eta * h * log2_ceil(G.n) / gamma + 1
