"""Command line: decompose, gen, verify, bench.

Exit codes: 0 success, 1 input or usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .decomposition import Partition, PartitionError, compute_exp_decomp, measure_error
from .generators import dumbbell, path_graph, random_regular, ring_of_cliques
from .graph_core import Graph, GraphFormatError, dump_edge_list, induced_subgraph, load_edge_list
from .trimming import as_phi
from .verify import brute_force_expansion

log = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 20
BENCH_HEADER = ["graph", "n", "m", "phi", "error", "error/m", "sweeps", "rounds", "wall-ms", "seed"]


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    n: int
    m: int
    phi: float
    seed: Optional[int]
    clusters: int
    error_edges: int
    error_fraction: float
    cut_matching_rounds: int
    trim_iterations: int
    unit_flow_sweeps: int
    wall_time_s: float
    verified: Optional[bool] = None
    diagnostics: list[str] = field(default_factory=list)


def _phi_arg(text: str) -> float:
    try:
        value = float(text)
        as_phi(value)
    except ValueError:
        raise UsageError(f"--phi must be a number in (0, 1), got {text!r}")
    return value


def _read_graph(path: str) -> Graph:
    try:
        with open(path) as fh:
            return load_edge_list(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    except GraphFormatError as exc:
        raise UsageError(f"{path}: {exc}")


def format_partition(G: Graph, p: Partition) -> str:
    return "".join(f"{G.label(v)}\t{p.cluster_of[v]}\n" for v in range(G.n))


def verify_partition(G: Graph, p: Partition, phi: float, limit: int = BRUTE_FORCE_LIMIT,
                     strict: bool = False) -> dict:
    """Audit clusters: brute force up to ``limit`` vertices, certificates otherwise.

    The brute-force threshold is ``phi / 6``, or ``phi`` itself with ``strict``.
    """
    q = Fraction(repr(phi))
    threshold = q if strict else q / 6
    rows = []
    ok = True
    certs = p.certificates or [None] * len(p.clusters)
    for cid, (cl, cert) in enumerate(zip(p.clusters, certs)):
        row = {"cluster": cid, "size": cl.size}
        if cl.size <= limit:
            sub = induced_subgraph(G, cl.members).graph
            rep = brute_force_expansion(sub, threshold)
            row["brute_force"] = rep.is_expander
            row["phi_star"] = None if rep.phi_star is None else str(rep.phi_star)
            ok &= rep.is_expander
        elif cert is not None:
            good = cert.check(phi) and set(cert.trim_members()) == set(cl.members)
            row["certificate"] = good
            ok &= good
        else:
            row["unchecked"] = True
        rows.append(row)
    error = measure_error(G, p)
    return {"ok": bool(ok), "error_edges": error, "threshold": str(threshold), "clusters": rows}


def cmd_decompose(args) -> int:
    phi = _phi_arg(args.phi)
    G = _read_graph(args.input)
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    t0 = time.perf_counter()
    p = compute_exp_decomp(G, phi, seed=args.seed, threads=threads)
    wall = time.perf_counter() - t0
    verified = None
    if args.verify or G.n <= BRUTE_FORCE_LIMIT:
        verified = verify_partition(G, p, phi)["ok"]
    st = p.stats
    report = RunReport(G.n, G.m, phi, args.seed, len(p.clusters), p.error_edges,
                       p.error_edges / G.m if G.m else 0.0, st.cut_matching_rounds,
                       st.trim_iterations, st.sweeps, round(wall, 6), verified, p.diagnostics)
    text = format_partition(G, p)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(asdict(report), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 2 if verified is False else 0


def generate(kind: str, k: Optional[int] = None, s: Optional[int] = None, n: Optional[int] = None,
             d: Optional[int] = None, seed: int = 0) -> Graph:
    def need(**vals):
        for name, v in vals.items():
            if v is None:
                raise UsageError(f"{kind} needs --{name}")

    try:
        if kind == "ring-of-cliques":
            need(k=k, s=s)
            return ring_of_cliques(k, s)
        if kind == "dumbbell":
            need(s=s)
            return dumbbell(s)
        if kind == "path":
            need(n=n)
            return path_graph(n)
        if kind == "random-regular":
            need(n=n, d=d)
            return random_regular(d, n, seed=seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    raise UsageError(f"unknown graph kind {kind!r}")


def cmd_gen(args) -> int:
    G = generate(args.kind, args.k, args.s, args.n, args.d, args.seed)
    text = dump_edge_list(G)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def read_partition(G: Graph, path: str) -> Partition:
    index = {G.label(v): v for v in range(G.n)}
    cluster_of: list[Optional[int]] = [None] * G.n
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise UsageError(f"{path}:{lineno}: expected 'vertex<TAB>cluster'")
        label, cid = parts
        if label not in index:
            raise UsageError(f"{path}:{lineno}: unknown vertex {label!r}")
        try:
            cluster_of[index[label]] = int(cid)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: cluster id must be an integer")
    missing = [G.label(v) for v in range(G.n) if cluster_of[v] is None]
    if missing:
        raise UsageError(f"partition misses {len(missing)} vertices, e.g. {missing[0]}")
    groups: dict[int, list[int]] = {}
    for v, c in enumerate(cluster_of):
        groups.setdefault(c, []).append(v)
    try:
        return Partition.from_clusters(G, list(groups.values()))
    except PartitionError as exc:
        raise UsageError(str(exc))


def cmd_verify(args) -> int:
    phi = _phi_arg(args.phi)
    G = _read_graph(args.graph)
    p = read_partition(G, args.partition)
    verdict = verify_partition(G, p, phi, strict=args.strict)
    print(json.dumps(verdict, sort_keys=True))
    return 0 if verdict["ok"] else 2


def _parse_list(text: str, conv, name: str):
    try:
        return [conv(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad value list for --{name}: {text!r}")


def bench_graphs(suite: str, sizes: Sequence[str], seed: int):
    """Yield ``(name, graph)`` for a named suite; ``sizes`` are ``KxS`` or ``N`` tokens."""
    for tok in sizes:
        if "x" in tok:
            a, b = (int(x) for x in tok.split("x"))
        else:
            a = b = int(tok)
        if suite == "ring":
            yield f"ring-{a}x{b}", ring_of_cliques(a, b)
        elif suite == "dumbbell":
            yield f"dumbbell-{a}", dumbbell(a)
        elif suite == "regular":
            d = b if "x" in tok else 4
            yield f"regular-{a}-d{d}", random_regular(d, a, seed=seed)
        elif suite == "path":
            yield f"path-{a}", path_graph(a)
        else:
            raise UsageError(f"unknown suite {suite!r}")


def run_bench(suite: str, phis: Sequence[float], sizes: Sequence[str], seed: int = 0,
              seeds: int = 1, threads: int = 1) -> list[list]:
    rows = []
    for name, G in bench_graphs(suite, sizes, seed):
        for phi in phis:
            for s in range(seed, seed + seeds):
                t0 = time.perf_counter()
                p = compute_exp_decomp(G, phi, seed=s, threads=threads)
                ms = (time.perf_counter() - t0) * 1000
                err = measure_error(G, p)
                rows.append([name, G.n, G.m, phi, err, err / G.m if G.m else 0.0,
                             p.stats.sweeps, p.stats.cut_matching_rounds, round(ms, 1), s])
    return rows


def cmd_bench(args) -> int:
    phis = _parse_list(args.phis, float, "phis")
    for phi in phis:
        _phi_arg(str(phi))
    sizes = _parse_list(args.sizes, str, "sizes")
    threads = args.threads if args.threads is not None else 1
    try:
        rows = run_bench(args.suite, phis, sizes, args.seed, args.seeds, threads)
    except ValueError as exc:
        raise UsageError(str(exc))
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(BENCH_HEADER)
        w.writerows(rows)
    finally:
        if args.csv:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expander-decomp", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="decompose an edge-list graph")
    d.add_argument("input")
    d.add_argument("--phi", required=True)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", help="partition TSV (default stdout)")
    d.add_argument("--report", help="JSON run report")
    d.add_argument("--threads", type=int, default=None)
    d.add_argument("--verify", action="store_true",
                   help="audit clusters (always on when n <= 20)")
    d.set_defaults(func=cmd_decompose)

    g = sub.add_parser("gen", help="emit a generated graph as an edge list")
    g.add_argument("kind", choices=["ring-of-cliques", "dumbbell", "random-regular", "path"])
    g.add_argument("--k", type=int)
    g.add_argument("--s", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="audit a partition TSV against a graph")
    v.add_argument("partition")
    v.add_argument("graph")
    v.add_argument("--phi", required=True)
    v.add_argument("--strict", action="store_true", help="check clusters at phi, not phi/6")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run a benchmark suite and write CSV")
    b.add_argument("suite", choices=["ring", "dumbbell", "regular", "path"])
    b.add_argument("--phis", default="0.01,0.05,0.2")
    b.add_argument("--sizes", default="4x6")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    b.add_argument("--threads", type=int, default=None)
    b.add_argument("--csv")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
