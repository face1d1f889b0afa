"""Trim cores with dangling fringes and compare the losses to their bounds.

Usage: python3 scripts/trimming_experiment.py --trials 30 --phi 0.1
"""

import argparse
import random
import sys

from expander_decomp.generators import trimming_instance
from expander_decomp.graph_core import cut_edges, volume
from expander_decomp.trimming import as_phi, trim
from expander_decomp.unit_flow import log2_ceil


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--phi", type=float, default=0.1)
    ap.add_argument("--kind", choices=["clique", "regular"], default="regular")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    q = as_phi(args.phi)
    print("n,core,|A|,boundary,|A'|,vol lost,vol bound,boundary A',rounds,pruned all")
    for t in range(args.trials):
        core = rng.randint(24, 80) if args.kind == "clique" else 2 * rng.randint(20, 90)
        G, A = trimming_instance(core, rng.randint(0, 5), rng.randint(0, 12), seed=t,
                                 kind=args.kind, degree=12)
        res = trim(G, A, args.phi)
        b = cut_edges(G, A)
        L = log2_ceil(G.n)
        lost = volume(G, A) - volume(G, res.A_prime)
        bound = float(4 * L * L * b / q)
        print(f"{G.n},{core},{len(A)},{b},{len(res.A_prime)},{lost},{bound:.0f},"
              f"{cut_edges(G, res.A_prime)},{res.iterations},{not res.A_prime}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
