"""How fragment sizes and phi-signatures evolve with the depth bound."""

import argparse
import time

from cloneembed.config import Bounds
from cloneembed.construction import build_system
from cloneembed.embedding import clone_fragment
from cloneembed.family import singleton_family
from cloneembed.lattice import FIXTURES, all_ideals


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fixture", default="m3", choices=sorted(FIXTURES))
    ap.add_argument("--max-depth", type=int, default=4)
    ap.add_argument("--arity", type=int, default=2)
    ap.add_argument("--budget", type=int, default=200_000)
    args = ap.parse_args()

    L = FIXTURES[args.fixture]()
    sys = build_system(L, singleton_family(L.size))
    print(f"{'depth':>5} {'ideal':>6} {'members':>9} {'saturated':>9} {'exhausted':>9}  signature")
    for d in range(args.max_depth + 1):
        t0 = time.perf_counter()
        for x, ideal in enumerate(all_ideals(L)):
            frag = clone_fragment(sys, ideal, Bounds(args.arity, d, args.budget))
            core = frag.cores[args.arity]
            sig = ",".join(L.names[p] for p in sorted(frag.signature()))
            print(f"{d:5d} {L.names[x]:>6} {len(core):9d} {str(core.saturated):>9} {str(frag.exhausted):>9}  {{{sig}}}")
        print(f"      depth {d} took {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
