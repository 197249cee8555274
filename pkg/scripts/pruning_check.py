"""Compare the pruned unspoilt closure with the unspoilt part of the full closure."""

import argparse
import time

import numpy as np

from cloneembed.classify import substitutions
from cloneembed.construction import build_system
from cloneembed.enumeration import enumerate_clone, unspoilt_closure
from cloneembed.family import singleton_family
from cloneembed.lattice import FIXTURES


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fixtures", nargs="*", default=["one", "chain2", "chain3", "b2"])
    ap.add_argument("--arity", type=int, default=2)
    ap.add_argument("--depth", type=int, default=2)
    ap.add_argument("--budget", type=int, default=200_000)
    ap.add_argument("--work", type=int, default=10**7)
    args = ap.parse_args()

    for name in args.fixtures:
        L = FIXTURES[name]()
        sys = build_system(L, singleton_family(L.size))
        t0 = time.perf_counter()
        en = enumerate_clone(sys, sys.phi_symbols + sys.m_symbols, args.arity, args.depth, args.budget, max_work=args.work)
        t1 = time.perf_counter()
        codes = substitutions(sys, args.arity).codes(en.tables)
        full = {en.tables[j].tobytes() for j in np.flatnonzero((codes >= 0).any(axis=1))}
        cl = unspoilt_closure(sys, sys.phi, args.arity, args.depth, args.budget, max_work=args.work)
        t2 = time.perf_counter()
        core = cl.keys()
        verdict = "equal" if core == full else f"differ (+{len(core - full)} / -{len(full - core)})"
        print(f"{name:7s} full={len(en):7d} ({t1 - t0:5.1f}s, exhausted={en.exhausted}) "
              f"unspoilt={len(full):6d} core={len(core):6d} ({t2 - t1:5.1f}s)  {verdict}")


if __name__ == "__main__":
    main()
