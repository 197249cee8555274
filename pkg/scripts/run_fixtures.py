"""Run every suite on the built-in fixtures and write one report per fixture."""

import argparse
import json
import logging
import time
from pathlib import Path

from cloneembed.config import Bounds
from cloneembed.lattice import FIXTURES
from cloneembed.report import dumps, run, write_atomic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--fixtures", nargs="*", default=list(FIXTURES))
    ap.add_argument("--suite", default="all")
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--budget", type=int, default=200_000)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    out = Path(args.out)
    rows = []
    for name in args.fixtures:
        t0 = time.perf_counter()
        r = run(name, suites=args.suite, bounds=Bounds(depth=args.depth, budget=args.budget))
        dt = time.perf_counter() - t0
        write_atomic(out / f"{name}.json", dumps(r))
        rows.append({"fixture": name, "status": r["status"], "seconds": round(dt, 1),
                     "failed": r["failed"], "inconclusive": r["inconclusive"]})
        print(f"{name:8s} {r['status']:13s} {dt:7.1f}s")
    write_atomic(out / "summary.json", json.dumps(rows, indent=2) + "\n")


if __name__ == "__main__":
    main()
