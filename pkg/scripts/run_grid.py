#!/usr/bin/env python3
"""Run the full cross-validation grid and write per-lattice reports as JSONL.

Example:
    python3 scripts/run_grid.py --p 3,5,7 --n 2,3,4 --d-max 5 --jobs 4 --out reports.jsonl
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from siegel.verify import CHECKS, GridSpec, run_grid


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", default="3,5,7")
    ap.add_argument("--n", default="2,3,4")
    ap.add_argument("--d-max", type=int, default=5)
    ap.add_argument("--all-shapes", action="store_true")
    ap.add_argument("--density", action="store_true")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("grid_reports.jsonl"))
    args = ap.parse_args()

    spec = GridSpec(
        primes=tuple(int(x) for x in args.p.split(",")),
        n_range=tuple(int(x) for x in args.n.split(",")),
        d_max=args.d_max,
        tail_only=not args.all_shapes,
        density=args.density,
        jobs=args.jobs,
    )
    start = time.perf_counter()
    with args.out.open("w") as sink:
        summary, failing = run_grid(spec, sink=sink)
    elapsed = time.perf_counter() - start

    print(f"{summary.total} lattices in {elapsed:.1f}s, {summary.failed} with a failing check")
    width = max(len(c) for c in CHECKS)
    for name, tally in summary.per_check.items():
        print(f"  {name:<{width}}  pass {tally['pass']:>5}  fail {tally['fail']:>3}  skipped {tally['skipped']:>5}")
    for rep in failing[:10]:
        print(json.dumps(rep))
    return 1 if summary.failed else 0


if __name__ == "__main__":
    sys.exit(main())
