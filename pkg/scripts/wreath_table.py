"""Run the free wreath product checks over a grid of (s, n) and tabulate the statuses."""

from __future__ import annotations

import argparse
import sys
import time

from qig.cli import cmd_wreath_check
from qig.report import RunConfig


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=int, nargs="+", default=[4])
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--degree-bound", type=int, default=6)
    args = ap.parse_args()
    cfg = RunConfig(degree_bound=args.degree_bound)
    for s in args.s:
        for n in args.n:
            t0 = time.perf_counter()
            _, rep = cmd_wreath_check(s, n, cfg)
            dt = time.perf_counter() - t0
            if rep["caveat"]:
                print(f"s={s} n={n}: caveat, {rep['counts']}  ({dt:.1f}s)")
                continue
            statuses = " ".join(f"{k}={v['status']}" for k, v in rep["checks"].items())
            print(f"s={s} n={n}: {'pass' if rep['passed'] else 'FAIL'}  {statuses}  ({dt:.1f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
