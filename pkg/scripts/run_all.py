"""Derive every presentation in presentations/ and print a one-line table.

Reports land in results/ (one JSON per presentation) and in the usual cache.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from qig.cli import CliError, cmd_derive
from qig.report import RunConfig, atomic_write

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", help="presentation stems (default: all)")
    ap.add_argument("--out", default=str(ROOT / "results"))
    ap.add_argument("--oracle-check", action="store_true")
    ap.add_argument("--cache-dir", default=None)
    args = ap.parse_args()
    cfg = RunConfig(oracle_check=args.oracle_check, cache_dir=Path(args.cache_dir) if args.cache_dir else None)
    files = sorted((ROOT / "presentations").glob("*.grp"))
    if args.names:
        files = [f for f in files if f.stem in args.names]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(f"{'presentation':<14}{'size':>5}{'zeros':>7}  {'structure':<28}{'time':>8}")
    failed = 0
    for f in files:
        t0 = time.perf_counter()
        try:
            blob, rep = cmd_derive(str(f), cfg)
        except CliError as e:
            print(f"{f.stem:<14} error (exit {e.code}): {e}", file=sys.stderr)
            failed += 1
            continue
        atomic_write(out / f"{f.stem}.json", blob)
        st = rep["structure"]
        verdict = f"{st['kind']} ({st['certification']})"
        print(f"{f.stem:<14}{rep['matrix']['size']:>5}{len(rep['zero_symbols']):>7}  {verdict:<28}"
              f"{time.perf_counter() - t0:>7.1f}s")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
