"""Scan windows [k, k+N] and print the stride-2 level of the primes in each.

    python3 scripts/twin_scan.py --N 10000 --starts 1 5 1000 100000
"""

import argparse
import json
import time

from levelset import zlevels


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=10_000)
    ap.add_argument("--starts", type=int, nargs="+", default=[1, 5, 1_000, 100_000, 1_000_000])
    args = ap.parse_args()
    for k in args.starts:
        t0 = time.perf_counter()
        rep = zlevels.twin_report(k, args.N)
        row = rep.to_json() | {"seconds": round(time.perf_counter() - t0, 4)}
        print(json.dumps(row, sort_keys=True))


if __name__ == "__main__":
    main()
