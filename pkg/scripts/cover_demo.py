"""Random cover instances: decide each one, time it, and cross-check the
verdict against the finite quotient model."""

import argparse
import random
import time

from levelset import cover, sampling
from levelset import setalg as sa
from levelset.hlf import FieldShape
from levelset.sampling import Box


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--drop", type=float, default=0.2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    shape = FieldShape(args.p, args.n)
    box = Box.square(shape.width, -1, 1, 0, 2)
    stats = {"covered": 0, "not covered": 0, "disagree": 0}
    t0 = time.perf_counter()
    for _ in range(args.count):
        inst = sampling.rand_cover_instance(rng, shape, box, drop=args.drop)
        rep = cover.covers(inst)
        M = cover.auto_model(inst)
        fam = 0
        for m in inst.family:
            fam |= M.mask(m)
        model_says = M.mask(sa.Dist(inst.target)) & ~fam == 0
        stats["covered" if rep.covered else "not covered"] += 1
        stats["disagree"] += model_says != rep.covered
    dt = time.perf_counter() - t0
    print(f"{args.count} instances in {dt:.2f}s: {stats}")


if __name__ == "__main__":
    main()
