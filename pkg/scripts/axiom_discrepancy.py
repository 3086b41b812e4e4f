"""Compare the strict and compatible readings of the structure conditions
on the field structure over a small window, and list the failing tuples."""

import argparse

from levelset import structures
from levelset.hlf import FieldShape
from levelset.index_core import AxiomMode, IndexWindow, MultiIndex, check_axioms


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--radius", type=int, default=1)
    args = ap.parse_args()
    s = structures.field_structure(FieldShape(args.p, args.n))
    e = s.elevation
    w = IndexWindow(tuple(range(args.radius + 1)), MultiIndex((-args.radius,) * e), MultiIndex((args.radius,) * e))
    for mode in (AxiomMode.STRICT, AxiomMode.COMPATIBLE):
        rep = check_axioms(s, w, mode)
        print(f"{mode.value:>10}: checked {rep.checked}, failures {len(rep.counterexamples)}")
        for c in rep.counterexamples[:10]:
            U, V, g, d = c.witness
            print(f"            condition {c.condition} at U={U} V={V} gamma={tuple(g)} delta={tuple(d)}")


if __name__ == "__main__":
    main()
