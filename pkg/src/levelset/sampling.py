"""Seeded random generators for elements, sets and cover instances.

Everything stays inside a box of t-exponents and p-digit positions so that the
quotient model can check the results.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import hlf
from . import setalg as sa
from .cover import CoverInstance
from .hlf import DistinguishedSet, FieldElement, FieldShape
from .index_core import MultiIndex


@dataclass(frozen=True)
class Box:
    """t-exponent ranges (inclusive) and p-digit positions [i_lo, i_hi)."""

    t_window: tuple[tuple[int, int], ...]
    i_lo: int = 0
    i_hi: int = 2

    @classmethod
    def square(cls, width: int, lo: int, hi: int, i_lo: int = 0, i_hi: int = 2) -> "Box":
        return cls(((lo, hi),) * width, i_lo, i_hi)

    def exponents(self) -> list[tuple[int, ...]]:
        out = [()]
        for lo, hi in self.t_window:
            out = [e + (a,) for e in out for a in range(lo, hi + 1)]
        return out


def rand_digits(rng: random.Random, p: int, box: Box) -> Fraction:
    return Fraction(rng.randrange(p ** (box.i_hi - box.i_lo))) * Fraction(p) ** box.i_lo


def rand_element(rng: random.Random, shape: FieldShape, box: Box, density: float = 0.5) -> FieldElement:
    terms = {}
    for e in box.exponents():
        if rng.random() < density:
            terms[e] = rand_digits(rng, shape.p, box)
    return FieldElement.make(shape, terms)


def rand_tail(rng: random.Random, box: Box) -> tuple[int, ...]:
    return tuple(rng.randint(lo, hi) for lo, hi in box.t_window)


def rand_dset(rng: random.Random, shape: FieldShape, box: Box) -> DistinguishedSet:
    i1 = rng.randrange(box.i_lo, box.i_hi)
    return hlf.dset(shape, rand_element(rng, shape, box), i1, rand_tail(rng, box))


def rand_sub_dset(rng: random.Random, D: DistinguishedSet, depth: int = 2) -> DistinguishedSet:
    """A random p-refinement of D, 0 to ``depth`` digits deeper."""
    for _ in range(rng.randint(0, depth)):
        D = rng.choice(hlf.coset_reps(D, 1))
    return D


def rand_ddd(rng: random.Random, shape: FieldShape, box: Box, regions: int = 2) -> sa.SymbolicSet:
    """Union of a few distinguished sets with distinguished holes."""
    parts = []
    for _ in range(rng.randint(1, regions)):
        o = rand_dset(rng, shape, Box(box.t_window, box.i_lo, max(box.i_lo + 1, box.i_hi - 1)))
        holes = []
        for _ in range(rng.randint(0, 2)):
            h = rand_sub_dset(rng, o, 2)
            if h != o:
                holes.append(sa.Dist(h))
        parts.append(sa.make_diff(sa.Dist(o), holes) if holes else sa.Dist(o))
    return sa.union(*parts)


def partition(rng: random.Random, D: DistinguishedSet, depth: int, split: float = 0.6) -> list[DistinguishedSet]:
    """Random p-adic partition of D into same-tail cosets at most ``depth`` deeper."""
    if depth <= 0 or rng.random() > split:
        return [D]
    out = []
    for c in hlf.coset_reps(D, 1):
        out.extend(partition(rng, c, depth - 1, split))
    return out


def _group(rng: random.Random, leaves: list) -> list[sa.SymbolicSet]:
    rng.shuffle(leaves)
    members = []
    while leaves:
        k = rng.randint(1, min(3, len(leaves)))
        chunk, leaves = leaves[:k], leaves[k:]
        members.append(sa.union(*[sa.Dist(d) for d in chunk]))
    return members


def rand_cover_instance(
    rng: random.Random, shape: FieldShape, box: Box, depth: int = 3, drop: float = 0.15
) -> CoverInstance:
    """Target p^i t^g O_F; family: unions of cells of a random partition, each
    cell dropped with probability ``drop``."""
    i1 = rng.randrange(box.i_lo, box.i_hi)
    tail = rand_tail(rng, box)
    target = hlf.dset(shape, 0, i1, tail)
    leaves = [d for d in partition(rng, target, depth) if rng.random() >= drop]
    if not leaves:
        leaves = [rng.choice(hlf.coset_reps(target, 1))]
    return CoverInstance(target, MultiIndex(tail), tuple(_group(rng, leaves)))


def _lower(shape: FieldShape, D: DistinguishedSet, rng: random.Random) -> DistinguishedSet:
    # a distinguished set of strictly smaller level containing D
    tail = list(D.tail)
    k = rng.randrange(len(tail))
    tail[k] -= 1
    return hlf.dset(shape, D.translate, rng.randint(0, 1), tuple(tail))


def rand_mixed_instance(rng: random.Random, shape: FieldShape, box: Box, depth: int = 2) -> CoverInstance:
    """A covering family in which some cells are replaced by enclosing sets of
    lower level, plus distractors outside the target."""
    i1 = rng.randrange(box.i_lo, box.i_hi)
    tail = rand_tail(rng, box)
    target = hlf.dset(shape, 0, i1, tail)
    cells = partition(rng, target, depth, split=0.8)
    family: list[sa.SymbolicSet] = []
    for c in cells:
        if rng.random() < 0.4:
            family.append(sa.Dist(_lower(shape, c, rng)))
        else:
            family.append(sa.Dist(c))
    if rng.random() < 0.5:
        far = hlf.dset(shape, FieldElement.monomial(shape, Fraction(1, shape.p), tail), 0, tail)
        family.append(sa.Dist(far))
    rng.shuffle(family)
    return CoverInstance(target, MultiIndex(tail), tuple(family))


def rand_reps_family(rng: random.Random, T: DistinguishedSet, depth: int = 2, keep: float = 1.0) -> list:
    return [sa.Dist(d) for d in partition(rng, T, depth) if rng.random() < keep]
