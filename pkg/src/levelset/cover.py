"""Cover decisions for distinguished targets by finite families of sets.

The engine works on *cells*, basic sets inside the target.  For a cell T:

* if some family component contains T and none of its holes contains T, the
  component covers T minus its holes, and T is covered iff every hole lying
  inside T is covered (recursively, by the whole family);
* otherwise every component meeting T lies strictly inside T.  If one of them
  is a distinguished set with the same t-part as T, split T into its p cosets
  and recurse;
* otherwise all components inside T have larger level.  Each of them fixes
  the coefficient of the leading monomial of T, so finitely many of them
  cannot cover T and a point avoiding all of them is built explicitly.

Every "covered" answer is exact and every witness is re-checked by
membership.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import hlf
from . import setalg as sa
from .hlf import DistinguishedSet, FieldElement, FieldShape
from .index_core import MultiIndex
from .quotient import QuotientModel, build_quotient_model


class CoverError(ValueError):
    """A hypothesis of the cover decision is violated."""


@dataclass(frozen=True)
class CoverInstance:
    target: DistinguishedSet
    gamma: MultiIndex
    family: tuple

    def __post_init__(self):
        object.__setattr__(self, "gamma", MultiIndex(self.gamma))
        object.__setattr__(self, "family", tuple(sa._as_set(m) for m in self.family))
        if not self.family:
            raise CoverError("family must be nonempty")
        if any(m.shape != self.target.shape for m in self.family):
            raise CoverError("family members live in another field")

    @property
    def shape(self) -> FieldShape:
        return self.target.shape

    def to_json(self) -> dict:
        return {
            "target": self.target.to_json(),
            "gamma": list(self.gamma),
            "family": [sa.to_json(m) for m in self.family],
        }

    @classmethod
    def from_json(cls, shape: FieldShape, data) -> "CoverInstance":
        return cls(
            DistinguishedSet.from_json(shape, data["target"]),
            MultiIndex(data["gamma"]),
            tuple(sa.from_json(shape, m) for m in data["family"]),
        )


@dataclass(frozen=True)
class CoverReport:
    covered: bool
    subcover: tuple[int, ...] | None = None
    witness: FieldElement | None = None
    depth_used: int = 0
    hypothesis_met: bool = True

    @property
    def verdict(self) -> str:
        return "covered" if self.covered else "not_covered"

    def to_json(self) -> dict:
        out: dict = {"verdict": self.verdict, "depth": self.depth_used}
        if self.covered:
            out["subcover"] = list(self.subcover)
        else:
            out["witness"] = self.witness.to_json()
        if not self.hypothesis_met:
            out["hypothesis_met"] = False
        return out


# --------------------------------------------------------------------------
# engine


@dataclass
class _Comp:
    idx: int | None  # None marks a free region that needs no family member
    outer: sa.Basic
    holes: tuple


def _components_of(idx: int | None, S) -> list[_Comp]:
    out = []
    for c in sa.components(sa.normalize(S)):
        holes = tuple(sa.outer(h) for h in c.holes) if isinstance(c, sa.Diff) else ()
        out.append(_Comp(idx, sa.outer(c), holes))
    return out


def _leading(b: sa.Basic) -> tuple[int, ...]:
    return tuple(sa.basic_level(b))


class _Engine:
    def __init__(self, comps: list[_Comp]):
        self.comps = comps
        self.memo: dict = {}

    def cell(self, T: sa.Basic):
        """(covered, chosen indices, witness, depth)."""
        if T in self.memo:
            return self.memo[T]
        res = self._cell(T)
        self.memo[T] = res
        return res

    def _cell(self, T):
        holders = [
            c
            for c in self.comps
            if sa.basic_subset(T, c.outer) and not any(sa.basic_subset(T, h) for h in c.holes)
        ]
        if holders:
            free = [c for c in holders if c.idx is None]
            best = free[0] if free else min(holders, key=lambda c: c.idx)
            chosen = set() if best.idx is None else {best.idx}
            depth = 0
            for h in best.holes:
                if not sa.basic_subset(h, T):
                    continue
                ok, sub, wit, d = self.cell(h)
                if not ok:
                    return False, set(), wit, d
                chosen |= sub
                depth = max(depth, d)
            return True, chosen, None, depth

        inside = [c for c in self.comps if c.outer != T and sa.basic_subset(c.outer, T)]
        if isinstance(T, DistinguishedSet) and any(
            isinstance(c.outer, DistinguishedSet) and c.outer.tail == T.tail for c in inside
        ):
            chosen: set = set()
            depth = 0
            for child in hlf.coset_reps(T, 1):
                ok, sub, wit, d = self.cell(child)
                if not ok:
                    return False, set(), wit, d + 1
                chosen |= sub
                depth = max(depth, d + 1)
            return True, chosen, None, depth
        return False, set(), self._escape(T, inside), 0

    def _escape(self, T, inside: list[_Comp]) -> FieldElement:
        shape = T.shape
        p = shape.p
        lead = _leading(T)
        blockers = [sa._as_set(c.outer) for c in inside]
        if isinstance(T, DistinguishedSet):
            steps = [Fraction(p) ** T.i1 * c for c in range(len(blockers) + 1)]
        else:
            vals = [0]
            for c in inside:
                if isinstance(c.outer, DistinguishedSet):
                    vals.append(abs(c.outer.i1))
                for _, q in c.outer.translate.terms:
                    vals.append(abs(hlf.vp(q, p)))
            m0 = max(vals) + 1
            steps = [Fraction(p) ** (-m) for m in range(m0, m0 + len(blockers) + 2)]
        for q in steps:
            x = T.translate + FieldElement.monomial(shape, q, lead)
            if sa.member(x, sa._as_set(T)) and not any(sa.member(x, b) for b in blockers):
                return x
        raise AssertionError("no escaping point found")


def _decide(cells: list[sa.Basic], comps: list[_Comp]):
    eng = _Engine(comps)
    chosen: set = set()
    depth = 0
    for T in cells:
        ok, sub, wit, d = eng.cell(T)
        depth = max(depth, d)
        if not ok:
            return False, None, wit, d
        chosen |= sub
    return True, chosen, None, depth


def _target_cells(S) -> tuple[list[sa.Basic], list[_Comp]]:
    """Cells covering a normalized set plus its holes as free regions."""
    cells, free = [], []
    for c in sa.components(sa.normalize(S)):
        cells.append(sa.outer(c))
        if isinstance(c, sa.Diff):
            free.extend(_Comp(None, sa.outer(h), ()) for h in c.holes)
    return cells, free


def decide_cover(
    target, members: Sequence, origin: Sequence[int] | None = None, prune: bool = True
) -> CoverReport:
    """Exact decision of target within the union of ``members``.

    ``origin[k]`` is the index reported for ``members[k]`` (defaults to k);
    the subcover lists origins and is irredundant when ``prune`` is set.
    """
    origin = list(range(len(members))) if origin is None else list(origin)
    cells, free = _target_cells(target)
    comps = free + [c for k, m in zip(origin, members) for c in _components_of(k, m)]
    ok, chosen, wit, depth = _decide(cells, comps)
    if not ok:
        _check_witness(wit, target, members)
        return CoverReport(False, witness=wit, depth_used=depth)
    if prune:
        for k in sorted(chosen, reverse=True):
            keep = [c for c in comps if c.idx is None or (c.idx in chosen and c.idx != k)]
            if _decide(cells, keep)[0]:
                chosen.discard(k)
    return CoverReport(True, subcover=tuple(sorted(chosen)), depth_used=depth)


def _check_witness(x: FieldElement, target, members) -> None:
    if not sa.member(x, sa._as_set(target)) or any(sa.member(x, m) for m in members):
        raise AssertionError(f"witness {x} failed validation")


# --------------------------------------------------------------------------
# public operations


@dataclass(frozen=True)
class UniformReport:
    gamma: MultiIndex
    results: tuple

    @property
    def passed(self) -> bool:
        return all(isinstance(r, sa.Uniform) and r.level == self.gamma for r in self.results)

    @property
    def failing(self) -> list[int]:
        return [
            k
            for k, r in enumerate(self.results)
            if not (isinstance(r, sa.Uniform) and r.level == self.gamma)
        ]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "gamma": list(self.gamma),
            "members": [r.to_json() for r in self.results],
            "failing": self.failing,
        }


def validate_uniform(c: CoverInstance) -> UniformReport:
    return UniformReport(c.gamma, tuple(sa.uniform_level(m) for m in c.family))


def _check_gamma(c: CoverInstance):
    lv = hlf.level(c.target)
    if c.gamma != lv:
        raise CoverError(
            f"hypothesis violated: gamma {tuple(c.gamma)} must equal the level {tuple(lv)} of the target"
        )


def covers(c: CoverInstance) -> CoverReport:
    """Decide whether the family covers the target.

    gamma must be the level of the target and no member may be non-uniform.
    Members that are uniform at another level are accepted; the report then
    has ``hypothesis_met`` False.
    """
    _check_gamma(c)
    rep = validate_uniform(c)
    for k, r in enumerate(rep.results):
        if isinstance(r, sa.NonUniform):
            raise CoverError(f"hypothesis violated: member {k} is not of uniform level")
    res = decide_cover(c.target, c.family)
    if rep.passed:
        return res
    return CoverReport(res.covered, res.subcover, res.witness, res.depth_used, hypothesis_met=False)


def find_subcover(c: CoverInstance) -> CoverReport:
    """Subcover for families of mixed uniform levels at most the target level.

    Each member is cut down to its constituents inside the target; a chosen
    constituent is credited to the first member it came from.
    """
    _check_gamma(c)
    top = hlf.level(c.target)
    pieces, origin = [], []
    for k, m in enumerate(c.family):
        r = sa.uniform_level(m)
        if not isinstance(r, sa.Uniform):
            if isinstance(r, sa.NoDistinguishedSubset):
                continue
            raise CoverError(f"hypothesis violated: member {k} is not of uniform level")
        if r.level > top:
            raise CoverError(
                f"hypothesis violated: member {k} has level {tuple(r.level)} above {tuple(top)}"
            )
        for comp in sa.components(sa.intersection(m, sa.Dist(c.target))):
            pieces.append(comp)
            origin.append(k)
    if not pieces:
        x = c.target.translate
        return CoverReport(False, witness=x)
    res = decide_cover(c.target, pieces, origin)
    if not res.covered:
        _check_witness(res.witness, c.target, c.family)
    return res


def cover_union(targets: Sequence[DistinguishedSet], family: Sequence) -> CoverReport:
    """Decide coverage of a finite union of targets by one family."""
    K = sa.union(*[sa.Dist(t) for t in targets])
    return decide_cover(K, [sa._as_set(m) for m in family])


def demo_no_subcover(shape: FieldShape, j: int, k: int) -> tuple[CoverInstance, CoverReport]:
    """Target t^j O_F against the first k cosets c t^j + t^(j+1) O_F.

    The family has level j + 1 while the target has level j; the cosets are
    pairwise disjoint and infinitely many are needed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    tail = (j,) + (0,) * (shape.width - 1)
    finer = (j + 1,) + (0,) * (shape.width - 1)
    target = hlf.dset(shape, 0, 0, tail)
    family = tuple(
        sa.Dist(hlf.dset(shape, FieldElement.monomial(shape, c, tail), 0, finer)) for c in range(k)
    )
    inst = CoverInstance(target, MultiIndex(finer), family)
    return inst, decide_cover(target, family)


# --------------------------------------------------------------------------
# finite-model duality


def auto_model(c: CoverInstance, max_size: int = 200_000) -> QuotientModel:
    shape = c.shape
    basics = [c.target] + [b for m in c.family for b in sa.basic_sets(m)]
    exps = [tuple(sa.basic_level(b)) for b in basics]
    vals = [b.i1 for b in basics if isinstance(b, DistinguishedSet)]
    for b in basics:
        for e, q in b.translate.terms:
            exps.append(e)
            vals.append(hlf.vp(q, shape.p))
    win = [(min(e[k] for e in exps), max(e[k] for e in exps)) for k in range(shape.width)]
    i_lo = min(vals)
    if any(isinstance(b, sa.RankOne) for b in basics):
        win[0] = (win[0][0] - 1, win[0][1])
        i_lo -= 1
    i_hi = max(max(vals), i_lo) + 1
    return build_quotient_model(shape, win, i_lo, i_hi, max_size=max_size)


@dataclass(frozen=True)
class FipReport:
    covered: bool
    fip: bool
    total_intersection_empty: bool
    complements: int

    @property
    def holds(self) -> bool:
        return self.covered == (not self.fip) and self.covered == self.total_intersection_empty

    def to_json(self) -> dict:
        return {
            "covered": self.covered,
            "fip": self.fip,
            "total_intersection_empty": self.total_intersection_empty,
            "holds": self.holds,
        }


def fip_dual(c: CoverInstance, model: QuotientModel | None = None) -> FipReport:
    """Compare the cover verdict with the finite-intersection property of the
    complements E_i = target - family_i inside a quotient model."""
    _check_gamma(c)
    res = decide_cover(c.target, c.family, prune=False)
    model = model or auto_model(c)
    tm = model.mask(sa.Dist(c.target))
    comps = [tm & ~model.mask(m) for m in c.family]
    fip = True
    for r in range(1, len(comps) + 1):
        for sub in itertools.combinations(comps, r):
            acc = tm
            for e in sub:
                acc &= e
            if not acc:
                fip = False
                break
        if not fip:
            break
    total = tm
    for e in comps:
        total &= e
    return FipReport(res.covered, fip, total == 0, len(comps))


# --------------------------------------------------------------------------
# products


@dataclass(frozen=True)
class ProductCoverReport:
    covered: bool
    witness: tuple[FieldElement, FieldElement] | None
    types_checked: int

    def to_json(self) -> dict:
        out = {"verdict": "covered" if self.covered else "not_covered", "types": self.types_checked}
        if self.witness:
            out["witness"] = [w.to_json() for w in self.witness]
        return out


def product_covers(
    t1: DistinguishedSet, t2: DistinguishedSet, rects: Sequence[tuple]
) -> ProductCoverReport:
    """Decide t1 x t2 within the union of rectangles U_m x V_m.

    A point x of t1 only sees the rectangles with x in U_m, so the product is
    covered iff for every realizable membership pattern of points of t1 the
    matching V_m cover t2.
    """
    Us = [sa._as_set(u) for u, _ in rects]
    Vs = [sa._as_set(v) for _, v in rects]
    T1 = sa.Dist(t1)
    F = sa.forest_of(T1, *Us)
    inside = F.nonempty(F.eval(T1))
    evals = [F.eval(u) for u in Us]
    seen = {}
    for a in sorted(inside):
        pattern = frozenset(m for m, e in enumerate(evals) if a in e)
        seen.setdefault(pattern, a)
    for pattern, a in sorted(seen.items(), key=lambda kv: sorted(kv[0])):
        vs = [Vs[m] for m in sorted(pattern)]
        if vs:
            res = decide_cover(t2, vs, prune=False)
            if res.covered:
                continue
            y = res.witness
        else:
            y = t2.translate
        x = F.atom_point(a)
        return ProductCoverReport(False, (x, y), len(seen))
    return ProductCoverReport(True, None, len(seen))


def projections_cover(t1, t2, rects) -> tuple[bool, bool]:
    a = decide_cover(t1, [sa._as_set(u) for u, _ in rects], prune=False).covered
    b = decide_cover(t2, [sa._as_set(v) for _, v in rects], prune=False).covered
    return a, b
