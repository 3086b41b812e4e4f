"""Finite symbolic set algebra over F.

Sets are built from *basic* sets: distinguished sets and, when n == 2, the
rank-one cosets g + t^j Q_p[[t]].  Any two basic sets are disjoint or nested,
so a finite collection of them forms a laminar forest.  Each node N of the
forest owns an *atom*, N minus the union of its children, and every Boolean
combination of the basic sets is a union of atoms.  All algebra (normal
forms, equality, containment, uniformity) is computed on atom sets.

An atom can be empty.  For a rank-one node it never is.  For a distinguished
node N = a + p^i t^k O_F only the children with the same t-part k can help
cover N (children of larger t-part sit in cosets of infinite index), and they
cover N exactly when repeatedly merging complete blocks of p sibling cosets
reaches N.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from . import hlf
from .hlf import DistinguishedSet, FieldElement, FieldShape, ShapeMismatch
from .index_core import MultiIndex, rightlex_min


# --------------------------------------------------------------------------
# set expressions


class SymbolicSet:
    __slots__ = ()

    def __or__(self, other):
        return union(self, other)

    def __and__(self, other):
        return intersection(self, other)

    def __sub__(self, other):
        return difference(self, other)

    def __str__(self) -> str:
        from .parse import format_set

        return format_set(self)


@dataclass(frozen=True)
class Empty(SymbolicSet):
    shape: FieldShape


@dataclass(frozen=True)
class Dist(SymbolicSet):
    d: DistinguishedSet

    @property
    def shape(self) -> FieldShape:
        return self.d.shape


@dataclass(frozen=True)
class RankOne(SymbolicSet):
    """g + t^j Q_p[[t]] for n == 2, with g reduced (terms of degree >= j dropped)."""

    translate: FieldElement
    j: int

    @property
    def shape(self) -> FieldShape:
        return self.translate.shape


@dataclass(frozen=True)
class Union(SymbolicSet):
    members: tuple

    @property
    def shape(self) -> FieldShape:
        return self.members[0].shape


@dataclass(frozen=True)
class Diff(SymbolicSet):
    base: SymbolicSet
    holes: tuple

    @property
    def shape(self) -> FieldShape:
        return self.base.shape


def rank_one(shape: FieldShape, g, j: int) -> RankOne:
    if shape.n != 2:
        raise ValueError("rank-one cosets are only supported for n = 2")
    if not isinstance(g, FieldElement):
        g = FieldElement.constant(shape, g)
    kept = tuple((e, c) for e, c in g.terms if e[0] < j)
    return RankOne(FieldElement(shape, kept), int(j))


def dist(shape: FieldShape, alpha, i1: int, tail) -> Dist:
    return Dist(hlf.dset(shape, alpha, i1, tail))


def make_union(members: Iterable[SymbolicSet]) -> SymbolicSet:
    members = tuple(members)
    if not members:
        raise ValueError("empty union needs an explicit Empty(shape)")
    return members[0] if len(members) == 1 else Union(members)


def make_diff(base: SymbolicSet, holes: Iterable[SymbolicSet]) -> SymbolicSet:
    holes = tuple(holes)
    return Diff(base, holes) if holes else base


Basic = DistinguishedSet | RankOne


def shape_of(S) -> FieldShape:
    return S.shape


def basic_sets(S) -> Iterator[Basic]:
    if isinstance(S, DistinguishedSet):
        yield S
    elif isinstance(S, Dist):
        yield S.d
    elif isinstance(S, RankOne):
        yield S
    elif isinstance(S, Union):
        for m in S.members:
            yield from basic_sets(m)
    elif isinstance(S, Diff):
        yield from basic_sets(S.base)
        for h in S.holes:
            yield from basic_sets(h)
    elif not isinstance(S, Empty):
        raise TypeError(f"not a symbolic set: {S!r}")


def _as_set(S) -> SymbolicSet:
    return Dist(S) if isinstance(S, DistinguishedSet) else S


# --------------------------------------------------------------------------
# membership and relations between basic sets


def rank1_member(x: FieldElement, R: RankOne) -> bool:
    y = x - R.translate
    return all(e[0] >= R.j for e, _ in y.terms)


def member(x: FieldElement, S) -> bool:
    if isinstance(S, DistinguishedSet):
        return hlf.member(x, S)
    if x.shape != S.shape:
        raise ShapeMismatch("element and set live in different fields")
    if isinstance(S, Empty):
        return False
    if isinstance(S, Dist):
        return hlf.member(x, S.d)
    if isinstance(S, RankOne):
        return rank1_member(x, S)
    if isinstance(S, Union):
        return any(member(x, m) for m in S.members)
    if isinstance(S, Diff):
        return member(x, S.base) and not any(member(x, h) for h in S.holes)
    raise TypeError(f"not a symbolic set: {S!r}")


def basic_subset(a: Basic, b: Basic) -> bool:
    if isinstance(a, DistinguishedSet) and isinstance(b, DistinguishedSet):
        return hlf.subset(a, b)
    if isinstance(a, DistinguishedSet):
        return a.tail[0] >= b.j and rank1_member(a.translate, b)
    if isinstance(b, DistinguishedSet):
        return b.tail[0] < a.j and hlf.member(a.translate, b)
    return a.j >= b.j and rank1_member(a.translate, b)


def basic_level(b: Basic) -> MultiIndex:
    return MultiIndex(b.tail) if isinstance(b, DistinguishedSet) else MultiIndex((b.j,))


def _size_key(b: Basic):
    # supersets sort before their subsets
    if isinstance(b, DistinguishedSet):
        return (b.tail.key(), 0, b.i1)
    return ((b.j,), -1, 0)


def basic_key(b: Basic):
    terms = tuple((tuple(reversed(e)), c) for e, c in b.translate.terms)
    return (_size_key(b), terms)


def _translate_basic(b: Basic, g: FieldElement) -> Basic:
    if isinstance(b, DistinguishedSet):
        return b.translated(g)
    return rank_one(b.shape, b.translate + g, b.j)


def translate(S, g: FieldElement) -> SymbolicSet:
    """g + S."""
    if isinstance(S, DistinguishedSet):
        return Dist(S.translated(g))
    if isinstance(S, Empty):
        return S
    if isinstance(S, Dist):
        return Dist(S.d.translated(g))
    if isinstance(S, RankOne):
        return _translate_basic(S, g)
    if isinstance(S, Union):
        return Union(tuple(translate(m, g) for m in S.members))
    if isinstance(S, Diff):
        return Diff(translate(S.base, g), tuple(translate(h, g) for h in S.holes))
    raise TypeError(f"not a symbolic set: {S!r}")


# --------------------------------------------------------------------------
# the laminar forest


class Forest:
    def __init__(self, shape: FieldShape, basics: Iterable[Basic]):
        self.shape = shape
        uniq = sorted(set(basics), key=basic_key)
        self.nodes: list[Basic] = []
        self.index: dict[Basic, int] = {}
        self.parent: list[int | None] = []
        self.children: list[list[int]] = []
        self.roots: list[int] = []
        for b in uniq:
            if b.shape != shape:
                raise ShapeMismatch("basic sets from different fields")
            self._insert(b)
        self._empty = [self._atom_empty(k) for k in range(len(self.nodes))]
        self._subtree: dict[int, frozenset] = {}

    def _insert(self, b: Basic):
        k = len(self.nodes)
        self.nodes.append(b)
        self.index[b] = k
        self.children.append([])
        level, par = self.roots, None
        while True:
            for c in level:
                if basic_subset(b, self.nodes[c]):
                    par, level = c, self.children[c]
                    break
            else:
                break
        self.parent.append(par)
        level.append(k)

    def _atom_empty(self, k: int) -> bool:
        N = self.nodes[k]
        if isinstance(N, RankOne):
            return False
        cells = {
            self.nodes[c]
            for c in self.children[k]
            if isinstance(self.nodes[c], DistinguishedSet) and self.nodes[c].tail == N.tail
        }
        if not cells:
            return False
        p = self.shape.p
        while N not in cells:
            groups: dict[DistinguishedSet, list] = {}
            for c in cells:
                if c.i1 > N.i1:
                    groups.setdefault(hlf.parent(c), []).append(c)
            merged = False
            for par, sibs in groups.items():
                if len(sibs) == p:
                    cells.difference_update(sibs)
                    cells.add(par)
                    merged = True
            if not merged:
                return False
        return True

    def atom_empty(self, k: int) -> bool:
        return self._empty[k]

    def subtree(self, k: int) -> frozenset:
        if k not in self._subtree:
            out = {k}
            for c in self.children[k]:
                out |= self.subtree(c)
            self._subtree[k] = frozenset(out)
        return self._subtree[k]

    def eval(self, S) -> frozenset:
        if isinstance(S, DistinguishedSet):
            return self.subtree(self.index[S])
        if isinstance(S, Empty):
            return frozenset()
        if isinstance(S, Dist):
            return self.subtree(self.index[S.d])
        if isinstance(S, RankOne):
            return self.subtree(self.index[S])
        if isinstance(S, Union):
            out: frozenset = frozenset()
            for m in S.members:
                out |= self.eval(m)
            return out
        if isinstance(S, Diff):
            out = self.eval(S.base)
            for h in S.holes:
                out -= self.eval(h)
            return out
        raise TypeError(f"not a symbolic set: {S!r}")

    def nonempty(self, atoms: Iterable[int]) -> frozenset:
        return frozenset(a for a in atoms if not self._empty[a])

    def atom_point(self, k: int) -> FieldElement:
        """A point of the (nonempty) atom of node k."""
        node = _as_set(self.nodes[k])
        kids = [_as_set(self.nodes[c]) for c in self.children[k]]
        if not kids:
            return self.nodes[k].translate
        return _surviving_point(Diff(node, tuple(kids)))

    def locate(self, x: FieldElement) -> int | None:
        """Node whose atom contains x, or None when x lies in no node."""
        level, found = self.roots, None
        while True:
            for c in level:
                if member(x, _as_set(self.nodes[c])):
                    found, level = c, self.children[c]
                    break
            else:
                return found

    # -- normal form ---------------------------------------------------------

    def _full(self, k: int, A: frozenset) -> bool:
        return all(a in A or self._empty[a] for a in self.subtree(k))

    def _none(self, k: int, A: frozenset) -> bool:
        return all(a not in A or self._empty[a] for a in self.subtree(k))

    def _emit(self, k: int, A: frozenset, out: list):
        N = _as_set(self.nodes[k])
        if self._full(k, A):
            out.append(N)
            return
        if self._none(k, A):
            return
        kids = sorted(self.children[k], key=lambda c: basic_key(self.nodes[c]))
        if k in A and not self._empty[k]:
            holes = [c for c in kids if not self._full(c, A)]
            out.append(Diff(N, tuple(_as_set(self.nodes[c]) for c in holes)))
            for c in holes:
                self._emit(c, A, out)
        else:
            for c in kids:
                self._emit(c, A, out)

    def emit(self, A: frozenset) -> SymbolicSet:
        out: list = []
        for r in sorted(self.roots, key=lambda c: basic_key(self.nodes[c])):
            self._emit(r, A, out)
        if not out:
            return Empty(self.shape)
        return out[0] if len(out) == 1 else Union(tuple(out))


def forest_of(*sets) -> Forest:
    shapes = {s.shape for s in sets}
    if len(shapes) != 1:
        raise ShapeMismatch("sets live in different fields")
    basics = [b for s in sets for b in basic_sets(s)]
    return Forest(shapes.pop(), basics)


# --------------------------------------------------------------------------
# Boolean operations


def normalize(S) -> SymbolicSet:
    """Disjoint normal form: a union of distinguished sets, rank-one cosets and
    differences outer - [holes] whose holes are disjoint basic sets strictly
    inside the outer set.  Complete blocks of p cosets are not merged."""
    S = _as_set(S)
    F = forest_of(S)
    return F.emit(F.eval(S))


def union(*sets) -> SymbolicSet:
    sets = [_as_set(s) for s in sets]
    F = forest_of(*sets)
    A: frozenset = frozenset()
    for s in sets:
        A |= F.eval(s)
    return F.emit(A)


def intersection(*sets) -> SymbolicSet:
    sets = [_as_set(s) for s in sets]
    F = forest_of(*sets)
    A = F.eval(sets[0])
    for s in sets[1:]:
        A &= F.eval(s)
    return F.emit(A)


def difference(a, b) -> SymbolicSet:
    a, b = _as_set(a), _as_set(b)
    F = forest_of(a, b)
    return F.emit(F.eval(a) - F.eval(b))


def is_empty(S) -> bool:
    S = _as_set(S)
    F = forest_of(S)
    return not F.nonempty(F.eval(S))


def equal(a, b) -> bool:
    a, b = _as_set(a), _as_set(b)
    F = forest_of(a, b)
    return not F.nonempty(F.eval(a) ^ F.eval(b))


def subset(a, b) -> bool:
    a, b = _as_set(a), _as_set(b)
    F = forest_of(a, b)
    return not F.nonempty(F.eval(a) - F.eval(b))


def components(S) -> tuple:
    S = _as_set(S)
    if isinstance(S, Empty):
        return ()
    if isinstance(S, Union):
        return S.members
    return (S,)


def outer(c: SymbolicSet) -> Basic:
    if isinstance(c, Diff):
        c = c.base
    if isinstance(c, Dist):
        return c.d
    if isinstance(c, RankOne):
        return c
    raise TypeError(f"{c!r} is not a normalized component")


# --------------------------------------------------------------------------
# levels


@dataclass(frozen=True)
class HasLevel:
    level: MultiIndex

    def to_json(self) -> dict:
        return {"kind": "level", "level": list(self.level)}


@dataclass(frozen=True)
class Uniform(HasLevel):
    def to_json(self) -> dict:
        return {"kind": "uniform", "level": list(self.level)}


@dataclass(frozen=True)
class NonUniform(HasLevel):
    def to_json(self) -> dict:
        return {"kind": "non_uniform", "level": list(self.level)}


@dataclass(frozen=True)
class NoDistinguishedSubset:
    level = None

    def to_json(self) -> dict:
        return {"kind": "no_distinguished_subset", "level": None}


@dataclass(frozen=True)
class TypeS:
    def to_json(self) -> dict:
        return {"kind": "type_S"}


def level(S) -> HasLevel | NoDistinguishedSubset:
    """Right-lex minimal level over the distinguished subsets of S.

    In normal form every component contains a distinguished set of its outer
    level, and a distinguished set cannot be covered by finitely many sets of
    strictly larger level, so the minimum over component levels is exact.
    """
    N = normalize(S)
    comps = components(N)
    if not comps:
        return NoDistinguishedSubset()
    return HasLevel(rightlex_min(basic_level(outer(c)) for c in comps))


def _thin(b: Basic, gamma: MultiIndex) -> bool:
    return basic_level(b) > gamma


def _same_fiber(x: FieldElement, y: FieldElement, gamma: MultiIndex) -> bool:
    # x - y lies in every p^a t^gamma O_F
    d = x - y
    for e, _ in d.terms:
        rel = tuple(a - b for a, b in zip(e, gamma))
        if hlf._rightmost_sign(rel) <= 0:
            return False
    return True


def _fiber_report(S) -> tuple[HasLevel | NoDistinguishedSubset, list]:
    """Level of S and the special fibres that break uniformity."""
    S = _as_set(S)
    lv = level(S)
    if not isinstance(lv, HasLevel):
        return lv, []
    gamma = lv.level
    F = forest_of(S)
    A = F.nonempty(F.eval(S))
    thin = [k for k in range(len(F.nodes)) if _thin(F.nodes[k], gamma)]
    fibers: list[list[int]] = []
    for k in thin:
        for fb in fibers:
            if _same_fiber(F.nodes[k].translate, F.nodes[fb[0]].translate, gamma):
                fb.append(k)
                break
        else:
            fibers.append([k])
    bad = []
    for fb in fibers:
        beta = F.nodes[fb[0]].translate
        # deepest node of level <= gamma containing the fibre
        host, lvl = None, F.roots
        while True:
            for c in lvl:
                if not _thin(F.nodes[c], gamma) and member(beta, _as_set(F.nodes[c])):
                    host, lvl = c, F.children[c]
                    break
            else:
                break
        thin_atoms = {a for k in fb for a in F.subtree(k) if not F.atom_empty(a)}
        whole_fiber = any(
            isinstance(F.nodes[k], RankOne) and F.nodes[k].j == gamma[0] + 1 for k in fb
        )
        meets = bool(thin_atoms & A) or (host is not None and host in A and not whole_fiber)
        if not meets:
            continue
        ok = host is not None and host in A and thin_atoms <= A
        if not ok:
            bad.append(beta)
    return lv, bad


def uniform_level(S) -> HasLevel | NoDistinguishedSubset:
    """Uniform(g) if every point of S lies in a distinguished subset of S of
    level g = level(S), else NonUniform(g).

    Points whose fibre s + (intersection of all p^a t^g O_F) meets no basic set
    of level above g always have such a neighbourhood.  For each of the
    finitely many remaining fibres the shrinking cosets around it eventually
    consist of the atom of the deepest coarse node holding the fibre plus the
    basic sets of higher level inside the fibre, so one atom check decides it.
    """
    lv, bad = _fiber_report(S)
    if not isinstance(lv, HasLevel):
        return lv
    return NonUniform(lv.level) if bad else Uniform(lv.level)


def _fiber_points(F: Forest, S, beta: FieldElement, gamma: MultiIndex):
    # points of thin atoms of the fibre, then points far out in the fibre
    # that avoid every thin basic set (and so sit in the host's atom)
    for k, b in enumerate(F.nodes):
        if _thin(b, gamma) and _same_fiber(b.translate, beta, gamma):
            for a in F.subtree(k):
                if not F.atom_empty(a):
                    yield F.atom_point(a)
    p = F.shape.p
    depth = max([abs(b.i1) for b in F.nodes if isinstance(b, DistinguishedSet)], default=0)
    for k in range(len(gamma)):
        e = tuple(g + (1 if i == k else 0) for i, g in enumerate(gamma))
        for m in range(depth + 2):
            yield beta + FieldElement.monomial(F.shape, Fraction(p) ** (-depth - 1 - m), e)


def non_uniform_points(S) -> list[FieldElement]:
    """One point of S in each fibre where uniformity fails.

    Every level-g neighbourhood of such a point contains its whole fibre, so
    none of them fits inside S.
    """
    lv, bad = _fiber_report(S)
    if not bad:
        return []
    S = _as_set(S)
    F = forest_of(S)
    out = []
    for beta in bad:
        for x in _fiber_points(F, S, beta, lv.level):
            if member(x, S):
                out.append(x)
                break
        else:
            raise AssertionError("non-uniform fibre without a point of the set")
    return out


def _witness_bound(S, x: FieldElement, gamma: MultiIndex) -> tuple[int, int]:
    lows, highs = [0], [0]
    for b in basic_sets(S):
        if isinstance(b, DistinguishedSet):
            lows.append(b.i1)
            highs.append(b.i1)
        c = (x - b.translate).coefficient(tuple(gamma))
        v = hlf.vp(c, x.shape.p)
        if v != float("inf"):
            lows.append(v)
            highs.append(v)
    for _, c in x.terms:
        v = hlf.vp(c, x.shape.p)
        lows.append(v)
    return min(lows) - 1, max(highs) + 1


def uniform_witness(S, x: FieldElement, gamma=None) -> DistinguishedSet | None:
    """A distinguished D with x in D, D within S and level(D) == gamma."""
    S = _as_set(S)
    if not member(x, S):
        raise ValueError("point is not in the set")
    if gamma is None:
        lv = level(S)
        if not isinstance(lv, HasLevel):
            return None
        gamma = lv.level
    gamma = MultiIndex(gamma)
    lo, hi = _witness_bound(S, x, gamma)
    for a in range(lo, hi + 1):
        D = hlf.dset(x.shape, x, a, gamma)
        if subset(Dist(D), S):
            return D
    return None


def classify(S):
    lv = level(S)
    if isinstance(lv, NoDistinguishedSubset):
        return TypeS()
    return lv


@dataclass(frozen=True)
class IntersectionLevelReport:
    level_a: MultiIndex
    level_b: MultiIndex
    level_ab: MultiIndex
    uniform_both: bool
    inequality: bool
    equality: bool | None

    @property
    def passed(self) -> bool:
        return self.inequality and (self.equality is not False)

    def to_json(self) -> dict:
        return {
            "levels": [list(self.level_a), list(self.level_b), list(self.level_ab)],
            "uniform_both": self.uniform_both,
            "inequality": self.inequality,
            "equality": self.equality,
            "passed": self.passed,
        }


class EmptyIntersection(ValueError):
    pass


def check_intersection_level(A, B) -> IntersectionLevelReport:
    """lv(A & B) >= max(lv A, lv B), with equality when both are uniform."""
    I = intersection(A, B)
    if is_empty(I):
        raise EmptyIntersection("A and B are disjoint")
    la, lb, li = level(A).level, level(B).level, level(I).level
    top = la if la >= lb else lb
    both = isinstance(uniform_level(A), Uniform) and isinstance(uniform_level(B), Uniform)
    return IntersectionLevelReport(
        la, lb, li, both, li >= top, (li == top) if both else None
    )


def refine_to_level(S, delta, gamma=None) -> DistinguishedSet:
    """A distinguished subset of S of level delta >= gamma = level(S).

    Takes a level-gamma distinguished subset a + p^i t^gamma O_F and replaces
    its t-part by delta, which keeps it inside (a smaller ideal).
    """
    S = _as_set(S)
    lv = level(S)
    if not isinstance(lv, HasLevel):
        raise ValueError("set has no distinguished subset")
    gamma = lv.level if gamma is None else MultiIndex(gamma)
    delta = MultiIndex(delta)
    if delta < gamma:
        raise ValueError("delta must be >= the level")
    for c in components(normalize(S)):
        o = outer(c)
        if basic_level(o) != gamma:
            continue
        x = o.translate
        if isinstance(c, Diff):
            x = _surviving_point(c)
        D = uniform_witness(S, x, gamma)
        if D is not None:
            return hlf.dset(S.shape, D.translate, D.i1, delta)
    raise ValueError("no level-gamma distinguished subset found")


def _surviving_point(c: Diff) -> FieldElement:
    """A point of outer - holes.

    Holes of the same level are balls in the leading coefficient; holes of
    larger level pin the leading coefficient to a single value.  Among
    p^q + len(holes) candidates one avoids both kinds.
    """
    o = outer(c)
    lv = basic_level(o)
    p = o.shape.p
    same = [h.d for h in c.holes if isinstance(h, Dist) and basic_level(h.d) == lv]
    if isinstance(o, DistinguishedSet):
        base = o.i1
        q = max([h.i1 - base for h in same], default=0) + 1
        residues = range(p**q)
    else:
        vals = [h.i1 for h in same]
        vals += [hlf.vp(h.translate.coefficient(tuple(lv)) - o.translate.coefficient(tuple(lv)), p) for h in same]
        base = min([v for v in vals if v != float("inf")], default=0) - 1
        q = 1
        residues = [1]
    for r in residues:
        for m in range(len(c.holes) + 1):
            x = o.translate + FieldElement.monomial(o.shape, Fraction(p) ** base * (r + m * p**q), lv)
            if member(x, c):
                return x
    raise AssertionError("difference component unexpectedly empty")


# --------------------------------------------------------------------------
# JSON


def to_json(S) -> dict:
    S = _as_set(S)
    if isinstance(S, Empty):
        return {"op": "empty"}
    if isinstance(S, Dist):
        return {"op": "dist", **S.d.to_json()}
    if isinstance(S, RankOne):
        return {"op": "rank1", "alpha": S.translate.to_json(), "j": S.j}
    if isinstance(S, Union):
        return {"op": "union", "members": [to_json(m) for m in S.members]}
    if isinstance(S, Diff):
        return {"op": "diff", "base": to_json(S.base), "holes": [to_json(h) for h in S.holes]}
    raise TypeError(f"not a symbolic set: {S!r}")


def from_json(shape: FieldShape, data) -> SymbolicSet:
    op = data["op"]
    if op == "empty":
        return Empty(shape)
    if op == "dist":
        return Dist(DistinguishedSet.from_json(shape, data))
    if op == "rank1":
        return rank_one(shape, FieldElement.from_json(shape, data["alpha"]), data["j"])
    if op == "union":
        return make_union(from_json(shape, m) for m in data["members"])
    if op == "diff":
        return Diff(from_json(shape, data["base"]), tuple(from_json(shape, h) for h in data["holes"]))
    raise ValueError(f"unknown set op {op!r}")
