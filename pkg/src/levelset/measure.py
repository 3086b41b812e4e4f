"""Finitely additive translation-invariant measure on the ring of ddd-sets.

Values are Laurent polynomials in X_2, ..., X_n with rational coefficients and
mu(a + p^i t^g O_F) = p^(-i) X^g, so mu(O_F) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from . import hlf
from . import setalg as sa
from .hlf import DistinguishedSet, FieldShape, ShapeMismatch

Exps = tuple[int, ...]


@dataclass(frozen=True)
class MeasureValue:
    width: int
    terms: tuple[tuple[Exps, Fraction], ...] = ()

    @classmethod
    def make(cls, width: int, terms: Mapping[Exps, object] | Iterable = ()) -> "MeasureValue":
        acc: dict[Exps, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != width:
                raise ShapeMismatch(f"exponent {e} has wrong length")
            acc[e] = acc.get(e, Fraction(0)) + Fraction(c)
        kept = sorted(((e, c) for e, c in acc.items() if c), key=lambda t: tuple(reversed(t[0])))
        return cls(width, tuple(kept))

    @classmethod
    def zero(cls, width: int) -> "MeasureValue":
        return cls(width)

    @classmethod
    def monomial(cls, c, exps: Exps) -> "MeasureValue":
        return cls.make(len(exps), {tuple(exps): c})

    def _same(self, other: "MeasureValue"):
        if self.width != other.width:
            raise ShapeMismatch("measure values in different numbers of variables")

    def __add__(self, other: "MeasureValue") -> "MeasureValue":
        self._same(other)
        return MeasureValue.make(self.width, list(self.terms) + list(other.terms))

    def __neg__(self) -> "MeasureValue":
        return MeasureValue(self.width, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "MeasureValue") -> "MeasureValue":
        return self + (-other)

    def scale(self, c) -> "MeasureValue":
        return MeasureValue.make(self.width, [(e, Fraction(c) * x) for e, x in self.terms])

    def times_monomial(self, exps: Exps) -> "MeasureValue":
        return MeasureValue.make(
            self.width, [(tuple(a + b for a, b in zip(e, exps)), c) for e, c in self.terms]
        )

    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self) -> list:
        return [[list(e), c.numerator, c.denominator] for e, c in self.terms]

    @classmethod
    def from_json(cls, width: int, data) -> "MeasureValue":
        return cls.make(width, [(tuple(e), Fraction(num, den)) for e, num, den in data])

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            q = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            names = ["X"] if self.width == 1 else [f"X{k + 2}" for k in range(self.width)]
            mono = " ".join(f"{v}^{a}" for v, a in zip(names, e) if a)
            parts.append(f"{q} {mono}" if mono else q)
        return " + ".join(parts)


def mu_dist(D: DistinguishedSet) -> MeasureValue:
    return MeasureValue.monomial(Fraction(D.shape.p) ** (-D.i1), tuple(D.tail))


class NotDDD(ValueError):
    """The set is not a finite ddd-set (it involves a rank-one coset)."""


class InvalidDDD(ValueError):
    pass


@dataclass(frozen=True)
class DDDSet:
    shape: FieldShape
    regions: tuple[tuple[DistinguishedSet, tuple[DistinguishedSet, ...]], ...] = ()

    def as_set(self) -> sa.SymbolicSet:
        comps = [sa.make_diff(sa.Dist(o), [sa.Dist(h) for h in hs]) for o, hs in self.regions]
        if not comps:
            return sa.Empty(self.shape)
        return sa.make_union(comps)

    def validate(self) -> None:
        for o, hs in self.regions:
            for h in hs:
                if h == o or not hlf.subset(h, o):
                    raise InvalidDDD(f"hole {h} is not strictly inside {o}")
            for k, h in enumerate(hs):
                for g in hs[k + 1 :]:
                    if hlf.intersect(h, g) is not None:
                        raise InvalidDDD("holes overlap")
        pieces = [sa.make_diff(sa.Dist(o), [sa.Dist(h) for h in hs]) for o, hs in self.regions]
        if len(pieces) > 1:
            F = sa.forest_of(*pieces)
            seen: frozenset = frozenset()
            for piece in pieces:
                A = F.nonempty(F.eval(piece))
                if A & seen:
                    raise InvalidDDD("regions overlap")
                seen |= A

    def translated(self, g) -> "DDDSet":
        return DDDSet(
            self.shape,
            tuple((o.translated(g), tuple(h.translated(g) for h in hs)) for o, hs in self.regions),
        )

    def to_json(self) -> list:
        return [{"outer": o.to_json(), "holes": [h.to_json() for h in hs]} for o, hs in self.regions]

    @classmethod
    def from_json(cls, shape: FieldShape, data) -> "DDDSet":
        return cls(
            shape,
            tuple(
                (
                    DistinguishedSet.from_json(shape, r["outer"]),
                    tuple(DistinguishedSet.from_json(shape, h) for h in r["holes"]),
                )
                for r in data
            ),
        )


def to_ddd(S) -> DDDSet:
    N = sa.normalize(S)
    regions = []
    for c in sa.components(N):
        base, holes = (c.base, c.holes) if isinstance(c, sa.Diff) else (c, ())
        if isinstance(base, sa.RankOne) or any(isinstance(h, sa.RankOne) for h in holes):
            raise NotDDD("rank-one cosets are infinite unions of distinguished sets")
        regions.append((base.d, tuple(h.d for h in holes)))
    return DDDSet(N.shape, tuple(regions))


def mu(A: DDDSet, check: bool = True) -> MeasureValue:
    if check:
        A.validate()
    total = MeasureValue.zero(A.shape.width)
    for o, hs in A.regions:
        total = total + mu_dist(o)
        for h in hs:
            total = total - mu_dist(h)
    return total


def mu_set(S) -> MeasureValue:
    return mu(to_ddd(S), check=False)


def ddd_union(A: DDDSet, B: DDDSet) -> DDDSet:
    return to_ddd(sa.union(A.as_set(), B.as_set()))


def ddd_intersection(A: DDDSet, B: DDDSet) -> DDDSet:
    return to_ddd(sa.intersection(A.as_set(), B.as_set()))


def ddd_difference(A: DDDSet, B: DDDSet) -> DDDSet:
    return to_ddd(sa.difference(A.as_set(), B.as_set()))


@dataclass(frozen=True)
class HaarLiftReport:
    c: Fraction
    a: int
    j: int
    lhs: MeasureValue
    rhs: MeasureValue

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {
            "c": [self.c.numerator, self.c.denominator],
            "a": self.a,
            "j": self.j,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "holds": self.holds,
        }


def haar_lift_check(p: int, c, a: int, j: int) -> HaarLiftReport:
    """mu(t^j pi^-1(c + p^a Z_p)) against X^j mu_p(c + p^a Z_p), n = 2.

    The preimage of the ball under the residue map O_F -> Z_p, scaled by t^j,
    is the distinguished set c t^j + p^a t^j O_F.
    """
    shape = FieldShape(p, 2)
    c = Fraction(c)
    D = hlf.dset(shape, hlf.FieldElement.monomial(shape, c, (j,)), a, (j,))
    haar_ball = Fraction(p) ** (-a)
    rhs = MeasureValue.monomial(haar_ball, (0,)).times_monomial((j,))
    return HaarLiftReport(c, int(a), int(j), mu_dist(D), rhs)
